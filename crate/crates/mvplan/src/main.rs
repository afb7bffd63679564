use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mvplan::automaton::{degeneralize, make_nonblocking};
use mvplan::error::Error;
use mvplan::export;
use mvplan::ltl::parse_formula;
use mvplan::model::{parse_model, parse_spec, spec_to_text, trace_reward, MissionSpec, TransitionSystem};
use mvplan::oracle::{brute_force_plan, BruteForceCaps};
use mvplan::planner::{synthesize, Synthesis, SynthesisOptions};
use mvplan::rescue::{generate_rescue_mission, RescueConfig};
use mvplan::tableau::{ltl_to_gba_with_cap, DEFAULT_STATE_CAP};

#[derive(Parser)]
#[command(name = "mvplan", version, about = "Minimum-violation LTL planner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a maximal-reward lasso plan for a model and spec.
    Plan(PlanArgs),
    /// Translate a single LTL formula to an automaton dump.
    Translate(TranslateArgs),
    /// Re-score a serialized plan against its model and spec.
    Check(CheckArgs),
    /// Generate a rescue-mission model and spec from a scenario config.
    GenRescue(GenRescueArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Model file (line-oriented transition system).
    #[arg(long)]
    model: PathBuf,
    /// Spec file (`reward N : formula` lines).
    #[arg(long)]
    spec: PathBuf,
    /// Cross-check against the brute-force oracle and report both.
    #[arg(long)]
    oracle: bool,
    /// Directory for DOT exports of all intermediate automata.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// State cap for every constructed automaton.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    max_states: usize,
    /// Replace file rewards with powers of two by formula order.
    #[arg(long)]
    lexicographic: bool,
    /// Also print the product-level trace block.
    #[arg(long)]
    trace: bool,
    /// Disable cross-invocation reuse of inner-search marks.
    #[arg(long)]
    no_reuse_inner: bool,
}

#[derive(Args)]
struct TranslateArgs {
    /// LTL formula text.
    #[arg(long)]
    formula: String,
    /// Write a DOT rendering to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Complete the automaton so every letter has a successor.
    #[arg(long)]
    nonblocking: bool,
    /// Degeneralize to a single acceptance set.
    #[arg(long)]
    degeneralize: bool,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    max_states: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    /// Serialized plan file to verify.
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args)]
struct GenRescueArgs {
    /// Scenario TOML; the built-in desk scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path for the model file.
    #[arg(long)]
    model_out: PathBuf,
    /// Output path for the spec file.
    #[arg(long)]
    spec_out: PathBuf,
}

/// Failure with a machine-parseable code and process exit status.
struct Failure {
    code: &'static str,
    exit: u8,
    message: String,
}

impl Failure {
    fn new(code: &'static str, exit: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            exit,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse(_) => "parse",
            Error::Validation(_) => "validation",
            Error::StateCap { .. } => "state-cap",
            Error::InvalidLasso(_) => "invalid-lasso",
            Error::Config(_) => "config",
            Error::OracleCap(_) => "oracle-cap",
        };
        Failure::new(code, 2, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new("io", 2, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Plan(args) => cmd_plan(args),
        Cmd::Translate(args) => cmd_translate(args),
        Cmd::Check(args) => cmd_check(args),
        Cmd::GenRescue(args) => cmd_gen_rescue(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, f.message);
            ExitCode::from(f.exit)
        }
    }
}

fn load_instance(
    model: &Path,
    spec: &Path,
    lexicographic: bool,
) -> Result<(TransitionSystem, MissionSpec), Failure> {
    let ts = parse_model(&read(model)?)?;
    let (spec, warnings) = parse_spec(&read(spec)?)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let spec = if lexicographic {
        let mut formulas: Vec<_> = spec
            .entries()
            .iter()
            .map(|e| (e.original_index, e.formula.clone()))
            .collect();
        formulas.sort_by_key(|&(i, _)| i);
        MissionSpec::lexicographic(formulas.into_iter().map(|(_, f)| f).collect())?
    } else {
        spec
    };
    Ok((ts, spec))
}

fn print_plan(ts: &TransitionSystem, syn: &Synthesis, trace: bool) {
    let plan = &syn.plan;
    println!("reward: {}", plan.reward);
    let names = |states: &[usize]| {
        states
            .iter()
            .map(|&s| ts.states[s].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("prefix: {}", names(&plan.prefix));
    println!("cycle: {}", names(&plan.cycle));
    let satisfied: Vec<String> = plan
        .verdicts
        .iter()
        .enumerate()
        .filter(|(_, &sat)| sat)
        .map(|(i, _)| i.to_string())
        .collect();
    println!("satisfied: {}", satisfied.join(" "));
    if trace {
        let ids = |states: &[usize]| {
            states
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("product-prefix: {}", ids(&plan.product_prefix));
        println!("product-cycle: {}", ids(&plan.product_cycle));
    }
}

fn cmd_plan(args: PlanArgs) -> Result<(), Failure> {
    let (ts, spec) = load_instance(&args.model, &args.spec, args.lexicographic)?;
    let opts = SynthesisOptions {
        max_states: args.max_states,
        reuse_inner: !args.no_reuse_inner,
    };
    let syn = synthesize(&ts, &spec, opts)?;
    print_plan(&ts, &syn, args.trace);

    if let Some(dir) = &args.dot {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        for (i, gba) in syn.gbas.iter().enumerate() {
            write(&dir.join(format!("gba{i}.dot")), &export::gba_dot(gba))?;
        }
        write(&dir.join("wba.dot"), &export::wba_dot(&syn.wba))?;
        write(
            &dir.join("product.dot"),
            &export::product_dot(&syn.product, &ts),
        )?;
    }

    if args.oracle {
        let caps = BruteForceCaps {
            max_ts_states: ts.num_states(),
            ..BruteForceCaps::default()
        };
        let oracle = brute_force_plan(&ts, &spec, caps)?;
        println!("oracle-reward: {}", oracle.reward);
        let subset: Vec<String> = oracle.subset.iter().map(|i| i.to_string()).collect();
        println!("oracle-subset: {}", subset.join(" "));
        if oracle.reward == syn.plan.reward {
            println!("oracle: match");
        } else {
            println!("oracle: mismatch");
            return Err(Failure::new(
                "mismatch",
                3,
                format!(
                    "planner reward {} differs from oracle reward {}",
                    syn.plan.reward, oracle.reward
                ),
            ));
        }
    }
    Ok(())
}

fn cmd_translate(args: TranslateArgs) -> Result<(), Failure> {
    let formula = parse_formula(&args.formula).map_err(|e| Failure::from(Error::Parse(e)))?;
    let mut gba = ltl_to_gba_with_cap(&formula, args.max_states)?;
    if args.nonblocking {
        gba = make_nonblocking(&gba);
    }
    if args.degeneralize {
        let ba = degeneralize(&gba);
        print!("{}", export::ba_dump(&ba));
        if let Some(path) = &args.dot {
            write(path, &export::ba_dot(&ba))?;
        }
    } else {
        print!("{}", export::gba_dump(&gba));
        if let Some(path) = &args.dot {
            write(path, &export::gba_dot(&gba))?;
        }
    }
    Ok(())
}

fn parse_plan_file(text: &str, ts: &TransitionSystem) -> Result<(u64, Vec<usize>, Vec<usize>), Failure> {
    let mut reward = None;
    let mut prefix = None;
    let mut cycle = None;
    for line in text.lines() {
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let value = value.trim();
        let states = |v: &str| -> Result<Vec<usize>, Failure> {
            v.split_whitespace()
                .map(|name| {
                    ts.state_index(name).ok_or_else(|| {
                        Failure::from(Error::invalid_lasso(format!("unknown state '{name}'")))
                    })
                })
                .collect()
        };
        match key.trim() {
            "reward" => {
                reward = Some(value.parse::<u64>().map_err(|_| {
                    Failure::from(Error::invalid_lasso(format!("bad reward '{value}'")))
                })?)
            }
            "prefix" => prefix = Some(states(value)?),
            "cycle" => cycle = Some(states(value)?),
            _ => {}
        }
    }
    match (reward, prefix, cycle) {
        (Some(r), Some(p), Some(c)) => Ok((r, p, c)),
        _ => Err(Failure::from(Error::invalid_lasso(
            "plan file needs reward:, prefix:, and cycle: lines",
        ))),
    }
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let (ts, spec) = load_instance(&args.model, &args.spec, false)?;
    let (claimed, prefix, cycle) = parse_plan_file(&read(&args.plan)?, &ts)?;
    let (reward, verdicts) = trace_reward(&ts, &spec, &prefix, &cycle)?;
    for entry in spec.entries() {
        let i = entry.original_index;
        let status = if verdicts[i] { "satisfied" } else { "violated" };
        println!(
            "formula {i}: reward {:>3}  {status:9}  {}",
            entry.reward, entry.formula
        );
    }
    println!("recomputed-reward: {reward}");
    if reward == claimed {
        println!("check: match");
        Ok(())
    } else {
        println!("check: mismatch");
        Err(Failure::new(
            "mismatch",
            3,
            format!("plan file claims reward {claimed}, recomputed {reward}"),
        ))
    }
}

fn cmd_gen_rescue(args: GenRescueArgs) -> Result<(), Failure> {
    let config = match &args.config {
        Some(path) => RescueConfig::from_toml(&read(path)?)?,
        None => RescueConfig::default_scenario(),
    };
    let (ts, spec) = generate_rescue_mission(&config)?;
    write(&args.model_out, &ts.to_model_text())?;
    write(&args.spec_out, &spec_to_text(&spec))?;
    println!(
        "generated {} states, {} formulas",
        ts.num_states(),
        spec.len()
    );
    Ok(())
}
