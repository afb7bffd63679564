//! Labeled transition systems and prioritized mission specifications,
//! with their line-oriented file formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::ltl::{parse_formula, Formula};
use crate::oracle::{ltl_eval_lasso, LassoWord, Letter};

/// A finite labeled transition system. Every state has at least one
/// outgoing transition so all traces are infinite.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    /// State names, indexed by state id.
    pub states: Vec<String>,
    pub init: usize,
    /// Successor lists, sorted ascending.
    pub succ: Vec<Vec<usize>>,
    /// Declared atomic propositions.
    pub ap: Vec<String>,
    /// Per-state label: subset of `ap`.
    pub labels: Vec<Letter>,
}

impl TransitionSystem {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn has_transition(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.init >= n {
            return Err(Error::validation("initial state out of range"));
        }
        if self.succ.len() != n || self.labels.len() != n {
            return Err(Error::validation("inconsistent state table sizes"));
        }
        let ap: BTreeSet<&String> = self.ap.iter().collect();
        for (i, label) in self.labels.iter().enumerate() {
            for p in label {
                if !ap.contains(p) {
                    return Err(Error::validation(format!(
                        "state '{}' labeled with undeclared proposition '{}'",
                        self.states[i], p
                    )));
                }
            }
        }
        for (i, succ) in self.succ.iter().enumerate() {
            if succ.is_empty() {
                return Err(Error::validation(format!(
                    "state '{}' has no outgoing transition",
                    self.states[i]
                )));
            }
            for &t in succ {
                if t >= n {
                    return Err(Error::validation("transition endpoint out of range"));
                }
            }
        }
        Ok(())
    }

    /// The word produced by a lasso trace fragment, after validating it:
    /// it must start at the initial state, follow transitions, and close
    /// the cycle.
    pub fn lasso_word(&self, prefix: &[usize], cycle: &[usize]) -> Result<LassoWord> {
        if cycle.is_empty() {
            return Err(Error::invalid_lasso("cycle must be non-empty"));
        }
        let full: Vec<usize> = prefix.iter().chain(cycle.iter()).copied().collect();
        if full[0] != self.init {
            return Err(Error::invalid_lasso(format!(
                "lasso starts at '{}', not the initial state '{}'",
                self.states[full[0]], self.states[self.init]
            )));
        }
        for pair in full.windows(2) {
            if !self.has_transition(pair[0], pair[1]) {
                return Err(Error::invalid_lasso(format!(
                    "no transition from '{}' to '{}'",
                    self.states[pair[0]], self.states[pair[1]]
                )));
            }
        }
        let last = *cycle.last().unwrap();
        if !self.has_transition(last, cycle[0]) {
            return Err(Error::invalid_lasso(format!(
                "cycle does not close: no transition from '{}' back to '{}'",
                self.states[last], self.states[cycle[0]]
            )));
        }
        LassoWord::new(
            prefix.iter().map(|&s| self.labels[s].clone()).collect(),
            cycle.iter().map(|&s| self.labels[s].clone()).collect(),
        )
    }

    /// Canonical serialization, re-parsable by [`parse_model`].
    pub fn to_model_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "ap: {}", self.ap.join(" ")).unwrap();
        writeln!(out, "states: {}", self.states.join(" ")).unwrap();
        writeln!(out, "init: {}", self.states[self.init]).unwrap();
        for (i, label) in self.labels.iter().enumerate() {
            if !label.is_empty() {
                let props: Vec<&str> = label.iter().map(|s| s.as_str()).collect();
                writeln!(out, "label {}: {}", self.states[i], props.join(" ")).unwrap();
            }
        }
        for (i, succ) in self.succ.iter().enumerate() {
            for &t in succ {
                writeln!(out, "trans {} -> {}", self.states[i], self.states[t]).unwrap();
            }
        }
        out
    }
}

/// One prioritized formula with its reward and position in the input file.
#[derive(Debug, Clone)]
pub struct SpecEntry {
    pub formula: Formula,
    pub reward: u64,
    /// Index in the original spec file, for reporting.
    pub original_index: usize,
}

/// A prioritized set of formulas, reordered so rewards are non-increasing.
#[derive(Debug, Clone)]
pub struct MissionSpec {
    entries: Vec<SpecEntry>,
    total_reward: u64,
}

impl MissionSpec {
    pub fn new(formulas: Vec<(Formula, u64)>) -> Result<MissionSpec> {
        let mut entries: Vec<SpecEntry> = formulas
            .into_iter()
            .enumerate()
            .map(|(i, (formula, reward))| SpecEntry {
                formula,
                reward,
                original_index: i,
            })
            .collect();
        entries.sort_by(|a, b| {
            b.reward
                .cmp(&a.reward)
                .then(a.original_index.cmp(&b.original_index))
        });
        let mut total: u64 = 0;
        for e in &entries {
            total = total
                .checked_add(e.reward)
                .ok_or_else(|| Error::validation("total reward overflows 64 bits"))?;
        }
        Ok(MissionSpec {
            entries,
            total_reward: total,
        })
    }

    /// Replace rewards with `2^(n-i)` in the original order, so formula
    /// priorities become a lexicographic ordering.
    pub fn lexicographic(formulas: Vec<Formula>) -> Result<MissionSpec> {
        let n = formulas.len();
        if n >= 63 {
            return Err(Error::validation(
                "lexicographic rewards overflow 64 bits for 63 or more formulas",
            ));
        }
        MissionSpec::new(
            formulas
                .into_iter()
                .enumerate()
                .map(|(i, f)| (f, 1u64 << (n - 1 - i)))
                .collect(),
        )
    }

    /// Entries in non-increasing reward order.
    pub fn entries(&self) -> &[SpecEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_reward(&self) -> u64 {
        self.total_reward
    }

    /// Rewards in the internal (sorted) order.
    pub fn rewards(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.reward).collect()
    }
}

/// Evaluate each formula on a validated lasso of the transition system.
/// Returns the summed reward and per-formula verdicts in original order.
pub fn trace_reward(
    ts: &TransitionSystem,
    spec: &MissionSpec,
    prefix: &[usize],
    cycle: &[usize],
) -> Result<(u64, Vec<bool>)> {
    let word = ts.lasso_word(prefix, cycle)?;
    let mut verdicts = vec![false; spec.len()];
    let mut reward = 0u64;
    for entry in spec.entries() {
        let sat = ltl_eval_lasso(&entry.formula, &word);
        verdicts[entry.original_index] = sat;
        if sat {
            reward += entry.reward;
        }
    }
    Ok((reward, verdicts))
}

/// Parse the line-oriented model format.
///
/// ```text
/// ap: p q
/// states: s0 s1
/// init: s0
/// label s0: p
/// trans s0 -> s1
/// trans s1 -> s0
/// ```
pub fn parse_model(text: &str) -> Result<TransitionSystem> {
    let mut ap: Option<Vec<String>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<String> = None;
    let mut labels: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut trans: Vec<(String, String, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse(ParseError::at(lineno, 1, msg));
        if let Some(rest) = line.strip_prefix("ap:") {
            if ap.is_some() {
                return Err(err("duplicate 'ap:' declaration".into()));
            }
            ap = Some(split_idents(rest, lineno)?);
        } else if let Some(rest) = line.strip_prefix("states:") {
            if states.is_some() {
                return Err(err("duplicate 'states:' declaration".into()));
            }
            states = Some(split_idents(rest, lineno)?);
        } else if let Some(rest) = line.strip_prefix("init:") {
            if init.is_some() {
                return Err(err("duplicate 'init:' declaration".into()));
            }
            let names = split_idents(rest, lineno)?;
            if names.len() != 1 {
                return Err(err("'init:' expects exactly one state".into()));
            }
            init = Some(names.into_iter().next().unwrap());
        } else if let Some(rest) = line.strip_prefix("label ") {
            let (state, props) = rest
                .split_once(':')
                .ok_or_else(|| err("expected 'label <state>: <props...>'".into()))?;
            let state = state.trim().to_string();
            if labels.contains_key(&state) {
                return Err(err(format!("duplicate label for state '{state}'")));
            }
            labels.insert(state, split_idents(props, lineno)?);
        } else if let Some(rest) = line.strip_prefix("trans ") {
            let (from, to) = rest
                .split_once("->")
                .ok_or_else(|| err("expected 'trans <state> -> <state>'".into()))?;
            trans.push((from.trim().to_string(), to.trim().to_string(), lineno));
        } else {
            return Err(err(format!("unrecognized line: '{line}'")));
        }
    }

    let ap = ap.ok_or_else(|| Error::validation("missing 'ap:' declaration"))?;
    let states = states.ok_or_else(|| Error::validation("missing 'states:' declaration"))?;
    let init_name = init.ok_or_else(|| Error::validation("missing 'init:' declaration"))?;

    let mut seen = BTreeSet::new();
    for s in &states {
        if !seen.insert(s.clone()) {
            return Err(Error::validation(format!("duplicate state '{s}'")));
        }
    }
    let mut seen_ap = BTreeSet::new();
    for p in &ap {
        if !seen_ap.insert(p.clone()) {
            return Err(Error::validation(format!("duplicate proposition '{p}'")));
        }
    }

    let index: BTreeMap<&String, usize> =
        states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let init_idx = *index
        .get(&init_name)
        .ok_or_else(|| Error::validation(format!("unknown initial state '{init_name}'")))?;

    let mut label_vec: Vec<Letter> = vec![Letter::new(); states.len()];
    for (state, props) in labels {
        let idx = *index
            .get(&state)
            .ok_or_else(|| Error::validation(format!("label for unknown state '{state}'")))?;
        for p in props {
            if !seen_ap.contains(&p) {
                return Err(Error::validation(format!(
                    "state '{state}' labeled with undeclared proposition '{p}'"
                )));
            }
            label_vec[idx].insert(p);
        }
    }

    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (from, to, lineno) in trans {
        let f = *index.get(&from).ok_or_else(|| {
            Error::Parse(ParseError::at(
                lineno,
                1,
                format!("transition from unknown state '{from}'"),
            ))
        })?;
        let t = *index.get(&to).ok_or_else(|| {
            Error::Parse(ParseError::at(
                lineno,
                1,
                format!("transition to unknown state '{to}'"),
            ))
        })?;
        succ[f].push(t);
    }
    for list in &mut succ {
        list.sort_unstable();
        list.dedup();
    }

    let ts = TransitionSystem {
        states,
        init: init_idx,
        succ,
        ap,
        labels: label_vec,
    };
    ts.validate()?;
    Ok(ts)
}

/// Parse the spec format: one `reward <nonneg int> : <LTL formula>` per line.
///
/// Zero rewards are legal; the returned warnings mention them.
pub fn parse_spec(text: &str) -> Result<(MissionSpec, Vec<String>)> {
    let mut formulas = Vec::new();
    let mut warnings = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse(ParseError::at(lineno, 1, msg));
        let rest = line
            .strip_prefix("reward")
            .ok_or_else(|| err("expected 'reward <int> : <formula>'".into()))?;
        let (num, formula_text) = rest
            .split_once(':')
            .ok_or_else(|| err("expected ':' after reward value".into()))?;
        let reward: u64 = num
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid reward '{}'", num.trim())))?;
        if reward == 0 {
            warnings.push(format!(
                "line {lineno}: formula has reward 0 and will not influence the objective"
            ));
        }
        let formula = parse_formula(formula_text).map_err(|e| {
            Error::Parse(ParseError::at(
                lineno,
                e.col,
                format!("in formula: {}", e.message),
            ))
        })?;
        formulas.push((formula, reward));
    }
    Ok((MissionSpec::new(formulas)?, warnings))
}

/// Serialize a spec in its file format, in original order.
pub fn spec_to_text(spec: &MissionSpec) -> String {
    let mut entries: Vec<&SpecEntry> = spec.entries().iter().collect();
    entries.sort_by_key(|e| e.original_index);
    let mut out = String::new();
    for e in entries {
        writeln!(out, "reward {} : {}", e.reward, e.formula).unwrap();
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_idents(text: &str, lineno: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut chars = word.chars();
        let ok = chars
            .next()
            .map(|c| c.is_ascii_alphabetic() || c == '_')
            .unwrap_or(false)
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::Parse(ParseError::at(
                lineno,
                1,
                format!("invalid identifier '{word}'"),
            )));
        }
        out.push(word.to_string());
    }
    Ok(out)
}
