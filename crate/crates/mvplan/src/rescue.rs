//! Grid-world rescue-mission scenario generator.
//!
//! Vehicles move on a 4-neighbor grid, one vehicle per step (or everyone
//! holds position). Targets destroy vulnerable vehicles inside their
//! firing range; a vehicle standing on a target it can engage destroys
//! it. Friendlies are picked up by co-located vehicles and delivered at
//! the base. Destruction, engagement, pickup, and delivery are all
//! irreversible, so the joint state space is a DAG of grid layers plus
//! absorbing mission-over loops.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ltl::Formula;
use crate::model::{MissionSpec, TransitionSystem};
use crate::oracle::Letter;
use crate::tableau::DEFAULT_STATE_CAP;

fn default_pickup_reward() -> u64 {
    10
}

fn default_survival_reward() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescueConfig {
    pub width: usize,
    pub height: usize,
    pub base: (usize, usize),
    #[serde(default)]
    pub vehicles: Vec<VehicleConfig>,
    #[serde(default)]
    pub targets: Vec<TargetConfig>,
    #[serde(default)]
    pub friendlies: Vec<FriendlyConfig>,
    #[serde(default = "default_pickup_reward")]
    pub pickup_reward: u64,
    #[serde(default = "default_survival_reward")]
    pub survival_reward: u64,
    #[serde(default)]
    pub max_states: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub start: (usize, usize),
    /// Names of targets this vehicle destroys by entering their cell.
    #[serde(default)]
    pub engages: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub position: (usize, usize),
    /// Cells covered by fire; the target's own cell is not implied.
    #[serde(default)]
    pub range: Vec<(usize, usize)>,
    /// Names of vehicles destroyed inside the range.
    #[serde(default)]
    pub lethal_to: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FriendlyConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub position: (usize, usize),
}

impl RescueConfig {
    pub fn from_toml(text: &str) -> Result<RescueConfig> {
        toml::from_str(text).map_err(|e| Error::config(format!("scenario file: {e}")))
    }

    /// The desk-scale default: a 4x4 grid where a target covers the whole
    /// row between the base and the friendly, so the engaging vehicle
    /// must sacrifice itself to open the corridor for the transport.
    pub fn default_scenario() -> RescueConfig {
        RescueConfig {
            width: 4,
            height: 4,
            base: (0, 0),
            vehicles: vec![
                VehicleConfig {
                    name: Some("V1".into()),
                    start: (0, 0),
                    engages: vec!["T1".into()],
                },
                VehicleConfig {
                    name: Some("V2".into()),
                    start: (0, 0),
                    engages: vec![],
                },
            ],
            targets: vec![TargetConfig {
                name: Some("T1".into()),
                position: (1, 2),
                range: (0..4).map(|x| (x, 2)).collect(),
                lethal_to: vec!["V1".into(), "V2".into()],
            }],
            friendlies: vec![FriendlyConfig {
                name: Some("F1".into()),
                position: (3, 3),
            }],
            pickup_reward: default_pickup_reward(),
            survival_reward: default_survival_reward(),
            max_states: None,
        }
    }
}

/// Friendly status: waiting at its cell, aboard a vehicle, or delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum FStatus {
    Waiting,
    Aboard(usize),
    Delivered,
}

/// One joint state of the mission.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct JointState {
    /// Cell index per vehicle (y * width + x); frozen once destroyed.
    pos: Vec<usize>,
    active: Vec<bool>,
    target_alive: Vec<bool>,
    friendly: Vec<FStatus>,
}

struct Scenario {
    width: usize,
    height: usize,
    base: usize,
    starts: Vec<usize>,
    vehicle_names: Vec<String>,
    friendly_names: Vec<String>,
    /// engages[vehicle] = target indices it can destroy.
    engages: Vec<Vec<usize>>,
    target_cell: Vec<usize>,
    /// lethal[target] = (range cells, vulnerable vehicle indices).
    lethal: Vec<(BTreeSet<usize>, Vec<usize>)>,
    friendly_cell: Vec<usize>,
}

fn unit_names(prefix: &str, names: &[Option<String>]) -> Result<Vec<String>> {
    let out: Vec<String> = names
        .iter()
        .enumerate()
        .map(|(i, n)| n.clone().unwrap_or_else(|| format!("{prefix}{}", i + 1)))
        .collect();
    let mut seen = BTreeSet::new();
    for n in &out {
        if !seen.insert(n) {
            return Err(Error::config(format!("duplicate unit name '{n}'")));
        }
        let mut chars = n.chars();
        let ok = chars
            .next()
            .map(|c| c.is_ascii_alphabetic())
            .unwrap_or(false)
            && chars.all(|c| c.is_ascii_alphanumeric());
        if !ok {
            return Err(Error::config(format!(
                "unit name '{n}' must be alphanumeric"
            )));
        }
    }
    Ok(out)
}

fn build_scenario(config: &RescueConfig) -> Result<Scenario> {
    if config.vehicles.is_empty() {
        return Err(Error::config("at least one vehicle is required"));
    }
    if config.width == 0 || config.height == 0 {
        return Err(Error::config("grid dimensions must be positive"));
    }
    let cell = |(x, y): (usize, usize), what: &str| -> Result<usize> {
        if x >= config.width || y >= config.height {
            return Err(Error::config(format!(
                "{what} at ({x}, {y}) is outside the {}x{} grid",
                config.width, config.height
            )));
        }
        Ok(y * config.width + x)
    };

    let vehicle_names = unit_names("V", &config.vehicles.iter().map(|v| v.name.clone()).collect::<Vec<_>>())?;
    let target_names = unit_names("T", &config.targets.iter().map(|t| t.name.clone()).collect::<Vec<_>>())?;
    let friendly_names = unit_names("F", &config.friendlies.iter().map(|f| f.name.clone()).collect::<Vec<_>>())?;

    let base = cell(config.base, "base")?;
    let starts = config
        .vehicles
        .iter()
        .zip(&vehicle_names)
        .map(|(v, n)| cell(v.start, &format!("vehicle {n}")))
        .collect::<Result<Vec<_>>>()?;
    let target_cell = config
        .targets
        .iter()
        .zip(&target_names)
        .map(|(t, n)| cell(t.position, &format!("target {n}")))
        .collect::<Result<Vec<_>>>()?;
    let friendly_cell = config
        .friendlies
        .iter()
        .zip(&friendly_names)
        .map(|(f, n)| cell(f.position, &format!("friendly {n}")))
        .collect::<Result<Vec<_>>>()?;

    let lookup = |names: &[String], n: &str, kind: &str| -> Result<usize> {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::config(format!("unknown {kind} '{n}'")))
    };
    let engages = config
        .vehicles
        .iter()
        .map(|v| {
            v.engages
                .iter()
                .map(|n| lookup(&target_names, n, "target"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let lethal = config
        .targets
        .iter()
        .zip(&target_names)
        .map(|(t, n)| {
            let range = t
                .range
                .iter()
                .map(|&c| cell(c, &format!("range of target {n}")))
                .collect::<Result<BTreeSet<_>>>()?;
            let vulnerable = t
                .lethal_to
                .iter()
                .map(|v| lookup(&vehicle_names, v, "vehicle"))
                .collect::<Result<Vec<_>>>()?;
            Ok((range, vulnerable))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Scenario {
        width: config.width,
        height: config.height,
        base,
        starts,
        vehicle_names,
        friendly_names,
        engages,
        target_cell,
        lethal,
        friendly_cell,
    })
}

impl Scenario {
    /// Apply one round of irreversible effects: engagement and
    /// vulnerability resolve simultaneously against the targets alive at
    /// entry to the round, then pickup and delivery.
    fn resolve(&self, mut s: JointState) -> JointState {
        let alive_before = s.target_alive.clone();
        for (v, targets) in self.engages.iter().enumerate() {
            if !s.active[v] {
                continue;
            }
            for &t in targets {
                if alive_before[t] && s.pos[v] == self.target_cell[t] {
                    s.target_alive[t] = false;
                }
            }
        }
        for (t, (range, vulnerable)) in self.lethal.iter().enumerate() {
            if !alive_before[t] {
                continue;
            }
            for &v in vulnerable {
                if s.active[v] && range.contains(&s.pos[v]) {
                    s.active[v] = false;
                }
            }
        }
        for (f, status) in s.friendly.iter_mut().enumerate() {
            match *status {
                FStatus::Waiting => {
                    // Lowest-index co-located active vehicle picks up.
                    if let Some(v) = (0..s.pos.len())
                        .find(|&v| s.active[v] && s.pos[v] == self.friendly_cell[f])
                    {
                        *status = FStatus::Aboard(v);
                    }
                }
                FStatus::Aboard(v) => {
                    if s.active[v] && s.pos[v] == self.base {
                        *status = FStatus::Delivered;
                    }
                }
                FStatus::Delivered => {}
            }
        }
        s
    }

    fn neighbors(&self, cell: usize) -> Vec<usize> {
        let (x, y) = (cell % self.width, cell / self.width);
        let mut out = Vec::new();
        if x > 0 {
            out.push(cell - 1);
        }
        if x + 1 < self.width {
            out.push(cell + 1);
        }
        if y > 0 {
            out.push(cell - self.width);
        }
        if y + 1 < self.height {
            out.push(cell + self.width);
        }
        out
    }

    fn label(&self, s: &JointState) -> Letter {
        let mut letter = Letter::new();
        for (v, name) in self.vehicle_names.iter().enumerate() {
            if s.active[v] && s.pos[v] == self.base {
                letter.insert(format!("p_{name}_Base"));
            }
            if !s.active[v] {
                letter.insert(format!("a_{name}"));
            }
            for (f, fname) in self.friendly_names.iter().enumerate() {
                if s.friendly[f] == FStatus::Aboard(v) {
                    letter.insert(format!("p_{name}_{fname}"));
                }
            }
        }
        letter
    }

    fn propositions(&self) -> Vec<String> {
        let mut ap = Vec::new();
        for name in &self.vehicle_names {
            ap.push(format!("p_{name}_Base"));
            for fname in &self.friendly_names {
                ap.push(format!("p_{name}_{fname}"));
            }
            ap.push(format!("a_{name}"));
        }
        ap
    }
}

/// Generate the joint transition system and the mission specification for
/// a rescue scenario.
///
/// The specification contains one pickup-and-deliver formula per friendly
/// (any vehicle may carry it) and one survive-and-return formula per
/// vehicle, in that order.
pub fn generate_rescue_mission(config: &RescueConfig) -> Result<(TransitionSystem, MissionSpec)> {
    let sc = build_scenario(config)?;
    let cap = config.max_states.unwrap_or(DEFAULT_STATE_CAP);

    let init = sc.resolve(JointState {
        pos: sc.starts.clone(),
        active: vec![true; sc.starts.len()],
        target_alive: vec![true; sc.target_cell.len()],
        friendly: vec![FStatus::Waiting; sc.friendly_cell.len()],
    });
    let mut index: HashMap<JointState, usize> = HashMap::new();
    let mut states = vec![init.clone()];
    index.insert(init, 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(cur) = queue.pop_front() {
        let state = states[cur].clone();
        // Either everyone holds position, or exactly one active vehicle
        // moves to a neighboring cell; effects resolve afterwards.
        let mut nexts = vec![sc.resolve(state.clone())];
        for v in 0..state.pos.len() {
            if !state.active[v] {
                continue;
            }
            for n in sc.neighbors(state.pos[v]) {
                let mut moved = state.clone();
                moved.pos[v] = n;
                nexts.push(sc.resolve(moved));
            }
        }
        let mut out = Vec::new();
        for next in nexts {
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= cap {
                        return Err(Error::StateCap { actual: id + 1, cap });
                    }
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            out.push(id);
        }
        out.sort_unstable();
        out.dedup();
        succ.push(out);
    }

    let labels: Vec<Letter> = states.iter().map(|s| sc.label(s)).collect();
    let ts = TransitionSystem {
        states: (0..states.len()).map(|i| format!("q{i}")).collect(),
        init: 0,
        succ,
        ap: sc.propositions(),
        labels,
    };
    ts.validate()?;

    let mut formulas: Vec<(Formula, u64)> = Vec::new();
    for fname in &sc.friendly_names {
        // F (p_Vk_Fj & F p_Vk_Base), disjoined over vehicles.
        let pickup = sc
            .vehicle_names
            .iter()
            .map(|name| {
                Formula::eventually(Formula::and(
                    Formula::atom(&format!("p_{name}_{fname}")),
                    Formula::eventually(Formula::atom(&format!("p_{name}_Base"))),
                ))
            })
            .reduce(Formula::or)
            .expect("at least one vehicle");
        formulas.push((pickup, config.pickup_reward));
    }
    for name in &sc.vehicle_names {
        let survive = Formula::and(
            Formula::always(Formula::not(Formula::atom(&format!("a_{name}")))),
            Formula::eventually(Formula::atom(&format!("p_{name}_Base"))),
        );
        formulas.push((survive, config.survival_reward));
    }
    let spec = MissionSpec::new(formulas)?;
    Ok((ts, spec))
}
