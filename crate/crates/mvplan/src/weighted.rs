//! The layered weighted Büchi automaton over a list of specification GBAs,
//! its product with a transition system, and fragment/reward machinery.
//!
//! States of the weighted automaton carry a component tag `(j, l)`: layer
//! `j` tracks the j-th formula, component `l` its l-th acceptance set, and
//! `(0, 0)` is the accepting hub. Traversing layer `j` within one fragment
//! certifies progress on formula `j` and earns its reward on layer entry.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automaton::{blocking_cubes, Gba, Guard};
use crate::error::{Error, Result};
use crate::model::TransitionSystem;

/// Component tag `(layer, component)`; `(0, 0)` is the accepting hub.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentTag {
    pub layer: usize,
    pub component: usize,
}

impl ComponentTag {
    pub const HUB: ComponentTag = ComponentTag {
        layer: 0,
        component: 0,
    };

    pub fn is_hub(&self) -> bool {
        self.layer == 0
    }
}

impl std::fmt::Display for ComponentTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.layer, self.component)
    }
}

/// A state of the weighted automaton: one state per input GBA plus a tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WbaState {
    pub parts: Vec<usize>,
    pub tag: ComponentTag,
}

/// The layered weighted Büchi automaton. Only states reachable from the
/// initial one are materialized, in BFS order.
#[derive(Debug, Clone)]
pub struct Wba {
    pub states: Vec<WbaState>,
    pub init: usize,
    /// Outgoing transitions per state: (guard, target, weight).
    pub transitions: Vec<Vec<(Guard, usize, u64)>>,
    /// Number of acceptance sets per layer (`m_j`, index `j - 1`).
    pub layer_sizes: Vec<usize>,
    /// Formula rewards in non-increasing order, one per layer.
    pub rewards: Vec<u64>,
    pub atoms: BTreeSet<String>,
}

impl Wba {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.states[state].tag.is_hub()
    }

    /// Flattened component index, following the topological order
    /// `(0,0) < (1,1) < ... < (1,m_1) < (2,1) < ... < (n,m_n)`.
    pub fn component_index(&self, tag: ComponentTag) -> usize {
        if tag.is_hub() {
            return 0;
        }
        let before: usize = self.layer_sizes[..tag.layer - 1].iter().sum();
        before + tag.component
    }

    pub fn num_components(&self) -> usize {
        1 + self.layer_sizes.iter().sum::<usize>()
    }
}

/// Weight of a transition, determined by the source and target tags.
fn transition_weight(source: ComponentTag, target: ComponentTag, rewards: &[u64]) -> u64 {
    if target.component == 1 && (source.is_hub() || source.layer != target.layer) {
        rewards[target.layer - 1]
    } else {
        0
    }
}

/// Build the layered weighted Büchi automaton for non-blocking GBAs with
/// non-increasing rewards.
///
/// Layer jumps are strict (`j' > j`): re-entering a layer within one
/// fragment would double-count its reward.
pub fn build_weighted_ba(gbas: &[Gba], rewards: &[u64], cap: usize) -> Result<Wba> {
    if gbas.len() != rewards.len() {
        return Err(Error::validation(
            "one reward per specification automaton required",
        ));
    }
    if rewards.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::validation("rewards must be non-increasing"));
    }
    for (i, g) in gbas.iter().enumerate() {
        g.validate()?;
        if !blocking_cubes(g).is_empty() {
            return Err(Error::validation(format!(
                "specification automaton {i} is blocking; complete it first"
            )));
        }
    }
    let n = gbas.len();
    // Normalized acceptance families: an empty family means all-accepting.
    let acceptance: Vec<Vec<BTreeSet<usize>>> = gbas
        .iter()
        .map(|g| {
            if g.acceptance.is_empty() {
                vec![(0..g.num_states).collect()]
            } else {
                g.acceptance.clone()
            }
        })
        .collect();
    let layer_sizes: Vec<usize> = acceptance.iter().map(|a| a.len()).collect();
    let outgoing: Vec<Vec<Vec<(Guard, usize)>>> = gbas.iter().map(|g| g.outgoing()).collect();
    let atoms: BTreeSet<String> = gbas.iter().flat_map(|g| g.atoms.iter().cloned()).collect();

    let init_state = WbaState {
        parts: gbas.iter().map(|g| g.init).collect(),
        tag: ComponentTag::HUB,
    };
    let mut index: HashMap<WbaState, usize> = HashMap::new();
    let mut states = vec![init_state.clone()];
    index.insert(init_state, 0);
    let mut transitions: Vec<Vec<(Guard, usize, u64)>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);

    while let Some(cur) = queue.pop_front() {
        let WbaState { parts, tag } = states[cur].clone();

        // Allowed target tags from this state, with their weights.
        let mut tag_targets: Vec<ComponentTag> = Vec::new();
        if tag.is_hub() {
            tag_targets.push(ComponentTag::HUB);
            for j in 1..=n {
                tag_targets.push(ComponentTag {
                    layer: j,
                    component: 1,
                });
            }
        } else {
            let (j, l) = (tag.layer, tag.component);
            let in_set = acceptance[j - 1][l - 1].contains(&parts[j - 1]);
            if !in_set {
                tag_targets.push(tag);
            } else if l < layer_sizes[j - 1] {
                tag_targets.push(ComponentTag {
                    layer: j,
                    component: l + 1,
                });
            } else {
                for j2 in (j + 1)..=n {
                    tag_targets.push(ComponentTag {
                        layer: j2,
                        component: 1,
                    });
                }
                tag_targets.push(ComponentTag::HUB);
            }
        }

        // Synchronous moves of all coordinates: combine per-coordinate
        // guards, dropping contradictory combinations.
        let mut combos: Vec<(Guard, Vec<usize>)> = vec![(Guard::top(), Vec::new())];
        for (i, q) in parts.iter().enumerate() {
            let mut next_combos = Vec::new();
            for (guard, targets) in &combos {
                for (g, t) in &outgoing[i][*q] {
                    if let Some(merged) = guard.conj(g) {
                        let mut ts = targets.clone();
                        ts.push(*t);
                        next_combos.push((merged, ts));
                    }
                }
            }
            combos = next_combos;
        }

        let mut out: Vec<(Guard, usize, u64)> = Vec::new();
        for (guard, targets) in combos {
            for &t in &tag_targets {
                let weight = transition_weight(tag, t, rewards);
                let state = WbaState {
                    parts: targets.clone(),
                    tag: t,
                };
                let id = match index.get(&state) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        if id >= cap {
                            return Err(Error::StateCap { actual: id + 1, cap });
                        }
                        index.insert(state.clone(), id);
                        states.push(state);
                        transitions.push(Vec::new());
                        queue.push_back(id);
                        id
                    }
                };
                out.push((guard.clone(), id, weight));
            }
        }
        out.sort();
        out.dedup();
        transitions[cur] = out;
    }

    Ok(Wba {
        states,
        init: 0,
        transitions,
        layer_sizes,
        rewards: rewards.to_vec(),
        atoms,
    })
}

/// The weighted product of a transition system and a weighted Büchi
/// automaton; reachable states only, BFS-numbered.
#[derive(Debug, Clone)]
pub struct Product {
    /// (transition-system state, automaton state) per product state.
    pub states: Vec<(usize, usize)>,
    pub init: usize,
    /// Outgoing edges per state, sorted by target: (target, weight).
    pub succ: Vec<Vec<(usize, u64)>>,
    pub accepting: Vec<bool>,
    /// Flattened component index per state.
    pub comp: Vec<usize>,
    pub num_components: usize,
}

impl Product {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Projection onto the transition system.
    pub fn alpha(&self, state: usize) -> usize {
        self.states[state].0
    }

    /// Weight of the edge `from -> to`, if present.
    pub fn edge_weight(&self, from: usize, to: usize) -> Option<u64> {
        self.succ[from]
            .binary_search_by_key(&to, |&(t, _)| t)
            .ok()
            .map(|i| self.succ[from][i].1)
    }
}

/// Build the weighted product. The automaton guard is matched against the
/// label of the *source* transition-system state.
pub fn build_product(ts: &TransitionSystem, wba: &Wba, cap: usize) -> Result<Product> {
    let ap: BTreeSet<&String> = ts.ap.iter().collect();
    for atom in &wba.atoms {
        if !ap.contains(atom) {
            return Err(Error::validation(format!(
                "automaton proposition '{atom}' is not declared in the model"
            )));
        }
    }
    // Matching automaton moves per (automaton state, TS state), memoized on
    // the label set identity.
    let mut label_ids: HashMap<&BTreeSet<String>, usize> = HashMap::new();
    let mut ts_label_id = Vec::with_capacity(ts.num_states());
    for label in &ts.labels {
        let next = label_ids.len();
        let id = *label_ids.entry(label).or_insert(next);
        ts_label_id.push(id);
    }
    let mut matched: HashMap<(usize, usize), Vec<(usize, u64)>> = HashMap::new();

    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let init = (ts.init, wba.init);
    let mut states = vec![init];
    index.insert(init, 0);
    let mut succ: Vec<Vec<(usize, u64)>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);

    while let Some(cur) = queue.pop_front() {
        let (s, q) = states[cur];
        let moves = matched
            .entry((q, ts_label_id[s]))
            .or_insert_with(|| {
                wba.transitions[q]
                    .iter()
                    .filter(|(g, _, _)| g.matches(&ts.labels[s]))
                    .map(|(_, t, w)| (*t, *w))
                    .collect()
            })
            .clone();
        let mut out = Vec::new();
        for &s2 in &ts.succ[s] {
            for &(q2, w) in &moves {
                let key = (s2, q2);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        if id >= cap {
                            return Err(Error::StateCap { actual: id + 1, cap });
                        }
                        index.insert(key, id);
                        states.push(key);
                        succ.push(Vec::new());
                        queue.push_back(id);
                        id
                    }
                };
                out.push((id, w));
            }
        }
        out.sort_unstable();
        out.dedup();
        succ[cur] = out;
    }

    let accepting = states.iter().map(|&(_, q)| wba.is_accepting(q)).collect();
    let comp = states
        .iter()
        .map(|&(_, q)| wba.component_index(wba.states[q].tag))
        .collect();
    Ok(Product {
        states,
        init: 0,
        succ,
        accepting,
        comp,
        num_components: wba.num_components(),
    })
}

/// A fragment of a run: indices of its accepting endpoints within the run
/// and the summed weight of its transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub start: usize,
    pub end: usize,
    pub weight: u64,
}

/// Fragments of a finite run: maximal segments that start and end in
/// accepting states with no accepting state strictly inside.
pub fn fragments_of_run(product: &Product, run: &[usize]) -> Result<Vec<Fragment>> {
    validate_run(product, run)?;
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut weight = 0u64;
    for (i, &p) in run.iter().enumerate() {
        if product.accepting[p] {
            if let Some(s) = start {
                if s < i {
                    out.push(Fragment {
                        start: s,
                        end: i,
                        weight,
                    });
                }
            }
            start = Some(i);
            weight = 0;
        }
        if i + 1 < run.len() && start.is_some() {
            weight += product
                .edge_weight(run[i], run[i + 1])
                .expect("validated run");
        }
    }
    Ok(out)
}

/// Fragment weights of a lasso cycle rooted at an accepting state. The
/// root closes the last fragment and opens the first.
pub fn cycle_fragment_weights(product: &Product, cycle: &[usize]) -> Result<Vec<u64>> {
    if cycle.is_empty() {
        return Err(Error::invalid_lasso("empty cycle"));
    }
    if !product.accepting[cycle[0]] {
        return Err(Error::invalid_lasso(
            "cycle must be rooted at an accepting state",
        ));
    }
    let mut unrolled: Vec<usize> = cycle.to_vec();
    unrolled.push(cycle[0]);
    let frags = fragments_of_run(product, &unrolled)?;
    Ok(frags.into_iter().map(|f| f.weight).collect())
}

/// Run reward of an accepting lasso: the maximal fragment weight occurring
/// infinitely often, i.e. the maximum over the cycle's fragments.
pub fn run_reward(product: &Product, cycle: &[usize]) -> Result<u64> {
    let weights = cycle_fragment_weights(product, cycle)?;
    Ok(weights.into_iter().max().unwrap_or(0))
}

fn validate_run(product: &Product, run: &[usize]) -> Result<()> {
    for pair in run.windows(2) {
        if product.edge_weight(pair[0], pair[1]).is_none() {
            return Err(Error::invalid_lasso(format!(
                "no product transition from state {} to {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::make_nonblocking;
    use crate::ltl::parse_formula;
    use crate::model::parse_model;
    use crate::tableau::ltl_to_gba;

    const CAP: usize = 1_000_000;

    fn nonblocking_gba(text: &str) -> Gba {
        make_nonblocking(&ltl_to_gba(&parse_formula(text).unwrap()).unwrap())
    }

    #[test]
    fn state_space_is_parts_times_components() {
        let g = nonblocking_gba("F p");
        let wba = build_weighted_ba(std::slice::from_ref(&g), &[5], CAP).unwrap();
        // n = 1, m_1 = 1: reachable states fit in |Q_1| * (1 + m_1).
        assert!(wba.num_states() <= g.num_states * 2);
        assert_eq!(wba.num_components(), 2);
    }

    #[test]
    fn rewards_must_be_sorted() {
        let g1 = nonblocking_gba("F p");
        let g2 = nonblocking_gba("G p");
        let err = build_weighted_ba(&[g1, g2], &[2, 3], CAP).unwrap_err();
        assert!(err.to_string().contains("non-increasing"));
    }

    #[test]
    fn blocking_input_rejected() {
        let g = ltl_to_gba(&parse_formula("p").unwrap()).unwrap();
        let err = build_weighted_ba(std::slice::from_ref(&g), &[1], CAP).unwrap_err();
        assert!(err.to_string().contains("blocking"));
    }

    #[test]
    fn two_layer_fragment_accumulates_both_rewards() {
        // Weight along (0,0) -> layer 1 -> layer 2 -> (0,0) is 3 + 2.
        let g1 = nonblocking_gba("true");
        let g2 = nonblocking_gba("true");
        let wba = build_weighted_ba(&[g1, g2], &[3, 2], CAP).unwrap();
        // Find such a fragment: leave the initial hub state once, climb the
        // layer DAG, and record the weight on returning to any hub state.
        let mut best = vec![None; wba.num_states()];
        best[wba.init] = Some(0u64);
        let mut hub_best: Option<u64> = None;
        // Relax a few rounds; the automaton is tiny.
        for _ in 0..wba.num_states() {
            for s in 0..wba.num_states() {
                let Some(d) = best[s] else { continue };
                if wba.states[s].tag.is_hub() && s != wba.init {
                    continue;
                }
                for &(_, t, w) in &wba.transitions[s] {
                    if wba.states[t].tag.is_hub() {
                        if !wba.states[s].tag.is_hub() {
                            hub_best = hub_best.max(Some(d + w));
                        }
                    } else if wba.states[t].tag.layer > wba.states[s].tag.layer
                        && best[t].map(|b| b < d + w).unwrap_or(true)
                    {
                        best[t] = Some(d + w);
                    }
                }
            }
        }
        assert_eq!(hub_best, Some(5));
    }

    #[test]
    fn hub_self_loops_have_zero_weight() {
        let g = nonblocking_gba("G F p");
        let wba = build_weighted_ba(std::slice::from_ref(&g), &[7], CAP).unwrap();
        for s in 0..wba.num_states() {
            for &(_, t, w) in &wba.transitions[s] {
                let entering_layer_first = wba.states[t].tag.component == 1
                    && !wba.states[t].tag.is_hub()
                    && wba.states[s].tag.layer != wba.states[t].tag.layer;
                if entering_layer_first {
                    assert_eq!(w, 7);
                } else {
                    assert_eq!(w, 0, "non-entry transition must be weightless");
                }
            }
        }
    }

    #[test]
    fn layer_jumps_are_strictly_increasing() {
        let g1 = nonblocking_gba("G F p");
        let g2 = nonblocking_gba("G F q");
        let wba = build_weighted_ba(&[g1, g2], &[3, 2], CAP).unwrap();
        for s in 0..wba.num_states() {
            let from = wba.states[s].tag;
            for &(_, t, _) in &wba.transitions[s] {
                let to = wba.states[t].tag;
                if !from.is_hub() && !to.is_hub() && from.layer != to.layer {
                    assert!(to.layer > from.layer);
                    assert_eq!(to.component, 1);
                }
            }
        }
    }

    #[test]
    fn trivial_product_is_one_accepting_self_loop() {
        let ts = parse_model("ap: p\nstates: s0\ninit: s0\ntrans s0 -> s0\n").unwrap();
        let g = nonblocking_gba("true");
        let wba = build_weighted_ba(std::slice::from_ref(&g), &[1], CAP).unwrap();
        let product = build_product(&ts, &wba, CAP).unwrap();
        // Hub-only behavior exists: some reachable accepting state carries
        // a zero-weight self-loop.
        assert!(product.accepting[product.init]);
        assert!((0..product.num_states())
            .any(|p| product.accepting[p] && product.edge_weight(p, p) == Some(0)));
        assert!(product.num_states() <= ts.num_states() * wba.num_states());
    }

    #[test]
    fn product_respects_cartesian_bound() {
        let ts = parse_model(
            "ap: p\nstates: s0 s1\ninit: s0\nlabel s0: p\ntrans s0 -> s1\ntrans s1 -> s0\n",
        )
        .unwrap();
        let g = nonblocking_gba("G F p");
        let wba = build_weighted_ba(std::slice::from_ref(&g), &[1], CAP).unwrap();
        let product = build_product(&ts, &wba, CAP).unwrap();
        assert!(product.num_states() <= ts.num_states() * wba.num_states());
        for (i, &(s, _)) in product.states.iter().enumerate() {
            assert_eq!(product.alpha(i), s);
        }
    }

    #[test]
    fn unknown_proposition_rejected_in_product() {
        let ts = parse_model("ap: q\nstates: s0\ninit: s0\ntrans s0 -> s0\n").unwrap();
        let g = nonblocking_gba("F p");
        let wba = build_weighted_ba(std::slice::from_ref(&g), &[1], CAP).unwrap();
        assert!(build_product(&ts, &wba, CAP).is_err());
    }

    fn chain_product() -> Product {
        // Hand-built product: accepting states 0 and 3; weights on 0->1.
        Product {
            states: vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5)],
            init: 0,
            succ: vec![
                vec![(1, 7)],
                vec![(2, 0)],
                vec![(3, 0)],
                vec![(4, 0)],
                vec![(5, 0)],
                vec![(0, 0)],
            ],
            accepting: vec![true, false, false, true, false, true],
            comp: vec![0, 1, 1, 0, 0, 0],
            num_components: 2,
        }
    }

    #[test]
    fn fragments_split_at_accepting_states() {
        let p = chain_product();
        let frags = fragments_of_run(&p, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(
            frags,
            vec![
                Fragment {
                    start: 0,
                    end: 3,
                    weight: 7
                },
                Fragment {
                    start: 3,
                    end: 5,
                    weight: 0
                },
            ]
        );
    }

    #[test]
    fn cycle_fragments_wrap_through_root() {
        let p = chain_product();
        let weights = cycle_fragment_weights(&p, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(weights, vec![7, 0, 0]);
        assert_eq!(run_reward(&p, &[0, 1, 2, 3, 4, 5]).unwrap(), 7);
    }

    #[test]
    fn run_reward_rejects_nonaccepting_root() {
        let p = chain_product();
        assert!(run_reward(&p, &[1, 2, 3, 4, 5, 0]).is_err());
    }

    #[test]
    fn malformed_run_rejected() {
        let p = chain_product();
        assert!(fragments_of_run(&p, &[0, 2]).is_err());
    }
}
