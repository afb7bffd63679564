//! Ground-truth machinery independent of the planner: direct LTL
//! evaluation on lasso words, Büchi intersection, nested-DFS emptiness,
//! and the brute-force subset-enumeration baseline.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A single position of a word: the set of propositions that hold there.
pub type Letter = BTreeSet<String>;

/// An ultimately periodic word `prefix . cycle^omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::invalid_lasso("lasso cycle must be non-empty"));
        }
        Ok(LassoWord { prefix, cycle })
    }

    /// Number of distinct positions (prefix plus one unrolling of the cycle).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at quotient position `i`, `0 <= i < len()`.
    pub fn letter(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    /// Successor position in the finite quotient (wraps into the cycle).
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// The same word with the cycle unrolled `k` times.
    pub fn unrolled(&self, k: usize) -> LassoWord {
        assert!(k >= 1);
        let mut cycle = Vec::with_capacity(self.cycle.len() * k);
        for _ in 0..k {
            cycle.extend(self.cycle.iter().cloned());
        }
        LassoWord {
            prefix: self.prefix.clone(),
            cycle,
        }
    }
}

use crate::ltl::Formula;

/// Decide whether `prefix . cycle^omega` satisfies `f`.
///
/// Subformulas are evaluated bottom-up over the finite quotient of word
/// positions; `Until` is resolved by least-fixpoint iteration so that the
/// eventuality wraps correctly into the cycle.
pub fn ltl_eval_lasso(f: &Formula, word: &LassoWord) -> bool {
    eval_positions(f, word)[0]
}

fn eval_positions(f: &Formula, word: &LassoWord) -> Vec<bool> {
    let n = word.len();
    match f {
        Formula::True => vec![true; n],
        Formula::Atom(p) => (0..n).map(|i| word.letter(i).contains(p)).collect(),
        Formula::Not(a) => {
            let va = eval_positions(a, word);
            va.into_iter().map(|b| !b).collect()
        }
        Formula::And(a, b) => {
            let va = eval_positions(a, word);
            let vb = eval_positions(b, word);
            va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
        }
        Formula::Next(a) => {
            let va = eval_positions(a, word);
            (0..n).map(|i| va[word.next(i)]).collect()
        }
        Formula::Until(a, b) => {
            let va = eval_positions(a, word);
            let vb = eval_positions(b, word);
            // Least fixpoint of u[i] = vb[i] || (va[i] && u[next(i)]).
            let mut u = vec![false; n];
            loop {
                let mut changed = false;
                for i in (0..n).rev() {
                    let v = vb[i] || (va[i] && u[word.next(i)]);
                    if v && !u[i] {
                        u[i] = v;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            u
        }
    }
}

use std::collections::{HashMap, VecDeque};

use rand::seq::index::sample;
use rand::Rng;

use crate::automaton::{degeneralize, Ba, Guard};
use crate::graph::{find_accepting_lasso, SearchGraph};
use crate::model::{trace_reward, MissionSpec, TransitionSystem};
use crate::tableau::ltl_to_gba;

/// One-state automaton accepting every word.
pub fn universal_ba() -> Ba {
    Ba {
        num_states: 1,
        init: 0,
        transitions: vec![(0, Guard::top(), 0)],
        accepting: std::iter::once(0).collect(),
        atoms: BTreeSet::new(),
    }
}

/// Layered Büchi intersection: `n` copies of the Cartesian product with a
/// counter that advances exactly when its coordinate is accepting.
/// Reachable states only.
pub fn intersect(bas: &[Ba]) -> Result<Ba> {
    if bas.is_empty() {
        return Err(Error::validation(
            "intersection of zero automata; use the universal automaton",
        ));
    }
    let n = bas.len();
    let outgoing: Vec<_> = bas.iter().map(|b| b.outgoing()).collect();

    let init = (bas.iter().map(|b| b.init).collect::<Vec<_>>(), 1usize);
    let mut index: HashMap<(Vec<usize>, usize), usize> = HashMap::new();
    let mut states = vec![init.clone()];
    index.insert(init, 0);
    let mut transitions: Vec<(usize, Guard, usize)> = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(cur) = queue.pop_front() {
        let (parts, j) = states[cur].clone();
        let j2 = if bas[j - 1].accepting.contains(&parts[j - 1]) {
            j % n + 1
        } else {
            j
        };
        let mut combos: Vec<(Guard, Vec<usize>)> = vec![(Guard::top(), Vec::new())];
        for (i, q) in parts.iter().enumerate() {
            let mut next = Vec::new();
            for (guard, targets) in &combos {
                for (g, t) in &outgoing[i][*q] {
                    if let Some(merged) = guard.conj(g) {
                        let mut ts = targets.clone();
                        ts.push(*t);
                        next.push((merged, ts));
                    }
                }
            }
            combos = next;
        }
        for (guard, targets) in combos {
            let key = (targets, j2);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    index.insert(key.clone(), id);
                    states.push(key);
                    queue.push_back(id);
                    id
                }
            };
            transitions.push((cur, guard, id));
        }
    }
    transitions.sort();
    transitions.dedup();

    let accepting: BTreeSet<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, (parts, j))| *j == 1 && bas[0].accepting.contains(&parts[0]))
        .map(|(i, _)| i)
        .collect();
    Ok(Ba {
        num_states: states.len(),
        init: 0,
        transitions,
        accepting,
        atoms: bas.iter().flat_map(|b| b.atoms.iter().cloned()).collect(),
    })
}

/// Search the product of a transition system and a Büchi automaton for an
/// accepting lasso, returned projected onto transition-system states.
/// Guards are matched against the label of the source state.
pub fn ts_ba_lasso(ts: &TransitionSystem, ba: &Ba) -> Option<(Vec<usize>, Vec<usize>)> {
    let outgoing = ba.outgoing();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = vec![(ts.init, ba.init)];
    index.insert((ts.init, ba.init), 0);
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        let (s, q) = states[cur];
        let mut out = Vec::new();
        for &s2 in &ts.succ[s] {
            for (g, q2) in &outgoing[q] {
                if !g.matches(&ts.labels[s]) {
                    continue;
                }
                let key = (s2, *q2);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        index.insert(key, id);
                        states.push(key);
                        succ.push(Vec::new());
                        queue.push_back(id);
                        id
                    }
                };
                out.push(id);
            }
        }
        succ[cur] = out;
    }
    let accepting = states
        .iter()
        .map(|&(_, q)| ba.accepting.contains(&q))
        .collect();
    let lasso = find_accepting_lasso(&SearchGraph::new(0, succ, accepting))?;
    Some((
        lasso.prefix.iter().map(|&p| states[p].0).collect(),
        lasso.cycle.iter().map(|&p| states[p].0).collect(),
    ))
}

/// Size limits for the brute-force baseline.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceCaps {
    pub max_ts_states: usize,
    pub max_formulas: usize,
    pub max_product_states: usize,
}

impl Default for BruteForceCaps {
    fn default() -> Self {
        BruteForceCaps {
            max_ts_states: 12,
            max_formulas: 4,
            max_product_states: 500_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    /// Summed reward of the winning target subset.
    pub reward: u64,
    /// Winning target subset, as original formula indices.
    pub subset: Vec<usize>,
    /// Witness lasso in transition-system states.
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    /// Actual per-formula satisfaction on the witness, original order.
    pub verdicts: Vec<bool>,
    /// Formulas satisfied on the witness beyond the target subset.
    pub incidental: Vec<usize>,
}

/// Subset-enumeration baseline: try every subset of formulas in
/// decreasing total-reward order and return the first with a non-empty
/// intersection product. Exponential in the number of formulas.
///
/// Ties between equal-total subsets go to the lexicographically greatest
/// subset under the reward-sorted formula order.
pub fn brute_force_plan(
    ts: &TransitionSystem,
    spec: &MissionSpec,
    caps: BruteForceCaps,
) -> Result<BruteForceResult> {
    ts.validate()?;
    if ts.num_states() > caps.max_ts_states {
        return Err(Error::OracleCap(format!(
            "{} model states exceed the oracle cap of {}",
            ts.num_states(),
            caps.max_ts_states
        )));
    }
    let n = spec.len();
    if n > caps.max_formulas {
        return Err(Error::OracleCap(format!(
            "{n} formulas exceed the oracle cap of {}",
            caps.max_formulas
        )));
    }

    let bas: Vec<Ba> = spec
        .entries()
        .iter()
        .map(|e| Ok(degeneralize(&ltl_to_gba(&e.formula)?)))
        .collect::<Result<_>>()?;
    let rewards = spec.rewards();

    let mut masks: Vec<u64> = (0..(1u64 << n)).collect();
    let total = |mask: u64| -> u64 {
        (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| rewards[i])
            .sum()
    };
    // Bit i reversed to bit n-1-i: greater formula indices (lower reward)
    // become less significant, giving the documented tie-break.
    let lexkey = |mask: u64| -> u64 {
        (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .fold(0, |acc, i| acc | 1 << (n - 1 - i))
    };
    masks.sort_by(|&a, &b| {
        total(b)
            .cmp(&total(a))
            .then_with(|| lexkey(b).cmp(&lexkey(a)))
    });

    for mask in masks {
        let selected: Vec<Ba> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| bas[i].clone())
            .collect();
        let ba = if selected.is_empty() {
            universal_ba()
        } else {
            intersect(&selected)?
        };
        if ts.num_states().saturating_mul(ba.num_states) > caps.max_product_states {
            return Err(Error::OracleCap(format!(
                "intersection product would exceed {} states",
                caps.max_product_states
            )));
        }
        if let Some((prefix, cycle)) = ts_ba_lasso(ts, &ba) {
            let (_, verdicts) = trace_reward(ts, spec, &prefix, &cycle)?;
            let mut subset: Vec<usize> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| spec.entries()[i].original_index)
                .collect();
            subset.sort_unstable();
            let incidental: Vec<usize> = verdicts
                .iter()
                .enumerate()
                .filter(|&(i, &sat)| sat && !subset.contains(&i))
                .map(|(i, _)| i)
                .collect();
            return Ok(BruteForceResult {
                reward: total(mask),
                subset,
                prefix,
                cycle,
                verdicts,
                incidental,
            });
        }
    }
    // The empty subset pairs the deadlock-free system with the universal
    // automaton, so the loop always returns.
    unreachable!("universal subset must yield a lasso")
}

/// All letters over the given propositions, in subset-mask order.
pub fn all_letters(atoms: &[String]) -> Vec<Letter> {
    (0..(1usize << atoms.len()))
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

/// Every lasso word with prefix length up to `max_prefix` and cycle length
/// 1..=`max_cycle`. Exponential; keep the bounds small.
pub fn all_lasso_words(atoms: &[String], max_prefix: usize, max_cycle: usize) -> Vec<LassoWord> {
    let letters = all_letters(atoms);
    let mut words = Vec::new();
    for plen in 0..=max_prefix {
        for clen in 1..=max_cycle {
            let mut shape = vec![0usize; plen + clen];
            loop {
                let prefix = shape[..plen].iter().map(|&i| letters[i].clone()).collect();
                let cycle = shape[plen..].iter().map(|&i| letters[i].clone()).collect();
                words.push(LassoWord::new(prefix, cycle).expect("non-empty cycle"));
                // Odometer over letter indices.
                let mut pos = 0;
                while pos < shape.len() {
                    shape[pos] += 1;
                    if shape[pos] < letters.len() {
                        break;
                    }
                    shape[pos] = 0;
                    pos += 1;
                }
                if pos == shape.len() {
                    break;
                }
            }
        }
    }
    words
}

/// Random formula of the given syntactic size over `atoms`.
pub fn random_formula(rng: &mut impl Rng, atoms: &[String], size: usize) -> Formula {
    if size <= 1 || atoms.is_empty() {
        return if atoms.is_empty() || rng.gen_ratio(1, 8) {
            Formula::True
        } else {
            Formula::atom(&atoms[rng.gen_range(0..atoms.len())])
        };
    }
    match rng.gen_range(0..8) {
        0 => Formula::not(random_formula(rng, atoms, size - 1)),
        1 => Formula::next(random_formula(rng, atoms, size - 1)),
        2 => Formula::eventually(random_formula(rng, atoms, size - 1)),
        3 => Formula::always(random_formula(rng, atoms, size - 1)),
        op => {
            let left = rng.gen_range(1..size.max(2));
            let a = random_formula(rng, atoms, left);
            let b = random_formula(rng, atoms, size - 1 - left.min(size - 1));
            match op {
                4 => Formula::and(a, b),
                5 => Formula::or(a, b),
                6 => Formula::implies(a, b),
                _ => Formula::until(a, b),
            }
        }
    }
}

/// Random propositional formula: a literal or a binary combination of two
/// literals.
fn random_literal(rng: &mut impl Rng, atoms: &[String]) -> Formula {
    let a = Formula::atom(&atoms[rng.gen_range(0..atoms.len())]);
    if rng.gen_bool(0.3) {
        Formula::not(a)
    } else {
        a
    }
}

fn random_propositional(rng: &mut impl Rng, atoms: &[String]) -> Formula {
    if atoms.is_empty() {
        return Formula::True;
    }
    match rng.gen_range(0..4) {
        0 | 1 => random_literal(rng, atoms),
        2 => {
            let a = random_literal(rng, atoms);
            let b = random_literal(rng, atoms);
            Formula::and(a, b)
        }
        _ => {
            let a = random_literal(rng, atoms);
            let b = random_literal(rng, atoms);
            Formula::or(a, b)
        }
    }
}

/// Random mission formula drawn from the reachability, surveillance,
/// safety, response, and sequencing templates.
pub fn random_template_formula(rng: &mut impl Rng, atoms: &[String]) -> Formula {
    let a = random_propositional(rng, atoms);
    let b = random_propositional(rng, atoms);
    match rng.gen_range(0..5) {
        0 => Formula::eventually(a),
        1 => Formula::always(Formula::eventually(a)),
        2 => Formula::always(Formula::not(a)),
        3 => Formula::always(Formula::implies(a, Formula::eventually(b))),
        _ => Formula::eventually(Formula::and(a, Formula::eventually(b))),
    }
}

/// Random instance whose formulas come from the mission templates.
pub fn random_template_instance(
    rng: &mut impl Rng,
    max_states: usize,
    atoms: &[String],
    max_formulas: usize,
    max_reward: u64,
) -> (TransitionSystem, MissionSpec) {
    let ts = random_ts(rng, max_states, atoms);
    let k = rng.gen_range(1..=max_formulas);
    let formulas = (0..k)
        .map(|_| {
            (
                random_template_formula(rng, atoms),
                rng.gen_range(1..=max_reward),
            )
        })
        .collect();
    let spec = MissionSpec::new(formulas).expect("small rewards cannot overflow");
    (ts, spec)
}

/// Random deadlock-free transition system with up to `max_states` states.
pub fn random_ts(rng: &mut impl Rng, max_states: usize, atoms: &[String]) -> TransitionSystem {
    let n = rng.gen_range(1..=max_states);
    let labels: Vec<Letter> = (0..n)
        .map(|_| {
            atoms
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect()
        })
        .collect();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=n.min(3));
            let mut targets: Vec<usize> = sample(rng, n, d).into_iter().collect();
            targets.sort_unstable();
            targets
        })
        .collect();
    TransitionSystem {
        states: (0..n).map(|i| format!("s{i}")).collect(),
        init: 0,
        succ,
        ap: atoms.to_vec(),
        labels,
    }
}

/// Random planning instance within the oracle's small-instance regime.
pub fn random_instance(
    rng: &mut impl Rng,
    max_states: usize,
    atoms: &[String],
    max_formulas: usize,
    max_reward: u64,
) -> (TransitionSystem, MissionSpec) {
    let ts = random_ts(rng, max_states, atoms);
    let k = rng.gen_range(1..=max_formulas);
    let formulas = (0..k)
        .map(|_| {
            let size = rng.gen_range(1..=5);
            (
                random_formula(rng, atoms, size),
                rng.gen_range(1..=max_reward),
            )
        })
        .collect();
    let spec = MissionSpec::new(formulas).expect("small rewards cannot overflow");
    (ts, spec)
}

/// Random ultimately periodic word over `atoms`.
pub fn random_lasso_word(
    rng: &mut impl Rng,
    atoms: &[String],
    max_prefix: usize,
    max_cycle: usize,
) -> LassoWord {
    let plen = rng.gen_range(0..=max_prefix);
    let clen = rng.gen_range(1..=max_cycle);
    let mut letters = (0..plen + clen).map(|_| {
        atoms
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect::<Letter>()
    });
    let prefix = letters.by_ref().take(plen).collect();
    let cycle = letters.collect();
    LassoWord::new(prefix, cycle).expect("non-empty cycle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_formula;

    fn letter(props: &[&str]) -> Letter {
        props.iter().map(|s| s.to_string()).collect()
    }

    fn word(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoWord {
        LassoWord::new(
            prefix.iter().map(|l| letter(l)).collect(),
            cycle.iter().map(|l| letter(l)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn atom_checks_first_position() {
        let f = parse_formula("p").unwrap();
        assert!(ltl_eval_lasso(&f, &word(&[&["p"]], &[&[]])));
        assert!(!ltl_eval_lasso(&f, &word(&[&[]], &[&["p"]])));
    }

    #[test]
    fn infinitely_often_needs_p_in_cycle() {
        let f = parse_formula("G F p").unwrap();
        assert!(ltl_eval_lasso(&f, &word(&[&[]], &[&[], &["p"]])));
        assert!(!ltl_eval_lasso(&f, &word(&[&["p"], &["p"]], &[&[]])));
    }

    #[test]
    fn until_with_wraparound() {
        // a U b where b only appears later in the cycle.
        let f = parse_formula("a U b").unwrap();
        assert!(ltl_eval_lasso(&f, &word(&[&["a"]], &[&["a"], &["b"]])));
        assert!(!ltl_eval_lasso(&f, &word(&[&["a"]], &[&["a"], &["a"]])));
        // a must hold until b does.
        assert!(!ltl_eval_lasso(&f, &word(&[&["a"], &[]], &[&["b"]])));
    }

    #[test]
    fn next_at_cycle_boundary() {
        let f = parse_formula("X p").unwrap();
        // prefix of length 1, cycle [p]: position 1 has p.
        assert!(ltl_eval_lasso(&f, &word(&[&[]], &[&["p"]])));
        // single-letter cycle loops onto itself.
        let g = parse_formula("X X p").unwrap();
        assert!(ltl_eval_lasso(&g, &word(&[], &[&["p"]])));
    }

    #[test]
    fn globally_requires_cycle_too() {
        let f = parse_formula("G p").unwrap();
        assert!(ltl_eval_lasso(&f, &word(&[&["p"]], &[&["p"]])));
        assert!(!ltl_eval_lasso(&f, &word(&[&["p"]], &[&["p"], &[]])));
    }

    #[test]
    fn eval_invariant_under_unrolling() {
        let fs = ["G F p", "p U q", "X (p -> F q)", "G (p -> X q)"];
        let w = word(&[&["p"]], &[&["q"], &[], &["p", "q"]]);
        for text in fs {
            let f = parse_formula(&text).unwrap();
            let base = ltl_eval_lasso(&f, &w);
            for k in 2..=3 {
                assert_eq!(base, ltl_eval_lasso(&f, &w.unrolled(k)), "{text} x{k}");
            }
        }
    }

    #[test]
    fn empty_cycle_rejected() {
        assert!(LassoWord::new(vec![letter(&["p"])], vec![]).is_err());
    }

    use crate::model::parse_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ba_of(text: &str) -> Ba {
        degeneralize(&ltl_to_gba(&parse_formula(text).unwrap()).unwrap())
    }

    #[test]
    fn singleton_intersection_preserves_language() {
        let atoms = vec!["p".to_string()];
        for text in ["F p", "G F p", "p U !p"] {
            let b = ba_of(text);
            let i = intersect(std::slice::from_ref(&b)).unwrap();
            for w in all_lasso_words(&atoms, 2, 3) {
                assert_eq!(b.accepts_lasso(&w), i.accepts_lasso(&w), "{text}");
            }
        }
    }

    #[test]
    fn intersection_needs_both_infinitely_often() {
        let i = intersect(&[ba_of("G F p"), ba_of("G F !p")]).unwrap();
        let atoms = vec!["p".to_string()];
        let f1 = parse_formula("G F p").unwrap();
        let f2 = parse_formula("G F !p").unwrap();
        for w in all_lasso_words(&atoms, 1, 3) {
            let expect = ltl_eval_lasso(&f1, &w) && ltl_eval_lasso(&f2, &w);
            assert_eq!(i.accepts_lasso(&w), expect);
        }
    }

    #[test]
    fn intersection_with_empty_is_empty() {
        let empty = ba_of("p & !p");
        assert!(empty.is_empty_language());
        let i = intersect(&[ba_of("F p"), empty]).unwrap();
        assert!(i.is_empty_language());
    }

    #[test]
    fn empty_intersection_list_rejected() {
        assert!(intersect(&[]).is_err());
    }

    #[test]
    fn ts_ba_lasso_finds_branch() {
        let ts = parse_model(
            "ap: p\nstates: a b c\ninit: a\nlabel c: p\n\
             trans a -> b\ntrans a -> c\ntrans b -> b\ntrans c -> c\n",
        )
        .unwrap();
        let (prefix, cycle) = ts_ba_lasso(&ts, &ba_of("F p")).unwrap();
        let word = ts.lasso_word(&prefix, &cycle).unwrap();
        assert!(ltl_eval_lasso(&parse_formula("F p").unwrap(), &word));
        assert!(ts_ba_lasso(&ts, &ba_of("G (p & !p)")).is_none());
    }

    fn mission(entries: &[(&str, u64)]) -> MissionSpec {
        MissionSpec::new(
            entries
                .iter()
                .map(|&(f, r)| (parse_formula(f).unwrap(), r))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn brute_force_picks_higher_exclusive_reward() {
        let ts = parse_model("ap: p\nstates: s\ninit: s\nlabel s: p\ntrans s -> s\n").unwrap();
        let spec = mission(&[("G p", 3), ("G !p", 2)]);
        let r = brute_force_plan(&ts, &spec, BruteForceCaps::default()).unwrap();
        assert_eq!(r.reward, 3);
        assert_eq!(r.subset, vec![0]);
        assert_eq!(r.verdicts, vec![true, false]);
        assert!(r.incidental.is_empty());
    }

    #[test]
    fn brute_force_excludes_unsatisfiable_formula() {
        let ts = parse_model("ap: p\nstates: s\ninit: s\ntrans s -> s\n").unwrap();
        let spec = mission(&[("p & !p", 9), ("G !p", 2)]);
        let r = brute_force_plan(&ts, &spec, BruteForceCaps::default()).unwrap();
        assert_eq!(r.reward, 2);
        assert_eq!(r.subset, vec![1]);
    }

    #[test]
    fn tie_break_absorbs_zero_reward_formulas() {
        // {G p, F p} and {G p} tie on total reward; the lexicographically
        // greater subset wins, so nothing is left incidental.
        let ts = parse_model("ap: p\nstates: s\ninit: s\nlabel s: p\ntrans s -> s\n").unwrap();
        let spec = mission(&[("G p", 5), ("F p", 0)]);
        let r = brute_force_plan(&ts, &spec, BruteForceCaps::default()).unwrap();
        assert_eq!(r.reward, 5);
        assert_eq!(r.subset, vec![0, 1]);
        assert!(r.incidental.is_empty());
    }

    #[test]
    fn brute_force_caps_enforced() {
        let ts = parse_model("ap: p\nstates: s\ninit: s\ntrans s -> s\n").unwrap();
        let spec = mission(&[("F p", 1); 5]);
        let caps = BruteForceCaps {
            max_formulas: 4,
            ..BruteForceCaps::default()
        };
        assert!(matches!(
            brute_force_plan(&ts, &spec, caps),
            Err(Error::OracleCap(_))
        ));
    }

    #[test]
    fn brute_force_witness_satisfies_subset() {
        let atoms = vec!["p".to_string(), "q".to_string()];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let (ts, spec) = random_instance(&mut rng, 5, &atoms, 3, 6);
            let r = brute_force_plan(&ts, &spec, BruteForceCaps::default()).unwrap();
            let (actual, verdicts) = trace_reward(&ts, &spec, &r.prefix, &r.cycle).unwrap();
            assert_eq!(verdicts, r.verdicts);
            // The witness satisfies at least the target subset.
            for &i in &r.subset {
                assert!(verdicts[i]);
            }
            assert!(actual >= r.reward);
        }
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let atoms = vec!["p".to_string()];
        let mk = || {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let (ts, spec) = random_instance(&mut rng, 6, &atoms, 3, 9);
            (ts.to_model_text(), crate::model::spec_to_text(&spec))
        };
        assert_eq!(mk(), mk());
    }

    #[test]
    fn all_lasso_words_count() {
        let atoms = vec!["p".to_string()];
        // Prefix lengths 0..=1, cycle lengths 1..=2 over 2 letters:
        // 2 + 4 + 4 + 8 = 18 words.
        assert_eq!(all_lasso_words(&atoms, 1, 2).len(), 18);
    }
}
