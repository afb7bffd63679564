//! Büchi and generalized Büchi automata with guard-labeled transitions.
//!
//! A guard is a conjunction of proposition literals; it stands for all
//! alphabet letters (subsets of AP) consistent with the literals, which
//! keeps automata compact instead of enumerating `2^AP` edge labels.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{self, SearchGraph};
use crate::oracle::{LassoWord, Letter};

/// A conjunction of positive and negative proposition literals.
///
/// The empty guard matches every letter.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    pub pos: BTreeSet<String>,
    pub neg: BTreeSet<String>,
}

impl Guard {
    pub fn top() -> Guard {
        Guard::default()
    }

    pub fn is_top(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    /// Add a literal; returns `None` on a contradictory pair.
    pub fn with_literal(mut self, atom: &str, positive: bool) -> Option<Guard> {
        if positive {
            if self.neg.contains(atom) {
                return None;
            }
            self.pos.insert(atom.to_string());
        } else {
            if self.pos.contains(atom) {
                return None;
            }
            self.neg.insert(atom.to_string());
        }
        Some(self)
    }

    /// Conjunction of two guards; `None` if contradictory.
    pub fn conj(&self, other: &Guard) -> Option<Guard> {
        if self.pos.intersection(&other.neg).next().is_some()
            || self.neg.intersection(&other.pos).next().is_some()
        {
            return None;
        }
        let mut out = self.clone();
        out.pos.extend(other.pos.iter().cloned());
        out.neg.extend(other.neg.iter().cloned());
        Some(out)
    }

    /// Does the guard match a letter (set of true propositions)?
    pub fn matches(&self, letter: &Letter) -> bool {
        self.pos.iter().all(|p| letter.contains(p))
            && self.neg.iter().all(|p| !letter.contains(p))
    }

    /// Cube difference `self \ other`, as a disjoint list of guards.
    ///
    /// Used by non-blocking completion to find uncovered letters.
    pub fn subtract(&self, other: &Guard) -> Vec<Guard> {
        // Disjoint cubes: nothing to remove.
        if self.pos.intersection(&other.neg).next().is_some()
            || self.neg.intersection(&other.pos).next().is_some()
        {
            return vec![self.clone()];
        }
        let mut remainder = Vec::new();
        let mut cur = self.clone();
        for (atom, positive) in other
            .pos
            .iter()
            .map(|a| (a, true))
            .chain(other.neg.iter().map(|a| (a, false)))
        {
            let already = if positive {
                cur.pos.contains(atom)
            } else {
                cur.neg.contains(atom)
            };
            if already {
                continue;
            }
            // The part of `cur` where this literal is false survives.
            remainder.push(cur.clone().with_literal(atom, !positive).unwrap());
            cur = cur.with_literal(atom, positive).unwrap();
        }
        remainder
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_top() {
            return write!(f, "true");
        }
        let mut first = true;
        for p in &self.pos {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        for p in &self.neg {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "!{p}")?;
            first = false;
        }
        Ok(())
    }
}

/// Generalized Büchi automaton: family-of-sets acceptance.
#[derive(Debug, Clone)]
pub struct Gba {
    pub num_states: usize,
    pub init: usize,
    pub transitions: Vec<(usize, Guard, usize)>,
    /// Ordered acceptance family; non-empty after normalization.
    pub acceptance: Vec<BTreeSet<usize>>,
    /// Propositions this automaton can talk about.
    pub atoms: BTreeSet<String>,
}

/// Büchi automaton: single-set acceptance.
#[derive(Debug, Clone)]
pub struct Ba {
    pub num_states: usize,
    pub init: usize,
    pub transitions: Vec<(usize, Guard, usize)>,
    pub accepting: BTreeSet<usize>,
    pub atoms: BTreeSet<String>,
}

impl Gba {
    pub fn validate(&self) -> Result<()> {
        if self.init >= self.num_states {
            return Err(Error::validation("initial state out of range"));
        }
        for (a, _, b) in &self.transitions {
            if *a >= self.num_states || *b >= self.num_states {
                return Err(Error::validation("transition endpoint out of range"));
            }
        }
        for set in &self.acceptance {
            if set.iter().any(|&q| q >= self.num_states) {
                return Err(Error::validation("acceptance state out of range"));
            }
        }
        Ok(())
    }

    /// Successor transitions grouped by source state.
    pub fn outgoing(&self) -> Vec<Vec<(Guard, usize)>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (a, g, b) in &self.transitions {
            out[*a].push((g.clone(), *b));
        }
        out
    }

    /// Plain successor lists, ignoring guards.
    fn succ_lists(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.num_states];
        for (a, _, b) in &self.transitions {
            succ[*a].push(*b);
        }
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        succ
    }

    /// Language emptiness via SCC search (generalized acceptance).
    ///
    /// Guards are satisfiable cubes, so a transition is traversable under
    /// some letter and emptiness reduces to a graph condition.
    pub fn is_empty_language(&self) -> bool {
        let sets: Vec<Vec<bool>> = self
            .acceptance
            .iter()
            .map(|set| {
                let mut v = vec![false; self.num_states];
                for &q in set {
                    v[q] = true;
                }
                v
            })
            .collect();
        !graph::generalized_nonempty(&self.succ_lists(), self.init, &sets)
    }

    /// Does the automaton accept `prefix . cycle^omega`?
    pub fn accepts_lasso(&self, word: &LassoWord) -> bool {
        degeneralize(self).accepts_lasso(word)
    }

    /// Renumber states by BFS first-reachability from the initial state,
    /// dropping unreachable states. Used for stable dumps.
    pub fn reachable_renumbered(&self) -> Gba {
        let (map, order) = bfs_order(self.num_states, self.init, &self.outgoing());
        let mut transitions: Vec<(usize, Guard, usize)> = self
            .transitions
            .iter()
            .filter(|(a, _, b)| map[*a] != usize::MAX && map[*b] != usize::MAX)
            .map(|(a, g, b)| (map[*a], g.clone(), map[*b]))
            .collect();
        transitions.sort();
        transitions.dedup();
        let acceptance = self
            .acceptance
            .iter()
            .map(|set| {
                set.iter()
                    .filter(|&&q| map[q] != usize::MAX)
                    .map(|&q| map[q])
                    .collect()
            })
            .collect();
        Gba {
            num_states: order.len(),
            init: 0,
            transitions,
            acceptance,
            atoms: self.atoms.clone(),
        }
    }
}

impl Ba {
    pub fn outgoing(&self) -> Vec<Vec<(Guard, usize)>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (a, g, b) in &self.transitions {
            out[*a].push((g.clone(), *b));
        }
        out
    }

    /// Does the automaton accept `prefix . cycle^omega`?
    ///
    /// Builds the product of the automaton with the finite quotient of word
    /// positions and runs nested DFS for an accepting cycle.
    pub fn accepts_lasso(&self, word: &LassoWord) -> bool {
        let positions = word.len();
        let nq = self.num_states;
        let id = |pos: usize, q: usize| pos * nq + q;
        let mut succ = vec![Vec::new(); positions * nq];
        for (a, g, b) in &self.transitions {
            for pos in 0..positions {
                if g.matches(word.letter(pos)) {
                    succ[id(pos, *a)].push(id(word.next(pos), *b));
                }
            }
        }
        let mut accepting = vec![false; positions * nq];
        for &q in &self.accepting {
            for pos in 0..positions {
                accepting[id(pos, q)] = true;
            }
        }
        let g = SearchGraph::new(id(0, self.init), succ, accepting);
        graph::find_accepting_lasso(&g).is_some()
    }

    pub fn is_empty_language(&self) -> bool {
        let mut succ = vec![Vec::new(); self.num_states];
        for (a, _, b) in &self.transitions {
            succ[*a].push(*b);
        }
        let mut accepting = vec![false; self.num_states];
        for &q in &self.accepting {
            accepting[q] = true;
        }
        let g = SearchGraph::new(self.init, succ, accepting);
        graph::find_accepting_lasso(&g).is_none()
    }

    pub fn reachable_renumbered(&self) -> Ba {
        let (map, order) = bfs_order(self.num_states, self.init, &self.outgoing());
        let mut transitions: Vec<(usize, Guard, usize)> = self
            .transitions
            .iter()
            .filter(|(a, _, b)| map[*a] != usize::MAX && map[*b] != usize::MAX)
            .map(|(a, g, b)| (map[*a], g.clone(), map[*b]))
            .collect();
        transitions.sort();
        transitions.dedup();
        let accepting = self
            .accepting
            .iter()
            .filter(|&&q| map[q] != usize::MAX)
            .map(|&q| map[q])
            .collect();
        Ba {
            num_states: order.len(),
            init: 0,
            transitions,
            accepting,
            atoms: self.atoms.clone(),
        }
    }
}

/// BFS numbering by first reachability; unreachable states map to MAX.
fn bfs_order(
    num_states: usize,
    init: usize,
    outgoing: &[Vec<(Guard, usize)>],
) -> (Vec<usize>, Vec<usize>) {
    let mut map = vec![usize::MAX; num_states];
    let mut order = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    map[init] = 0;
    order.push(init);
    queue.push_back(init);
    while let Some(q) = queue.pop_front() {
        let mut targets: Vec<usize> = outgoing[q].iter().map(|(_, t)| *t).collect();
        targets.sort_unstable();
        targets.dedup();
        for t in targets {
            if map[t] == usize::MAX {
                map[t] = order.len();
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    (map, order)
}

/// Translate a GBA into a language-equivalent BA with the counter
/// construction: states are pairs `(q, j)`, the counter advances exactly
/// when the source's automaton part lies in the j-th acceptance set.
pub fn degeneralize(g: &Gba) -> Ba {
    // An empty family means every run is accepting; normalize to one
    // all-states set so the counter machinery stays total.
    let acceptance: Vec<BTreeSet<usize>> = if g.acceptance.is_empty() {
        vec![(0..g.num_states).collect()]
    } else {
        g.acceptance.clone()
    };
    let m = acceptance.len();
    let id = |q: usize, j: usize| q * m + (j - 1);
    let mut transitions = Vec::new();
    for (a, guard, b) in &g.transitions {
        for j in 1..=m {
            let j_next = if acceptance[j - 1].contains(a) {
                (j % m) + 1
            } else {
                j
            };
            transitions.push((id(*a, j), guard.clone(), id(*b, j_next)));
        }
    }
    let accepting = acceptance[0].iter().map(|&q| id(q, 1)).collect();
    Ba {
        num_states: g.num_states * m,
        init: id(g.init, 1),
        transitions,
        accepting,
        atoms: g.atoms.clone(),
    }
}

/// Complete a GBA so every state has a successor for every letter.
///
/// If some `(state, letter)` pair lacks a successor, a fresh non-accepting
/// sink with a `true` self-loop is added and all uncovered letters are
/// routed to it; otherwise the automaton is returned unchanged.
pub fn make_nonblocking(g: &Gba) -> Gba {
    let uncovered = blocking_cubes(g);
    if uncovered.is_empty() {
        return g.clone();
    }
    let sink = g.num_states;
    let mut out = g.clone();
    out.num_states += 1;
    for (q, cube) in uncovered {
        out.transitions.push((q, cube, sink));
    }
    out.transitions.push((sink, Guard::top(), sink));
    out
}

/// Per-state letter cubes with no matching outgoing transition. Empty iff
/// the automaton is non-blocking.
pub fn blocking_cubes(g: &Gba) -> Vec<(usize, Guard)> {
    let outgoing = g.outgoing();
    let mut uncovered: Vec<(usize, Guard)> = Vec::new();
    for q in 0..g.num_states {
        let mut cubes = vec![Guard::top()];
        for (guard, _) in &outgoing[q] {
            cubes = cubes
                .into_iter()
                .flat_map(|c| c.subtract(guard))
                .collect();
        }
        for cube in cubes {
            uncovered.push((q, cube));
        }
    }
    uncovered
}

/// Assert the non-blocking property by exhaustive letter enumeration over
/// the given proposition set. Intended for tests and small alphabets.
pub fn is_nonblocking_over(g: &Gba, atoms: &BTreeSet<String>) -> bool {
    let atoms: Vec<&String> = atoms.iter().collect();
    let outgoing = g.outgoing();
    for q in 0..g.num_states {
        for bits in 0..(1u32 << atoms.len()) {
            let letter: Letter = atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, a)| (*a).clone())
                .collect();
            if !outgoing[q].iter().any(|(guard, _)| guard.matches(&letter)) {
                return false;
            }
        }
    }
    true
}
