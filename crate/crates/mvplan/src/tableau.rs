//! On-the-fly tableau translation from LTL to generalized Büchi automata.
//!
//! Nodes carry the usual `new` / `old` / `next` formula sets; the input is
//! brought into negation normal form first, and each `Until` subformula
//! contributes one acceptance set.

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::{Gba, Guard};
use crate::error::{Error, Result};
use crate::ltl::{Formula, Nnf};

/// Default cap on tableau nodes per formula; the construction is
/// worst-case exponential in the formula size.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Translate a formula into a GBA with the default state cap.
pub fn ltl_to_gba(f: &Formula) -> Result<Gba> {
    ltl_to_gba_with_cap(f, DEFAULT_STATE_CAP)
}

/// A node under expansion.
#[derive(Debug, Clone)]
struct Node {
    incoming: BTreeSet<usize>,
    new: BTreeSet<Nnf>,
    old: BTreeSet<Nnf>,
    next: BTreeSet<Nnf>,
}

/// A fully expanded node, identified by its (old, next) pair; `next` is
/// consumed by the scheduled time successor and only `old` is kept.
#[derive(Debug, Clone)]
struct DoneNode {
    old: BTreeSet<Nnf>,
    incoming: BTreeSet<usize>,
}

/// Sentinel predecessor standing for the initial state.
const INIT: usize = usize::MAX;

pub fn ltl_to_gba_with_cap(f: &Formula, cap: usize) -> Result<Gba> {
    let nnf = Nnf::from_formula(f);

    let mut done: Vec<DoneNode> = Vec::new();
    let mut by_key: BTreeMap<(BTreeSet<Nnf>, BTreeSet<Nnf>), usize> = BTreeMap::new();
    let mut pending: Vec<Node> = vec![Node {
        incoming: [INIT].into_iter().collect(),
        new: [nnf.clone()].into_iter().collect(),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    while let Some(mut node) = pending.pop() {
        let Some(f) = node.new.pop_first() else {
            // Fully expanded: merge with an existing node or register a new
            // one and schedule its time successor.
            let key = (node.old.clone(), node.next.clone());
            if let Some(&id) = by_key.get(&key) {
                done[id].incoming.extend(node.incoming.iter().copied());
            } else {
                let id = done.len();
                if id >= cap {
                    return Err(Error::StateCap {
                        actual: id + 1,
                        cap,
                    });
                }
                by_key.insert(key, id);
                pending.push(Node {
                    incoming: [id].into_iter().collect(),
                    new: node.next.clone(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
                done.push(DoneNode {
                    old: node.old,
                    incoming: node.incoming,
                });
            }
            continue;
        };
        match &f {
            Nnf::True => pending.push(node),
            Nnf::False => {} // inconsistent node, discard
            Nnf::Lit(p, pol) => {
                if node.old.contains(&Nnf::Lit(p.clone(), !pol)) {
                    continue; // contradiction
                }
                node.old.insert(f);
                pending.push(node);
            }
            Nnf::And(a, b) => {
                for sub in [a.as_ref(), b.as_ref()] {
                    if !node.old.contains(sub) {
                        node.new.insert(sub.clone());
                    }
                }
                node.old.insert(f.clone());
                pending.push(node);
            }
            Nnf::Or(a, b) => {
                node.old.insert(f.clone());
                let mut left = node.clone();
                if !left.old.contains(a.as_ref()) {
                    left.new.insert(a.as_ref().clone());
                }
                let mut right = node;
                if !right.old.contains(b.as_ref()) {
                    right.new.insert(b.as_ref().clone());
                }
                pending.push(right);
                pending.push(left);
            }
            Nnf::Next(a) => {
                node.old.insert(f.clone());
                node.next.insert(a.as_ref().clone());
                pending.push(node);
            }
            Nnf::Until(a, b) => {
                node.old.insert(f.clone());
                // Either b holds now, or a holds now and the until carries
                // over to the next position.
                let mut now = node.clone();
                if !now.old.contains(b.as_ref()) {
                    now.new.insert(b.as_ref().clone());
                }
                let mut later = node;
                if !later.old.contains(a.as_ref()) {
                    later.new.insert(a.as_ref().clone());
                }
                later.next.insert(f.clone());
                pending.push(later);
                pending.push(now);
            }
            Nnf::Release(a, b) => {
                node.old.insert(f.clone());
                // Either both hold now, or b holds now and the release
                // carries over.
                let mut both = node.clone();
                for sub in [a.as_ref(), b.as_ref()] {
                    if !both.old.contains(sub) {
                        both.new.insert(sub.clone());
                    }
                }
                let mut carry = node;
                if !carry.old.contains(b.as_ref()) {
                    carry.new.insert(b.as_ref().clone());
                }
                carry.next.insert(f.clone());
                pending.push(carry);
                pending.push(both);
            }
        }
    }

    // States: expanded nodes plus a fresh initial state.
    let init = done.len();
    let num_states = done.len() + 1;

    let mut transitions = Vec::new();
    for (id, node) in done.iter().enumerate() {
        let guard = guard_of(&node.old);
        for &inc in &node.incoming {
            let src = if inc == INIT { init } else { inc };
            transitions.push((src, guard.clone(), id));
        }
    }
    transitions.sort();
    transitions.dedup();

    // One acceptance set per Until subformula of the closure: nodes that
    // either do not owe the until or have already discharged it.
    let untils = collect_untils(&nnf);
    let mut acceptance: Vec<BTreeSet<usize>> = Vec::new();
    for u in &untils {
        let Nnf::Until(_, b) = u else { unreachable!() };
        // `True` never enters `old`, but it discharges the until at every
        // position, so such untils impose no constraint.
        let set: BTreeSet<usize> = done
            .iter()
            .enumerate()
            .filter(|(_, node)| {
                !node.old.contains(u)
                    || b.as_ref() == &Nnf::True
                    || node.old.contains(b.as_ref())
            })
            .map(|(id, _)| id)
            .collect();
        acceptance.push(set);
    }
    if acceptance.is_empty() {
        // Every run accepting; normalize so downstream layer arithmetic
        // always has at least one set.
        acceptance.push((0..num_states).collect());
    }

    let gba = Gba {
        num_states,
        init,
        transitions,
        acceptance,
        atoms: f.atoms(),
    };
    Ok(gba.reachable_renumbered())
}

fn guard_of(old: &BTreeSet<Nnf>) -> Guard {
    let mut guard = Guard::top();
    for f in old {
        if let Nnf::Lit(p, pol) = f {
            guard = guard
                .with_literal(p, *pol)
                .expect("contradictions are pruned during expansion");
        }
    }
    guard
}

fn collect_untils(f: &Nnf) -> BTreeSet<Nnf> {
    let mut out = BTreeSet::new();
    collect_untils_into(f, &mut out);
    out
}

fn collect_untils_into(f: &Nnf, out: &mut BTreeSet<Nnf>) {
    match f {
        Nnf::True | Nnf::False | Nnf::Lit(..) => {}
        Nnf::Next(a) => collect_untils_into(a, out),
        Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Release(a, b) => {
            collect_untils_into(a, out);
            collect_untils_into(b, out);
        }
        Nnf::Until(a, b) => {
            out.insert(f.clone());
            collect_untils_into(a, out);
            collect_untils_into(b, out);
        }
    }
}
