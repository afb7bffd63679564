//! Weighted nested depth-first search over the product automaton.
//!
//! The outer DFS visits product states in postorder; each accepting state
//! popped becomes the root of a longest-cycle search that maximizes the
//! weight of the cycle's first fragment. Weighted edges only run forward
//! through the automaton's components, so one relaxation pass per
//! component in topological order computes exact maximal distances.

use std::collections::VecDeque;

use crate::automaton::{make_nonblocking, Gba};
use crate::error::{Error, Result};
use crate::model::{trace_reward, MissionSpec, TransitionSystem};
use crate::tableau::{ltl_to_gba_with_cap, DEFAULT_STATE_CAP};
use crate::weighted::{build_product, build_weighted_ba, Product, Wba};

/// Planner knobs. `reuse_inner` skips states already expanded by an
/// earlier longest-cycle search; sound because roots are processed in
/// outer postorder, and toggleable so tests can compare both modes.
#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    pub reuse_inner: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { reuse_inner: true }
    }
}

/// A lasso in the product automaton. The cycle is rooted at an accepting
/// state when one is reachable; `prefix` excludes the root.
#[derive(Debug, Clone)]
pub struct ProductPlan {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    pub reward: u64,
}

/// Per-search scratch annotations; generation stamps avoid clearing the
/// arrays between longest-cycle invocations.
struct Scratch {
    invocation: u32,
    dist: Vec<u64>,
    dist_gen: Vec<u32>,
    pred: Vec<usize>,
    queued: Vec<bool>,
    /// Invocation that expanded the state; persists across roots.
    expanded: Vec<u32>,
    /// Arrival annotations for accepting (component-0) states.
    sf_dist: Vec<u64>,
    sf_gen: Vec<u32>,
    sf_pred: Vec<usize>,
    sf_touched: Vec<usize>,
    queues: Vec<VecDeque<usize>>,
    bfs_runs: u32,
    bfs_gen: Vec<u32>,
    bfs_pred: Vec<usize>,
}

impl Scratch {
    fn new(product: &Product) -> Scratch {
        let n = product.num_states();
        Scratch {
            invocation: 0,
            dist: vec![0; n],
            dist_gen: vec![0; n],
            pred: vec![usize::MAX; n],
            queued: vec![false; n],
            expanded: vec![0; n],
            sf_dist: vec![0; n],
            sf_gen: vec![0; n],
            sf_pred: vec![usize::MAX; n],
            sf_touched: Vec::new(),
            queues: vec![VecDeque::new(); product.num_components],
            bfs_runs: 0,
            bfs_gen: vec![0; n],
            bfs_pred: vec![usize::MAX; n],
        }
    }

    fn relax(&mut self, product: &Product, target: usize, dist: u64, pred: usize) {
        let g = self.invocation;
        if product.comp[target] == 0 {
            // Fragment endpoint: record the arrival, do not propagate.
            if self.sf_gen[target] != g {
                self.sf_gen[target] = g;
                self.sf_dist[target] = dist;
                self.sf_pred[target] = pred;
                self.sf_touched.push(target);
            } else if dist > self.sf_dist[target] {
                self.sf_dist[target] = dist;
                self.sf_pred[target] = pred;
            }
            return;
        }
        let improved = self.dist_gen[target] != g || dist > self.dist[target];
        if improved {
            self.dist_gen[target] = g;
            self.dist[target] = dist;
            self.pred[target] = pred;
            if !self.queued[target] {
                self.queued[target] = true;
                self.queues[product.comp[target]].push_back(target);
            }
        }
    }
}

/// Inner search: maximal first-fragment weight of a cycle through `root`,
/// with one witnessing cycle, or `None` if no cycle passes through it.
fn longest_cycle_search(
    product: &Product,
    root: usize,
    scratch: &mut Scratch,
    reuse_inner: bool,
) -> Option<(u64, Vec<usize>)> {
    debug_assert!(product.accepting[root]);
    scratch.invocation += 1;
    scratch.sf_touched.clear();

    // Seed with the root's successors; the root itself is the distance-0
    // source and is never a relaxation target.
    for &(t, w) in &product.succ[root] {
        scratch.relax(product, t, w, root);
    }

    // Phase 1: propagate component by component. Weighted edges go
    // strictly forward in component order, so each queue is complete by
    // the time it is processed; zero-weight cycles inside one component
    // are handled by re-relaxation on strict improvement.
    for c in 1..product.num_components {
        while let Some(p) = scratch.queues[c].pop_front() {
            scratch.queued[p] = false;
            if reuse_inner
                && scratch.expanded[p] != 0
                && scratch.expanded[p] != scratch.invocation
            {
                continue;
            }
            scratch.expanded[p] = scratch.invocation;
            let d = scratch.dist[p];
            for &(t, w) in &product.succ[p] {
                debug_assert!(product.comp[t] >= c || product.comp[t] == 0);
                scratch.relax(product, t, d + w, p);
            }
        }
    }

    // Phase 2: try fragment endpoints by decreasing arrival distance and
    // close the cycle through the accepting component.
    let mut candidates: Vec<(u64, usize)> = scratch
        .sf_touched
        .iter()
        .map(|&h| (scratch.sf_dist[h], h))
        .collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    for (dist, h) in candidates {
        let Some(tail) = find_path(product, h, root, scratch) else {
            continue;
        };
        // Stem root..=h via pred pointers; interior states are non-accepting.
        let mut stem = vec![h];
        let mut cur = scratch.sf_pred[h];
        while cur != root {
            stem.push(cur);
            cur = scratch.pred[cur];
        }
        stem.push(root);
        stem.reverse();
        let mut cycle = stem;
        if h == root {
            cycle.pop();
        } else {
            cycle.extend_from_slice(&tail[..tail.len() - 1]);
        }
        return Some((dist, cycle));
    }
    None
}

/// Breadth-first path from `from` to `to` inside the accepting component,
/// returned without `from` and ending in `to`; `None` if disconnected.
/// An empty path means `from == to`.
fn find_path(
    product: &Product,
    from: usize,
    to: usize,
    scratch: &mut Scratch,
) -> Option<Vec<usize>> {
    if from == to {
        return Some(Vec::new());
    }
    scratch.bfs_runs += 1;
    let g = scratch.bfs_runs;
    let mut queue = VecDeque::from([from]);
    scratch.bfs_gen[from] = g;
    scratch.bfs_pred[from] = usize::MAX;
    while let Some(p) = queue.pop_front() {
        for &(t, _) in &product.succ[p] {
            if product.comp[t] != 0 || scratch.bfs_gen[t] == g {
                continue;
            }
            scratch.bfs_gen[t] = g;
            scratch.bfs_pred[t] = p;
            if t == to {
                let mut path = vec![to];
                let mut cur = p;
                while cur != from {
                    path.push(cur);
                    cur = scratch.bfs_pred[cur];
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(t);
        }
    }
    None
}

/// Outer search: maximal-reward lasso of the product. Stops early once the
/// recorded reward reaches `total_reward`. Falls back to an arbitrary
/// lasso with reward 0 if no cycle through an accepting state exists.
pub fn plan(product: &Product, total_reward: u64, opts: PlanOptions) -> Result<ProductPlan> {
    if product.num_states() == 0 {
        return Err(Error::validation("empty product automaton"));
    }
    let mut scratch = Scratch::new(product);
    let mut visited = vec![false; product.num_states()];
    let mut best: Option<(u64, Vec<usize>, Vec<usize>)> = None;

    // Iterative postorder DFS; the stack always holds the path from the
    // initial state to the state on top.
    let mut stack: Vec<(usize, usize)> = vec![(product.init, 0)];
    visited[product.init] = true;
    'outer: while let Some(&mut (p, ref mut idx)) = stack.last_mut() {
        if let Some(&(t, _)) = product.succ[p].get(*idx) {
            *idx += 1;
            if !visited[t] {
                visited[t] = true;
                stack.push((t, 0));
            }
            continue;
        }
        stack.pop();
        if !product.accepting[p] {
            continue;
        }
        if let Some((reward, cycle)) = longest_cycle_search(product, p, &mut scratch, opts.reuse_inner)
        {
            if best.as_ref().map(|b| reward > b.0).unwrap_or(true) {
                let prefix: Vec<usize> = stack.iter().map(|&(s, _)| s).collect();
                let done = reward == total_reward;
                best = Some((reward, prefix, cycle));
                if done {
                    break 'outer;
                }
            }
        }
    }

    match best {
        Some((reward, prefix, cycle)) => Ok(ProductPlan {
            prefix,
            cycle,
            reward,
        }),
        None => arbitrary_lasso(product),
    }
}

/// Defensive fallback: any lasso of the product, reward 0. With
/// non-blocking specification automata every accepting state lies on a
/// hub cycle, so this is not expected to be reachable.
fn arbitrary_lasso(product: &Product) -> Result<ProductPlan> {
    let mut on_stack = vec![false; product.num_states()];
    let mut visited = vec![false; product.num_states()];
    let mut stack: Vec<(usize, usize)> = vec![(product.init, 0)];
    visited[product.init] = true;
    on_stack[product.init] = true;
    while let Some(&mut (p, ref mut idx)) = stack.last_mut() {
        if let Some(&(t, _)) = product.succ[p].get(*idx) {
            *idx += 1;
            if on_stack[t] {
                let pos = stack.iter().position(|&(s, _)| s == t).unwrap();
                return Ok(ProductPlan {
                    prefix: stack[..pos].iter().map(|&(s, _)| s).collect(),
                    cycle: stack[pos..].iter().map(|&(s, _)| s).collect(),
                    reward: 0,
                });
            }
            if !visited[t] {
                visited[t] = true;
                on_stack[t] = true;
                stack.push((t, 0));
            }
            continue;
        }
        on_stack[p] = false;
        stack.pop();
    }
    Err(Error::validation("product automaton has no infinite run"))
}

/// End-to-end knobs for `synthesize`.
#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    pub max_states: usize,
    pub reuse_inner: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            max_states: DEFAULT_STATE_CAP,
            reuse_inner: true,
        }
    }
}

/// A finished plan, projected onto the transition system.
#[derive(Debug, Clone)]
pub struct LassoPlan {
    /// Transition-system states from the initial state, cycle root excluded.
    pub prefix: Vec<usize>,
    /// Transition-system states of the cycle, starting at its root.
    pub cycle: Vec<usize>,
    pub reward: u64,
    /// Per-formula satisfaction on the projected trace, original order.
    pub verdicts: Vec<bool>,
    pub product_prefix: Vec<usize>,
    pub product_cycle: Vec<usize>,
}

/// All intermediate artifacts of one planning run, kept for inspection
/// and export.
pub struct Synthesis {
    pub gbas: Vec<Gba>,
    pub wba: Wba,
    pub product: Product,
    pub plan: LassoPlan,
}

/// Full pipeline: translate each formula, complete it to non-blocking,
/// build the layered weighted automaton and the product, and search.
pub fn synthesize(
    ts: &TransitionSystem,
    spec: &MissionSpec,
    opts: SynthesisOptions,
) -> Result<Synthesis> {
    ts.validate()?;
    if spec.is_empty() {
        return Err(Error::validation("specification has no formulas"));
    }
    let gbas: Vec<Gba> = spec
        .entries()
        .iter()
        .map(|e| Ok(make_nonblocking(&ltl_to_gba_with_cap(&e.formula, opts.max_states)?)))
        .collect::<Result<_>>()?;
    let wba = build_weighted_ba(&gbas, &spec.rewards(), opts.max_states)?;
    let product = build_product(ts, &wba, opts.max_states)?;
    let pp = plan(
        &product,
        spec.total_reward(),
        PlanOptions {
            reuse_inner: opts.reuse_inner,
        },
    )?;

    let prefix: Vec<usize> = pp.prefix.iter().map(|&p| product.alpha(p)).collect();
    let cycle: Vec<usize> = pp.cycle.iter().map(|&p| product.alpha(p)).collect();
    let (_, verdicts) = trace_reward(ts, spec, &prefix, &cycle)?;
    Ok(Synthesis {
        gbas,
        wba,
        product,
        plan: LassoPlan {
            prefix,
            cycle,
            reward: pp.reward,
            verdicts,
            product_prefix: pp.prefix,
            product_cycle: pp.cycle,
        },
    })
}
