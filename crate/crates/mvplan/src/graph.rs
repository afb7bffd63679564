//! Shared graph search: nested DFS for accepting-cycle detection and
//! Tarjan SCCs for generalized acceptance checks.

/// A plain directed graph with an initial state and an accepting-state
/// predicate, as produced from automata and products.
#[derive(Debug, Clone)]
pub struct SearchGraph {
    pub init: usize,
    /// Successor lists, sorted ascending for deterministic traversal.
    pub succ: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl SearchGraph {
    pub fn new(init: usize, mut succ: Vec<Vec<usize>>, accepting: Vec<bool>) -> Self {
        assert_eq!(succ.len(), accepting.len());
        assert!(init < succ.len());
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        SearchGraph {
            init,
            succ,
            accepting,
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }
}

/// A reachable accepting cycle: `prefix` leads from the initial state to the
/// cycle root (exclusive), `cycle` starts at the accepting root and closes
/// back to it with its final edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

/// Nested depth-first search for a reachable accepting cycle.
///
/// Inner searches run on outer postorder and share their visited set, as in
/// the classic SPIN algorithm. Successors are explored in ascending order,
/// so the result is deterministic.
pub fn find_accepting_lasso(g: &SearchGraph) -> Option<Lasso> {
    let n = g.len();
    if n == 0 {
        return None;
    }
    let mut visited_outer = vec![false; n];
    let mut visited_inner = vec![false; n];
    let mut pred = vec![usize::MAX; n];
    let mut pred_gen = vec![0u32; n];
    let mut gen = 0u32;

    // Outer stack holds (state, next successor index); the states on the
    // stack are exactly the current DFS path.
    let mut stack: Vec<(usize, usize)> = vec![(g.init, 0)];
    visited_outer[g.init] = true;

    while let Some(&mut (p, ref mut idx)) = stack.last_mut() {
        if *idx < g.succ[p].len() {
            let s = g.succ[p][*idx];
            *idx += 1;
            if !visited_outer[s] {
                visited_outer[s] = true;
                stack.push((s, 0));
            }
        } else {
            stack.pop();
            if g.accepting[p] {
                gen += 1;
                if let Some(cycle) =
                    inner_search(g, p, &mut visited_inner, &mut pred, &mut pred_gen, gen)
                {
                    let prefix: Vec<usize> = stack.iter().map(|&(s, _)| s).collect();
                    return Some(Lasso { prefix, cycle });
                }
            }
        }
    }
    None
}

fn inner_search(
    g: &SearchGraph,
    root: usize,
    visited_inner: &mut [bool],
    pred: &mut [usize],
    pred_gen: &mut [u32],
    gen: u32,
) -> Option<Vec<usize>> {
    let mut stack = vec![root];
    visited_inner[root] = true;
    while let Some(p) = stack.pop() {
        for &s in &g.succ[p] {
            if s == root {
                // Reconstruct root -> ... -> p using this run's pred chain.
                let mut rev = vec![p];
                let mut cur = p;
                while cur != root {
                    cur = pred[cur];
                    rev.push(cur);
                }
                rev.reverse();
                return Some(rev);
            }
            if !visited_inner[s] {
                visited_inner[s] = true;
                pred[s] = p;
                pred_gen[s] = gen;
                stack.push(s);
            }
        }
    }
    None
}

/// Strongly connected components of the subgraph reachable from `init`,
/// via iterative Tarjan.
pub fn reachable_sccs(succ: &[Vec<usize>], init: usize) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut scc_stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // (state, next successor idx)
    let mut call: Vec<(usize, usize)> = vec![(init, 0)];
    index[init] = next_index;
    lowlink[init] = next_index;
    next_index += 1;
    scc_stack.push(init);
    on_stack[init] = true;

    while let Some(&mut (v, ref mut i)) = call.last_mut() {
        if *i < succ[v].len() {
            let w = succ[v][*i];
            *i += 1;
            if index[w] == usize::MAX {
                index[w] = next_index;
                lowlink[w] = next_index;
                next_index += 1;
                scc_stack.push(w);
                on_stack[w] = true;
                call.push((w, 0));
            } else if on_stack[w] {
                lowlink[v] = lowlink[v].min(index[w]);
            }
        } else {
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = scc_stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                sccs.push(comp);
            }
        }
    }
    sccs
}

/// Generalized Büchi non-emptiness: is there a reachable cycle intersecting
/// every acceptance set? `sets` are membership vectors over the states.
pub fn generalized_nonempty(succ: &[Vec<usize>], init: usize, sets: &[Vec<bool>]) -> bool {
    for comp in reachable_sccs(succ, init) {
        let cyclic = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
        if !cyclic {
            continue;
        }
        if sets
            .iter()
            .all(|set| comp.iter().any(|&s| set[s]))
        {
            return true;
        }
    }
    false
}
