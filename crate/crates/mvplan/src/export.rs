//! Stable textual dumps and DOT rendering for automata and products.
//!
//! Dump formats are one record per line in state-id order so golden tests
//! can compare them byte for byte.

use std::fmt::Write as _;

use crate::automaton::{Ba, Gba, Guard};
use crate::model::TransitionSystem;
use crate::weighted::{Product, Wba};

fn guard_label(g: &Guard) -> String {
    g.to_string()
}

pub fn gba_dump(g: &Gba) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gba states: {}", g.num_states);
    let _ = writeln!(out, "init: {}", g.init);
    for (i, set) in g.acceptance.iter().enumerate() {
        let ids: Vec<String> = set.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "accepting[{i}]: {}", ids.join(" "));
    }
    for (src, guard, dst) in &g.transitions {
        let _ = writeln!(out, "trans {src} -> {dst} [{}]", guard_label(guard));
    }
    out
}

pub fn ba_dump(b: &Ba) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ba states: {}", b.num_states);
    let _ = writeln!(out, "init: {}", b.init);
    let ids: Vec<String> = b.accepting.iter().map(|q| q.to_string()).collect();
    let _ = writeln!(out, "accepting: {}", ids.join(" "));
    for (src, guard, dst) in &b.transitions {
        let _ = writeln!(out, "trans {src} -> {dst} [{}]", guard_label(guard));
    }
    out
}

pub fn wba_dump(w: &Wba) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "wba states: {}", w.num_states());
    let _ = writeln!(out, "init: {}", w.init);
    for (i, state) in w.states.iter().enumerate() {
        let parts: Vec<String> = state.parts.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "state {i}: ({}) {}", parts.join(","), state.tag);
    }
    for (src, trans) in w.transitions.iter().enumerate() {
        for (guard, dst, weight) in trans {
            let _ = writeln!(
                out,
                "trans {src} -> {dst} [{}] +{weight}",
                guard_label(guard)
            );
        }
    }
    out
}

pub fn product_dump(p: &Product, ts: &TransitionSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "product states: {}", p.num_states());
    let _ = writeln!(out, "init: {}", p.init);
    for (i, &(s, q)) in p.states.iter().enumerate() {
        let acc = if p.accepting[i] { " accepting" } else { "" };
        let _ = writeln!(out, "state {i}: {} q{q}{acc}", ts.states[s]);
    }
    for (src, edges) in p.succ.iter().enumerate() {
        for (dst, weight) in edges {
            let _ = writeln!(out, "trans {src} -> {dst} +{weight}");
        }
    }
    out
}

fn dot_header(out: &mut String, init: usize) {
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    let _ = writeln!(out, "  __init [shape=point];\n  __init -> q{init};");
}

pub fn gba_dot(g: &Gba) -> String {
    let mut out = String::from("digraph gba {\n");
    dot_header(&mut out, g.init);
    for q in 0..g.num_states {
        let sets: Vec<String> = g
            .acceptance
            .iter()
            .enumerate()
            .filter(|(_, set)| set.contains(&q))
            .map(|(i, _)| i.to_string())
            .collect();
        if sets.is_empty() {
            let _ = writeln!(out, "  q{q} [label=\"q{q}\"];");
        } else {
            let _ = writeln!(
                out,
                "  q{q} [shape=doublecircle, label=\"q{q}\\n{{{}}}\"];",
                sets.join(",")
            );
        }
    }
    for (src, guard, dst) in &g.transitions {
        let _ = writeln!(
            out,
            "  q{src} -> q{dst} [label=\"{}\"];",
            guard_label(guard)
        );
    }
    out.push_str("}\n");
    out
}

pub fn ba_dot(b: &Ba) -> String {
    let mut out = String::from("digraph ba {\n");
    dot_header(&mut out, b.init);
    for q in 0..b.num_states {
        if b.accepting.contains(&q) {
            let _ = writeln!(out, "  q{q} [shape=doublecircle];");
        }
    }
    for (src, guard, dst) in &b.transitions {
        let _ = writeln!(
            out,
            "  q{src} -> q{dst} [label=\"{}\"];",
            guard_label(guard)
        );
    }
    out.push_str("}\n");
    out
}

pub fn wba_dot(w: &Wba) -> String {
    let mut out = String::from("digraph wba {\n");
    dot_header(&mut out, w.init);
    for (q, state) in w.states.iter().enumerate() {
        let shape = if w.is_accepting(q) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  q{q} [shape={shape}, label=\"q{q} {}\"];",
            state.tag
        );
    }
    for (src, trans) in w.transitions.iter().enumerate() {
        for (guard, dst, weight) in trans {
            let label = if *weight > 0 {
                format!("{} +{weight}", guard_label(guard))
            } else {
                guard_label(guard)
            };
            let _ = writeln!(out, "  q{src} -> q{dst} [label=\"{label}\"];");
        }
    }
    out.push_str("}\n");
    out
}

pub fn product_dot(p: &Product, ts: &TransitionSystem) -> String {
    let mut out = String::from("digraph product {\n");
    dot_header(&mut out, p.init);
    for (i, &(s, q)) in p.states.iter().enumerate() {
        let shape = if p.accepting[i] {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  q{i} [shape={shape}, label=\"{},q{q}\"];",
            ts.states[s]
        );
    }
    for (src, edges) in p.succ.iter().enumerate() {
        for (dst, weight) in edges {
            let label = if *weight > 0 {
                format!("+{weight}")
            } else {
                String::new()
            };
            let _ = writeln!(out, "  q{src} -> q{dst} [label=\"{label}\"];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{degeneralize, make_nonblocking};
    use crate::ltl::parse_formula;
    use crate::tableau::ltl_to_gba;
    use crate::weighted::build_weighted_ba;

    fn gba(text: &str) -> Gba {
        make_nonblocking(&ltl_to_gba(&parse_formula(text).unwrap()).unwrap())
    }

    #[test]
    fn dumps_are_stable() {
        let g = gba("G F p");
        assert_eq!(gba_dump(&g), gba_dump(&g));
        let b = degeneralize(&g);
        let dump = ba_dump(&b);
        assert!(dump.starts_with("ba states:"));
        assert!(dump.contains("accepting:"));
        let w = build_weighted_ba(&[g], &[4], 10_000).unwrap();
        let wd = wba_dump(&w);
        assert!(wd.contains("+4"));
        assert!(wd.contains("0.0"));
    }

    #[test]
    fn dot_output_is_wellformed() {
        let g = gba("F p");
        let dot = gba_dot(&g);
        assert!(dot.starts_with("digraph gba {"));
        assert!(dot.trim_end().ends_with('}'));
        assert!(dot.contains("doublecircle"));
        let b = degeneralize(&g);
        assert!(ba_dot(&b).contains("__init"));
    }
}
