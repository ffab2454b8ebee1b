use std::fmt::Write;

use super::{Judgment, Justification, PremiseItem, ProofGraph};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; marked lifts are dashed and red.
pub fn to_dot(p: &ProofGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph proof {{");
    let _ = writeln!(out, "  node [shape=box, fontname=monospace];");
    for (k, n) in p.nodes.iter().enumerate() {
        let (s, t) = p.goal_terms(k);
        let rel = match n.judgment {
            Judgment::Rel => match p.kind.name() {
                "ieq" => "∞=",
                "bi" => "∞→",
                _ => "→∞",
            },
            Judgment::Down => "⇁",
            Judgment::DownFin => "⇁·",
        };
        let mut label = format!("{k}: {s} {rel} {t}\\n[{}]", n.rule.name());
        if let Justification::Split(items) = &n.rule {
            for item in items {
                if let PremiseItem::Step(st) = item {
                    let _ = write!(
                        label,
                        "\\n{} →ε {} (rule {}, {})",
                        p.terms[st.source], p.terms[st.target], st.rule, st.direction
                    );
                }
            }
        }
        let style = match n.judgment {
            Judgment::DownFin => ", style=dashed, color=red",
            Judgment::Down => ", style=rounded",
            Judgment::Rel => "",
        };
        let peripheries = if k == p.root { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  n{k} [label=\"{}\"{style}{peripheries}];", escape(&label).replace("\\\\n", "\\n"));
    }
    for k in 0..p.nodes.len() {
        for (i, j) in p.successors(k).into_iter().enumerate() {
            let _ = writeln!(out, "  n{k} -> n{j} [label=\"{}\"];", i + 1);
        }
    }
    out.push_str("}\n");
    out
}
