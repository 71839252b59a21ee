use std::fmt::Write;

use super::Configuration;

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Output order follows declaration order only, so equal inputs give equal bytes.
pub(super) fn export(c: &Configuration) -> String {
    let graph = c.arrowed_graph();
    let mut out = String::new();
    out.push_str("digraph configuration {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=circle, fontsize=10];\n");
    for v in &graph.vertices {
        let id = quote(v.as_str());
        writeln!(out, "  {id} [label={id}];").unwrap();
    }
    for (q, p) in &graph.proximity_edges {
        writeln!(out, "  {} -> {} [style=solid];", quote(q.as_str()), quote(p.as_str())).unwrap();
    }
    for (i, arrow) in graph.arrows.iter().enumerate() {
        let node = quote(&format!("arrow{i}"));
        let label = quote(&format!("{} ({})", arrow.curve, arrow.kind));
        writeln!(out, "  {node} [shape=plaintext, label={label}];").unwrap();
        if let Some(target) = &arrow.target {
            writeln!(out, "  {node} -> {} [arrowhead=vee];", quote(target.as_str())).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
