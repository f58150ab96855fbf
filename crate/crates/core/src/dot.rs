//! Graphviz export of the answer-pair graph.
//!
//! Left nodes are database-1 answers, right nodes database-2 answers, and the
//! edge for each pair is colored by the message that pair reveals.

use std::fmt::Write as _;

use crate::decode::DecodeTable;
use crate::scheme::Scheme;

/// Colors for W_1..W_12; larger K falls back to evenly spaced HSV hues.
pub const PALETTE: [&str; 12] = [
    "red", "yellow", "green", "blue", "orange", "purple", "cyan", "magenta", "brown", "gray",
    "pink", "olive",
];

pub fn message_color(k: usize, total: usize) -> String {
    if total <= PALETTE.len() {
        PALETTE[k].to_string()
    } else {
        format!("\"{:.3} 1.000 1.000\"", k as f64 / total as f64)
    }
}

pub fn export_bipartite_dot(s: &Scheme, t: &DecodeTable) -> String {
    let mut out = String::new();
    out.push_str("graph rspir {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    for (prefix, count, label) in [("A", s.m1(), "database 1"), ("B", s.m2(), "database 2")] {
        let _ = writeln!(out, "  subgraph cluster_{prefix} {{");
        let _ = writeln!(out, "    label=\"{label}\";");
        for i in 1..=count {
            let _ = writeln!(out, "    {prefix}{i};");
        }
        out.push_str("  }\n");
    }
    for (a, row) in t.theta.iter().enumerate() {
        for (b, &k) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                "  A{} -- B{} [color={}, label=\"W{}\"];",
                a + 1,
                b + 1,
                message_color(k, s.k),
                k + 1
            );
        }
    }
    out.push_str("}\n");
    out
}
