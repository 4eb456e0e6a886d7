use std::fmt::Write;

use super::{CongestionTable, TreeEmbedding};
use crate::harness::round_sig;

/// Graphviz rendering: nodes labelled by representative, edges by capacity and path.
pub fn to_dot(tree: &TreeEmbedding) -> String {
    let mut out = String::from("digraph tree {\n  node [shape=box];\n");
    for (i, node) in tree.nodes().iter().enumerate() {
        let shape = if node.children.is_empty() { ", shape=ellipse" } else { "" };
        let _ = writeln!(out, "  t{i} [label=\"{i}: rep {}\"{shape}];", node.representative);
    }
    for f in tree.tree_edges() {
        let path: Vec<String> = f.path.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(
            out,
            "  t{} -> t{} [label=\"y={} [{}]\"];",
            f.parent,
            f.child,
            round_sig(f.capacity),
            path.join(" ")
        );
    }
    out.push_str("}\n");
    out
}

/// `edge,capacity,expected_load,rload` rows for every graph edge.
pub fn rload_csv(table: &CongestionTable, caps: &[f64]) -> String {
    let mut out = String::from("edge,capacity,expected_load,rload\n");
    for (e, (&l, &r)) in table.expected_load.iter().zip(&table.rload).enumerate() {
        let _ = writeln!(out, "{e},{},{},{}", round_sig(caps[e]), round_sig(l), round_sig(r));
    }
    out
}
