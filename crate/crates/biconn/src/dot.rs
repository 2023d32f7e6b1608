//! DOT export with stable node ordering. Terminals render as boxes, link
//! nodes as ellipses.

use std::fmt::Write;

use crate::crossing::SeparabilityGraph;
use crate::graph::Graph;
use crate::incidence::{IncidenceGraph, IncNode};

pub fn graph_dot(g: &Graph) -> String {
    let mut out = String::from("graph g {\n  node [shape=ellipse];\n");
    for v in 0..g.n() {
        writeln!(out, "  n{v} [label=\"{v}\"];").unwrap();
    }
    for e in g.edges() {
        writeln!(out, "  n{} -- n{};", e.u, e.v).unwrap();
    }
    out.push_str("}\n");
    out
}

fn incidence_label(node: &IncNode, h: &IncidenceGraph) -> String {
    let _ = h;
    match node {
        IncNode::Link(f) => format!("f{f}"),
        IncNode::TreeNode(v) => format!("v{v}"),
        IncNode::TreeEdge(e) => format!("e{e}"),
    }
}

pub fn incidence_dot(h: &IncidenceGraph) -> String {
    let mut out = String::from("graph incidence {\n");
    for (i, node) in h.nodes.iter().enumerate() {
        let shape = if h.is_terminal(i) { "box" } else { "ellipse" };
        writeln!(
            out,
            "  n{i} [label=\"{}\", shape={shape}];",
            incidence_label(node, h)
        )
        .unwrap();
    }
    for i in 0..h.n() {
        for j in h.neighbors(i) {
            if i < j {
                writeln!(out, "  n{i} -- n{j};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn separability_dot(h: &SeparabilityGraph) -> String {
    let mut out = String::from("graph separability {\n");
    let nc = h.cores.len();
    for (i, core) in h.cores.iter().enumerate() {
        let label: Vec<String> = core.nodes().iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "  n{i} [label=\"{{{}}}\", shape=box];",
            label.join(",")
        )
        .unwrap();
    }
    for (k, &(u, v)) in h.edges_j.iter().enumerate() {
        writeln!(
            out,
            "  n{} [label=\"({u},{v})\", shape=ellipse];",
            nc + k
        )
        .unwrap();
    }
    for i in 0..h.n() {
        for j in h.neighbors(i) {
            if i < j {
                writeln!(out, "  n{i} -- n{j};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
