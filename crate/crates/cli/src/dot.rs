//! Graphviz DOT rendering of trees, covers and dynamical systems.

use std::collections::BTreeMap;
use std::fmt::Write;

use graftree_core::dynamics::find_cycles;
use graftree_core::{CombinatorialTree, DynamicalTreeSystem, Edge, Result, TreeCover};

const PALETTE: [&str; 8] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn header(name: &str) -> String {
    format!(
        "graph {} {{\n  node [shape=circle, fontsize=10];\n  edge [fontsize=9];\n",
        quote(name)
    )
}

/// Degree carried by a source edge: the local degree at an internal endpoint,
/// or the portrait degree when both ends are leaves.
fn edge_degree(c: &TreeCover, e: &Edge) -> Option<u32> {
    let (a, b) = e.ends();
    if c.source.tree().is_internal(a) {
        c.edge_end_degree(a, b)
    } else {
        c.edge_end_degree(b, a)
    }
}

fn node_line(out: &mut String, v: &str, leaf: bool, extra: &str) {
    let shape = if leaf { "shape=plaintext, " } else { "" };
    writeln!(out, "  {} [{shape}label={}{extra}];", quote(v), quote(v)).unwrap();
}

fn edges(out: &mut String, tree: &CombinatorialTree, label: impl Fn(&Edge) -> Option<String>) {
    for e in tree.edges() {
        let (a, b) = e.ends();
        match label(&e) {
            Some(l) => {
                writeln!(out, "  {} -- {} [label={}];", quote(a), quote(b), quote(&l)).unwrap()
            }
            None => writeln!(out, "  {} -- {};", quote(a), quote(b)).unwrap(),
        }
    }
}

pub fn tree_to_dot(tree: &CombinatorialTree) -> String {
    let mut out = header("tree");
    for v in tree.vertices() {
        node_line(&mut out, v, tree.is_leaf(v), "");
    }
    edges(&mut out, tree, |_| None);
    out.push_str("}\n");
    out
}

/// The source tree of a cover; every edge carries its degree.
pub fn cover_to_dot(c: &TreeCover) -> String {
    let tree = c.source.tree();
    let mut out = header("cover");
    for v in tree.vertices() {
        let img = c
            .image(v)
            .map(|w| format!(", xlabel={}", quote(&format!("→ {w}"))))
            .unwrap_or_default();
        node_line(&mut out, v, tree.is_leaf(v), &img);
    }
    edges(&mut out, tree, |e| {
        Some(edge_degree(c, e).map_or_else(|| "?".to_owned(), |d| d.to_string()))
    });
    out.push_str("}\n");
    out
}

/// The dynamical tree of a system: edges carry degrees, fixed internal
/// vertices are drawn with a double circle and every periodic sphere cycle is
/// filled with its own color (bold outline when critical).
pub fn system_to_dot(sys: &DynamicalTreeSystem) -> Result<String> {
    let c = &sys.cover;
    let tree = sys.x_tree();
    let cycles = find_cycles(sys)?;
    let mut style: BTreeMap<&str, String> = BTreeMap::new();
    for (i, cyc) in cycles.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pen = if cyc.is_critical() { 3 } else { 1 };
        for v in &cyc.vertices {
            let shape = if cyc.period == 1 {
                "shape=doublecircle, "
            } else {
                ""
            };
            style.insert(
                v.as_str(),
                format!(
                    ", {shape}style=filled, fillcolor={}, penwidth={pen}",
                    quote(color)
                ),
            );
        }
    }

    let mut out = header("dynamical tree");
    for (i, cyc) in cycles.iter().enumerate() {
        writeln!(
            out,
            "  // cycle {i}: {} (period {}, return degree {})",
            cyc.vertices.join(" -> "),
            cyc.period,
            cyc.return_degree
        )
        .unwrap();
    }
    for v in tree.vertices() {
        let mut extra = c
            .image(v)
            .map(|w| format!(", xlabel={}", quote(&format!("→ {w}"))))
            .unwrap_or_default();
        if let Some(s) = style.get(v) {
            extra.push_str(s);
        }
        node_line(&mut out, v, tree.is_leaf(v), &extra);
    }
    edges(&mut out, tree, |e| {
        Some(edge_degree(c, e).map_or_else(|| "?".to_owned(), |d| d.to_string()))
    });
    out.push_str("}\n");
    Ok(out)
}
