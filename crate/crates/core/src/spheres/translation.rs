use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{project_cover, DynamicalTreeSystem};
use crate::error::Error;
use crate::report::{Report, ViolationKind as K};
use crate::tree::{
    assert_stable_equality, embed_by_triples, is_compatible, CombinatorialTree, Edge,
};

/// A self-map of a tree with degrees on vertices and edges: the tree-level
/// shadow of a dynamical system, independent of any sphere data. Images may
/// leave the tree (escaping vertices), so they are plain labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeMapDoc", into = "TreeMapDoc")]
pub struct DynamicalTreeMap {
    pub tree: CombinatorialTree,
    pub image: BTreeMap<String, String>,
    pub vertex_degree: BTreeMap<String, u32>,
    pub edge_degree: BTreeMap<Edge, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDegree {
    pub edge: [String; 2],
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeMapDoc {
    pub tree: CombinatorialTree,
    pub image: BTreeMap<String, String>,
    pub vertex_degree: BTreeMap<String, u32>,
    pub edge_degree: Vec<EdgeDegree>,
}

impl TryFrom<TreeMapDoc> for DynamicalTreeMap {
    type Error = Error;

    fn try_from(doc: TreeMapDoc) -> Result<Self, Error> {
        let mut edge_degree = BTreeMap::new();
        for EdgeDegree {
            edge: [a, b],
            degree,
        } in doc.edge_degree
        {
            if !doc.tree.has_edge(&a, &b) {
                return Err(Error::Parse(format!(
                    "edge degree given for {a}--{b}, which is not an edge"
                )));
            }
            edge_degree.insert(Edge::new(a, b), degree);
        }
        Ok(DynamicalTreeMap {
            tree: doc.tree,
            image: doc.image,
            vertex_degree: doc.vertex_degree,
            edge_degree,
        })
    }
}

impl From<DynamicalTreeMap> for TreeMapDoc {
    fn from(m: DynamicalTreeMap) -> Self {
        TreeMapDoc {
            tree: m.tree,
            image: m.image,
            vertex_degree: m.vertex_degree,
            edge_degree: m
                .edge_degree
                .into_iter()
                .map(|(e, degree)| {
                    let (a, b) = e.ends();
                    EdgeDegree {
                        edge: [a.to_owned(), b.to_owned()],
                        degree,
                    }
                })
                .collect(),
        }
    }
}

impl DynamicalTreeMap {
    /// Reads the tree map off a system by restricting its cover to `𝒯^X`.
    pub fn restrict(sys: &DynamicalTreeSystem) -> Self {
        let c = &sys.cover;
        let tree = sys.x_tree().clone();
        let image = tree
            .vertices()
            .filter_map(|v| c.image(v).map(|w| (v.to_owned(), w.to_owned())))
            .collect();
        let vertex_degree = tree
            .vertices()
            .filter_map(|v| c.vertex_degree(v).map(|d| (v.to_owned(), d)))
            .collect();
        let edge_degree = tree
            .edges()
            .into_iter()
            .filter_map(|e| {
                let (a, b) = e.ends();
                let d = x_edge_end_degree(sys, a, b).or_else(|| x_edge_end_degree(sys, b, a))?;
                Some((e, d))
            })
            .collect();
        DynamicalTreeMap {
            tree,
            image,
            vertex_degree,
            edge_degree,
        }
    }
}

/// Local degree at `v` of the `𝒯^X` edge towards `w`, read through the
/// identified attaching point.
fn x_edge_end_degree(sys: &DynamicalTreeSystem, v: &str, w: &str) -> Option<u32> {
    let c = &sys.cover;
    if sys.x_tree().is_leaf(v) {
        return c.portrait.get(v).map(|p| p.degree);
    }
    let p = sys.dynamic.point(v, w)?;
    c.local_degrees.get(v)?.get(p).copied()
}

/// Cross-checks a tree-level map against a system: its tree equals `𝒯^X` up
/// to relabeling, the preimage tree embeds in `𝒯^Y`, the map agrees with `F`,
/// and its degrees agree with the sphere-level local degrees.
pub fn check_translation(sys: &DynamicalTreeSystem, tm: &DynamicalTreeMap) -> Report {
    let mut r = Report::new();
    let x = sys.x_tree();

    let map = match embed_by_triples(&tm.tree, x) {
        Ok(map) => map,
        Err(e) => {
            r.push(
                K::Translation,
                "tree",
                format!("tree map does not embed in the dynamical tree: {e}"),
            );
            return r;
        }
    };
    let relabeled = match tm.tree.relabel(&map) {
        Ok(t) => t,
        Err(e) => {
            r.push(K::Translation, "tree", format!("relabeling failed: {e}"));
            return r;
        }
    };
    match assert_stable_equality(&relabeled, x) {
        Ok(true) => {}
        Ok(false) => {
            r.push(
                K::Translation,
                "tree",
                "tree map and dynamical tree differ as graphs",
            );
            return r;
        }
        Err(e) => {
            r.push(
                K::Translation,
                "tree",
                format!("trees are not comparable: {e}"),
            );
            return r;
        }
    }
    let name = |v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_owned());

    // Preimage tree of the dynamical leaves.
    let leaves: BTreeSet<String> = x.leaf_set();
    match project_cover(&sys.cover, &leaves) {
        Err(e) => r.push(
            K::Translation,
            "preimage-tree",
            format!("projection onto the dynamical leaves failed: {e}"),
        ),
        Ok(proj) => {
            let pre = proj.source.tree();
            if !pre.is_stable() {
                r.push(
                    K::Translation,
                    "preimage-tree",
                    "preimage tree is not stable",
                );
            } else if let Err(e) = embed_by_triples(pre, sys.y_tree()) {
                r.push(
                    K::Translation,
                    "preimage-tree",
                    format!("preimage tree does not embed in the source tree: {e}"),
                );
            } else if !is_compatible(pre, sys.y_tree()) {
                r.push(
                    K::Translation,
                    "preimage-tree",
                    "preimage tree is not compatible with the source tree",
                );
            }
            for v in x.internal() {
                if !pre.contains(v) {
                    r.push(
                        K::Translation,
                        v,
                        "internal vertex is missing from the preimage tree",
                    );
                }
            }
        }
    }

    let c = &sys.cover;
    for v in tm.tree.vertices() {
        let xv = name(v);
        let tau = tm.image.get(v).map(|w| name(w));
        let f = c.image(&xv).map(str::to_owned);
        if tau != f {
            r.push(
                K::Translation,
                xv.clone(),
                format!(
                    "tree map sends it to {}, the cover to {}",
                    tau.as_deref().unwrap_or("?"),
                    f.as_deref().unwrap_or("?")
                ),
            );
        }
        let dt = tm.vertex_degree.get(v).copied();
        let dc = c.vertex_degree(&xv);
        if dt != dc {
            r.push(
                K::Translation,
                xv.clone(),
                format!(
                    "vertex degree {} in the tree map, {} in the cover",
                    fmt_opt(dt),
                    fmt_opt(dc)
                ),
            );
        }
    }
    for e in tm.tree.edges() {
        let (a, b) = e.ends();
        let (xa, xb) = (name(a), name(b));
        let dt = tm.edge_degree.get(&e).copied();
        for (u, w) in [(&xa, &xb), (&xb, &xa)] {
            let dc = x_edge_end_degree(sys, u, w);
            if dt != dc {
                r.push(
                    K::Translation,
                    format!("{xa}--{xb}"),
                    format!(
                        "edge degree {} in the tree map, local degree {} at {u}",
                        fmt_opt(dt),
                        fmt_opt(dc)
                    ),
                );
            }
        }
    }
    r
}

fn fmt_opt(d: Option<u32>) -> String {
    d.map_or_else(|| "?".to_owned(), |d| d.to_string())
}
