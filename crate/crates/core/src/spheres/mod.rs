//! Trees of spheres and covers between them.
//!
//! A sphere carries no complex structure here: it is exactly its finite set of
//! attaching points, and a cover is recorded through point images and local
//! degrees at those points.

mod counting;
mod project;
mod system;
mod translation;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{CombinatorialTree, Edge, TreeDoc};

pub use counting::{check_arc_degree, common_arc_degree, edge_degree_by_counting, EdgeCounts};
pub use project::project_cover;
pub use system::{validate_system, DynamicalTreeSystem};
pub use translation::{check_translation, DynamicalTreeMap, EdgeDegree, TreeMapDoc};
pub use validate::{global_degree, validate_cover};

/// Attachments of one tree: internal vertex → neighbor → attaching-point label.
pub type Attachments = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedTreeDoc {
    pub vertices: Vec<String>,
    pub leaves: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub attachments: Attachments,
}

/// A tree whose internal vertices carry a sphere with one distinct attaching
/// point per adjacent edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MarkedTreeDoc", into = "MarkedTreeDoc")]
pub struct MarkedTreeOfSpheres {
    tree: CombinatorialTree,
    attachments: Attachments,
}

impl TryFrom<MarkedTreeDoc> for MarkedTreeOfSpheres {
    type Error = Error;

    fn try_from(doc: MarkedTreeDoc) -> Result<Self> {
        let tree = CombinatorialTree::try_from(TreeDoc {
            vertices: doc.vertices,
            leaves: doc.leaves,
            edges: doc.edges,
        })?;
        MarkedTreeOfSpheres::new(tree, doc.attachments)
    }
}

impl From<MarkedTreeOfSpheres> for MarkedTreeDoc {
    fn from(m: MarkedTreeOfSpheres) -> Self {
        let TreeDoc {
            vertices,
            leaves,
            edges,
        } = m.tree.to_doc();
        MarkedTreeDoc {
            vertices,
            leaves,
            edges,
            attachments: m.attachments,
        }
    }
}

impl MarkedTreeOfSpheres {
    /// Checks that every internal vertex has exactly one attaching point per
    /// adjacent edge, pairwise distinct, and that leaves carry none.
    pub fn new(tree: CombinatorialTree, attachments: Attachments) -> Result<Self> {
        for (v, points) in &attachments {
            if !tree.is_internal(v) {
                return Err(Error::InvalidTree(format!(
                    "attachments given for {v}, which is not an internal vertex"
                )));
            }
            let nbrs: BTreeSet<&str> = tree.neighbors(v)?.into_iter().collect();
            let keys: BTreeSet<&str> = points.keys().map(String::as_str).collect();
            if nbrs != keys {
                return Err(Error::InvalidTree(format!(
                    "attachments at {v} must cover exactly its edges"
                )));
            }
            let distinct: BTreeSet<&String> = points.values().collect();
            if distinct.len() != points.len() {
                return Err(Error::InvalidTree(format!(
                    "attaching points at {v} are not distinct"
                )));
            }
        }
        if let Some(v) = tree.internal().find(|v| !attachments.contains_key(*v)) {
            return Err(Error::InvalidTree(format!(
                "internal vertex {v} has no attachments"
            )));
        }
        Ok(MarkedTreeOfSpheres { tree, attachments })
    }

    /// Marks every edge `{v, w}` at `v` by the label of `w`.
    pub fn with_neighbor_labels(tree: CombinatorialTree) -> Self {
        let attachments = tree
            .internal()
            .map(|v| {
                let points = tree
                    .neighbors(v)
                    .expect("vertex of the tree")
                    .into_iter()
                    .map(|w| (w.to_owned(), w.to_owned()))
                    .collect();
                (v.to_owned(), points)
            })
            .collect();
        MarkedTreeOfSpheres { tree, attachments }
    }

    pub fn tree(&self) -> &CombinatorialTree {
        &self.tree
    }

    pub fn attachments(&self) -> &Attachments {
        &self.attachments
    }

    /// Attaching point at `v` of the edge towards the neighbor `w`.
    pub fn point(&self, v: &str, w: &str) -> Option<&str> {
        self.attachments.get(v)?.get(w).map(String::as_str)
    }

    /// The neighbor of `v` whose edge is attached at the point `p`.
    pub fn neighbor_at(&self, v: &str, p: &str) -> Option<&str> {
        self.attachments
            .get(v)?
            .iter()
            .find(|(_, q)| q.as_str() == p)
            .map(|(w, _)| w.as_str())
    }

    /// All attaching points at `v` (empty for leaves).
    pub fn points(&self, v: &str) -> BTreeSet<&str> {
        self.attachments
            .get(v)
            .map(|m| m.values().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn into_parts(self) -> (CombinatorialTree, Attachments) {
        (self.tree, self.attachments)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitEntry {
    pub image: String,
    pub degree: u32,
}

/// A map between trees of spheres together with its sphere-level data.
///
/// `point_images[v][p]` is the image under the sphere map at `v` of the
/// attaching point `p`; `local_degrees[v][p]` its local degree. Leaves carry
/// their degree in `portrait`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeCover {
    pub source: MarkedTreeOfSpheres,
    pub target: MarkedTreeOfSpheres,
    pub vertex_map: BTreeMap<String, String>,
    pub local_degrees: BTreeMap<String, BTreeMap<String, u32>>,
    pub point_images: BTreeMap<String, BTreeMap<String, String>>,
    pub portrait: BTreeMap<String, PortraitEntry>,
}

impl TreeCover {
    /// The identity cover of a marked tree: every degree is 1.
    pub fn identity(tree: &MarkedTreeOfSpheres) -> Self {
        let t = tree.tree();
        let vertex_map = t.vertices().map(|v| (v.to_owned(), v.to_owned())).collect();
        let mut local_degrees = BTreeMap::new();
        let mut point_images = BTreeMap::new();
        for (v, pts) in tree.attachments() {
            local_degrees.insert(v.clone(), pts.values().map(|p| (p.clone(), 1)).collect());
            point_images.insert(
                v.clone(),
                pts.values().map(|p| (p.clone(), p.clone())).collect(),
            );
        }
        let portrait = t
            .leaves()
            .map(|l| {
                (
                    l.to_owned(),
                    PortraitEntry {
                        image: l.to_owned(),
                        degree: 1,
                    },
                )
            })
            .collect();
        TreeCover {
            source: tree.clone(),
            target: tree.clone(),
            vertex_map,
            local_degrees,
            point_images,
            portrait,
        }
    }

    pub fn image(&self, v: &str) -> Option<&str> {
        self.vertex_map.get(v).map(String::as_str)
    }

    /// Image of a source edge, when both endpoints are mapped.
    pub fn edge_image(&self, e: &Edge) -> Option<Edge> {
        let (a, b) = e.ends();
        Some(Edge::new(self.image(a)?, self.image(b)?))
    }

    /// Local degree of the sphere map at `v` on the edge towards `w`. For a
    /// leaf `v` this is its portrait degree.
    pub fn edge_end_degree(&self, v: &str, w: &str) -> Option<u32> {
        if self.source.tree().is_leaf(v) {
            return self.portrait.get(v).map(|p| p.degree);
        }
        let p = self.source.point(v, w)?;
        self.local_degrees.get(v)?.get(p).copied()
    }

    /// Fiber sums of the sphere map at the internal vertex `v`: for every
    /// attaching point of `F(v)`, the total local degree mapping onto it.
    pub fn fiber_sums(&self, v: &str) -> Option<BTreeMap<String, u32>> {
        let target_v = self.image(v)?;
        let mut sums: BTreeMap<String, u32> = self
            .target
            .points(target_v)
            .into_iter()
            .map(|q| (q.to_owned(), 0))
            .collect();
        let degs = self.local_degrees.get(v)?;
        let imgs = self.point_images.get(v)?;
        for (p, d) in degs {
            if let Some(s) = imgs.get(p).and_then(|q| sums.get_mut(q)) {
                *s += d;
            }
        }
        Some(sums)
    }

    /// Degree of the sphere map at `v`: the most common fiber sum (ties go to
    /// the smaller value); the portrait degree for leaves.
    pub fn vertex_degree(&self, v: &str) -> Option<u32> {
        if self.source.tree().is_leaf(v) {
            return self.portrait.get(v).map(|p| p.degree);
        }
        let sums = self.fiber_sums(v)?;
        let mut freq: BTreeMap<u32, usize> = BTreeMap::new();
        for s in sums.values() {
            *freq.entry(*s).or_default() += 1;
        }
        freq.iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(d, _)| *d)
    }

    /// Source leaves of degree at least 2.
    pub fn critical_leaves(&self) -> BTreeSet<String> {
        self.portrait
            .iter()
            .filter(|(_, p)| p.degree >= 2)
            .map(|(l, _)| l.clone())
            .collect()
    }

    /// Images of the critical leaves.
    pub fn critical_values(&self) -> BTreeSet<String> {
        self.portrait
            .values()
            .filter(|p| p.degree >= 2)
            .map(|p| p.image.clone())
            .collect()
    }

    /// Source leaves mapping to the target leaf `z`.
    pub fn leaf_preimages(&self, z: &str) -> Vec<(&str, u32)> {
        self.portrait
            .iter()
            .filter(|(_, p)| p.image == z)
            .map(|(l, p)| (l.as_str(), p.degree))
            .collect()
    }
}
