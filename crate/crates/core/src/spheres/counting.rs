use std::collections::{BTreeMap, BTreeSet};

use super::TreeCover;
use crate::error::{Error, Result};
use crate::tree::Edge;

/// Weighted leaf-preimage counts on both sides of one source edge, from which
/// the local degree of the edge can be read off for any admissible pair of
/// target leaves.
#[derive(Debug, Clone)]
pub struct EdgeCounts {
    edge: Edge,
    /// Counts per target leaf in the component of the first endpoint.
    near: BTreeMap<String, u32>,
    /// Counts per target leaf in the component of the second endpoint.
    far: BTreeMap<String, u32>,
    /// Target leaves on the side of the image of the first endpoint.
    near_targets: BTreeSet<String>,
    all_targets: BTreeSet<String>,
}

impl EdgeCounts {
    pub fn new(c: &TreeCover, e: &Edge) -> Result<Self> {
        let src = c.source.tree();
        let tgt = c.target.tree();
        let (a, b) = e.ends();
        if !src.has_edge(a, b) {
            return Err(Error::InvalidArgument(format!("{e} is not a source edge")));
        }
        let (fa, fb) = match (c.image(a), c.image(b)) {
            (Some(fa), Some(fb)) if tgt.has_edge(fa, fb) => (fa, fb),
            _ => {
                return Err(Error::CorruptCover(format!(
                    "{e} does not map to a target edge"
                )))
            }
        };

        let ia = src.idx(a)?;
        let side = src.component_ids(src.idx(b)?);
        let mut near = BTreeMap::new();
        let mut far = BTreeMap::new();
        for y in src.leaves() {
            let p = c
                .portrait
                .get(y)
                .ok_or_else(|| Error::CorruptCover(format!("leaf {y} missing from portrait")))?;
            let bucket = if side[src.idx(y)?] == side[ia] {
                &mut near
            } else {
                &mut far
            };
            *bucket.entry(p.image.clone()).or_insert(0) += p.degree;
        }

        let ifa = tgt.idx(fa)?;
        let tside = tgt.component_ids(tgt.idx(fb)?);
        let mut near_targets = BTreeSet::new();
        let mut all_targets = BTreeSet::new();
        for z in tgt.leaves() {
            if tside[tgt.idx(z)?] == tside[ifa] {
                near_targets.insert(z.to_owned());
            }
            all_targets.insert(z.to_owned());
        }
        Ok(EdgeCounts {
            edge: e.clone(),
            near,
            far,
            near_targets,
            all_targets,
        })
    }

    pub fn edge(&self) -> &Edge {
        &self.edge
    }

    /// Target leaves on the side of the image of the first endpoint, then the rest.
    pub fn target_sides(&self) -> (Vec<&str>, Vec<&str>) {
        self.all_targets
            .iter()
            .map(String::as_str)
            .partition(|z| self.near_targets.contains(*z))
    }

    /// `|#(D ∩ F⁻¹(z)) − #(D ∩ F⁻¹(z2))|` with multiplicity, checked to agree
    /// for both components `D` of the source minus the edge.
    pub fn degree(&self, z: &str, z2: &str) -> Result<u32> {
        for l in [z, z2] {
            if !self.all_targets.contains(l) {
                return Err(Error::InvalidArgument(format!("{l} is not a target leaf")));
            }
        }
        if self.near_targets.contains(z) == self.near_targets.contains(z2) {
            return Err(Error::InvalidArgument(format!(
                "{z} and {z2} lie on the same side of the image of {}",
                self.edge
            )));
        }
        let count = |m: &BTreeMap<String, u32>, l: &str| i64::from(m.get(l).copied().unwrap_or(0));
        let near = (count(&self.near, z) - count(&self.near, z2)).unsigned_abs();
        let far = (count(&self.far, z) - count(&self.far, z2)).unsigned_abs();
        if near != far {
            return Err(Error::CorruptCover(format!(
                "edge {}: counting gives {near} on one side and {far} on the other for ({z}, {z2})",
                self.edge
            )));
        }
        Ok(near as u32)
    }
}

/// Local degree of a source edge recovered by counting leaf preimages of two
/// target leaves separated by the image edge.
pub fn edge_degree_by_counting(c: &TreeCover, e: &Edge, z: &str, z2: &str) -> Result<u32> {
    EdgeCounts::new(c, e)?.degree(z, z2)
}

fn check_arc_preconditions(c: &TreeCover, v: &str, w: &str) -> Result<()> {
    let annulus = c.source.tree().annulus(v, w)?;
    if let Some(l) = c.critical_leaves().iter().find(|l| annulus.contains(*l)) {
        return Err(Error::InvalidArgument(format!(
            "critical leaf {l} lies in the annulus between {v} and {w}"
        )));
    }
    Ok(())
}

/// The degree shared by every vertex and edge end on the source arc `[v, w]`,
/// provided the arc maps onto the target arc `[F(v), F(w)]`.
pub fn common_arc_degree(c: &TreeCover, v: &str, w: &str) -> Result<Option<u32>> {
    check_arc_preconditions(c, v, w)?;
    let arc = c.source.tree().arc(v, w)?;
    let mut degrees = Vec::new();
    for u in &arc {
        degrees.push(c.vertex_degree(u));
    }
    for pair in arc.windows(2) {
        degrees.push(c.edge_end_degree(&pair[0], &pair[1]));
        degrees.push(c.edge_end_degree(&pair[1], &pair[0]));
    }
    let first = degrees[0];
    if first.is_none() || degrees.iter().any(|d| *d != first) {
        return Ok(None);
    }
    let image: Option<Vec<&str>> = arc.iter().map(|u| c.image(u)).collect();
    let (Some(image), Some(fv), Some(fw)) = (image, c.image(v), c.image(w)) else {
        return Ok(None);
    };
    let target_arc = c.target.tree().arc(fv, fw)?;
    if image != target_arc.iter().map(String::as_str).collect::<Vec<_>>() {
        return Ok(None);
    }
    Ok(first)
}

/// True iff everything on `[v, w]` has one degree and the arc maps onto
/// `[F(v), F(w)]`. The annulus between `v` and `w` must avoid critical leaves.
pub fn check_arc_degree(c: &TreeCover, v: &str, w: &str) -> Result<bool> {
    Ok(common_arc_degree(c, v, w)?.is_some())
}
