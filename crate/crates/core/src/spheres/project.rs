use std::collections::{BTreeMap, BTreeSet};

use super::{validate_cover, Attachments, MarkedTreeOfSpheres, TreeCover};
use crate::error::{Error, Result};
use crate::tree::CombinatorialTree;

/// The tree spanned by a set of kept leaves: internal vertices separating at
/// least three kept leaves, joined along the arcs of the original tree, with
/// attaching points inherited from the first edge of each arc.
pub(crate) fn restrict(
    marked: &MarkedTreeOfSpheres,
    keep: &BTreeSet<String>,
) -> Result<MarkedTreeOfSpheres> {
    let t = marked.tree();
    let n = t.len();
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            t.neighbors(t.label(i))
                .expect("vertex of the tree")
                .into_iter()
                .map(|w| t.idx(w).expect("vertex of the tree"))
                .collect()
        })
        .collect();
    let is_kept_leaf: Vec<bool> = (0..n).map(|i| keep.contains(t.label(i))).collect();

    // Kept-leaf counts below each vertex of a tree rooted at 0.
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![0usize];
    parent[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in &nbrs[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let mut below = vec![0usize; n];
    for &u in order.iter().rev() {
        if is_kept_leaf[u] {
            below[u] += 1;
        }
        if u != 0 {
            below[parent[u]] += below[u];
        }
    }
    let total = below[0];
    // Kept leaves beyond `w` as seen from its neighbor `u`.
    let toward = |u: usize, w: usize| {
        if parent[w] == u && w != 0 {
            below[w]
        } else {
            total - below[u]
        }
    };

    let kept_internal: Vec<bool> = (0..n)
        .map(|u| {
            !t.is_leaf(t.label(u)) && nbrs[u].iter().filter(|&&w| toward(u, w) > 0).count() >= 3
        })
        .collect();
    let kept = |u: usize| is_kept_leaf[u] || kept_internal[u];

    let mut vertices = Vec::new();
    let mut edges = BTreeSet::new();
    let mut attachments: Attachments = BTreeMap::new();
    for u in (0..n).filter(|&u| kept(u)) {
        vertices.push(t.label(u).to_owned());
        for &w in &nbrs[u] {
            if toward(u, w) == 0 {
                continue;
            }
            let (mut prev, mut cur) = (u, w);
            while !kept(cur) {
                let next = nbrs[cur]
                    .iter()
                    .copied()
                    .find(|&x| x != prev && toward(cur, x) > 0)
                    .expect("a suppressed vertex has exactly one way forward");
                prev = cur;
                cur = next;
            }
            let (a, b) = (t.label(u).to_owned(), t.label(cur).to_owned());
            edges.insert(if a < b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            });
            if kept_internal[u] {
                let p = marked
                    .point(&a, t.label(w))
                    .expect("internal vertices carry attachments")
                    .to_owned();
                attachments.entry(a).or_default().insert(b, p);
            }
        }
    }
    let leaves: Vec<String> = keep.iter().cloned().collect();
    let tree = CombinatorialTree::new(vertices, leaves, edges)?;
    MarkedTreeOfSpheres::new(tree, attachments)
}

/// The unique cover `𝒯^{F⁻¹(Z')} → 𝒯^{Z'}` below `c`: the target keeps the
/// vertices separating at least three leaves of `zprime`, the source keeps
/// their preimages, and all sphere data is inherited.
pub fn project_cover(c: &TreeCover, zprime: &BTreeSet<String>) -> Result<TreeCover> {
    if zprime.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "projection needs at least 3 leaves, got {}",
            zprime.len()
        )));
    }
    let tgt = c.target.tree();
    if let Some(z) = zprime.iter().find(|z| !tgt.is_leaf(z)) {
        return Err(Error::InvalidArgument(format!("{z} is not a target leaf")));
    }
    if let Some(z) = c.critical_values().iter().find(|z| !zprime.contains(*z)) {
        return Err(Error::InvalidArgument(format!(
            "critical value {z} is missing from the leaf set"
        )));
    }

    let target = restrict(&c.target, zprime)?;
    let yprime: BTreeSet<String> = c
        .portrait
        .iter()
        .filter(|(_, p)| zprime.contains(&p.image))
        .map(|(y, _)| y.clone())
        .collect();
    let source = restrict(&c.source, &yprime)?;

    let expected: BTreeSet<&str> = c
        .source
        .tree()
        .internal()
        .filter(|v| c.image(v).is_some_and(|w| target.tree().is_internal(w)))
        .collect();
    let got: BTreeSet<&str> = source.tree().internal().collect();
    if expected != got {
        let diff: Vec<&str> = expected.symmetric_difference(&got).copied().collect();
        return Err(Error::CorruptCover(format!(
            "surviving source vertices are not the preimages of surviving target vertices: {}",
            diff.join(", ")
        )));
    }

    let vertex_map = source
        .tree()
        .vertices()
        .map(|v| (v.to_owned(), c.vertex_map[v].clone()))
        .collect();
    let mut local_degrees = BTreeMap::new();
    let mut point_images = BTreeMap::new();
    for (v, pts) in source.attachments() {
        let fv = &c.vertex_map[v];
        let target_points = target.points(fv);
        let mut degs = BTreeMap::new();
        let mut imgs = BTreeMap::new();
        for p in pts.values() {
            let q = &c.point_images[v][p];
            if !target_points.contains(q.as_str()) {
                return Err(Error::CorruptCover(format!(
                    "point {p} at {v} maps to {q}, which does not survive at {fv}"
                )));
            }
            degs.insert(p.clone(), c.local_degrees[v][p]);
            imgs.insert(p.clone(), q.clone());
        }
        local_degrees.insert(v.clone(), degs);
        point_images.insert(v.clone(), imgs);
    }
    let portrait = yprime
        .iter()
        .map(|y| (y.clone(), c.portrait[y].clone()))
        .collect();

    let out = TreeCover {
        source,
        target,
        vertex_map,
        local_degrees,
        point_images,
        portrait,
    };
    let report = validate_cover(&out);
    if !report.is_empty() {
        return Err(Error::CorruptCover(format!(
            "projected cover is invalid:\n{report}"
        )));
    }
    Ok(out)
}
