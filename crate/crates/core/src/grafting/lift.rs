//! Completing a dynamical system from its dynamical-tree data.
//!
//! Given `𝒯^X` inside `𝒯^Z`, the images and degrees on `𝒯^X`, every fiber of
//! every sphere map that is short of the sphere degree is filled with
//! degree-1 directions, each carrying an isomorphic copy of the target branch
//! it maps onto. The result is a cover whose source is `𝒯^X` plus those copies.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::spheres::{
    validate_system, Attachments, DynamicalTreeSystem, MarkedTreeOfSpheres, PortraitEntry,
    TreeCover,
};
use crate::tree::{CombinatorialTree, Edge};

#[derive(Debug, Clone)]
pub struct LiftSpec {
    /// `𝒯^X`; its edges must be edges of the target tree.
    pub dynamic: MarkedTreeOfSpheres,
    /// `𝒯^Z`, sharing labels and attaching points with `𝒯^X`.
    pub target: MarkedTreeOfSpheres,
    /// Image of every vertex of `𝒯^X`.
    pub image: BTreeMap<String, String>,
    /// Degree of every leaf of `𝒯^X`.
    pub leaf_degree: BTreeMap<String, u32>,
    /// Sphere degree of every internal vertex of `𝒯^X`.
    pub vertex_degree: BTreeMap<String, u32>,
    /// Local degree at each internal vertex of the edge towards each neighbor.
    pub local_degree: BTreeMap<String, BTreeMap<String, u32>>,
}

fn missing(what: &str, v: &str) -> Error {
    Error::InvalidArgument(format!("lift data has no {what} for {v}"))
}

pub fn lift_system(spec: &LiftSpec) -> Result<DynamicalTreeSystem> {
    let x = spec.dynamic.tree();
    let z = spec.target.tree();
    for e in x.edges() {
        let (a, b) = e.ends();
        if !z.has_edge(a, b) {
            return Err(Error::InvalidArgument(format!(
                "edge {e} of the dynamical tree is not a target edge"
            )));
        }
    }

    let mut vertices: Vec<String> = x.vertices().map(str::to_owned).collect();
    let mut leaves: Vec<String> = x.leaves().map(str::to_owned).collect();
    let mut edges: Vec<Edge> = x.edges();
    let mut attachments: Attachments = spec.dynamic.attachments().clone();
    let mut vertex_map: BTreeMap<String, String> = BTreeMap::new();
    let mut local_degrees: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
    let mut point_images: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut portrait: BTreeMap<String, PortraitEntry> = BTreeMap::new();

    for v in x.vertices() {
        let fv = spec.image.get(v).ok_or_else(|| missing("image", v))?;
        if !z.contains(fv) {
            return Err(Error::InvalidArgument(format!(
                "image {fv} of {v} is not a target vertex"
            )));
        }
        vertex_map.insert(v.to_owned(), fv.clone());
    }
    for l in x.leaves() {
        let degree = *spec
            .leaf_degree
            .get(l)
            .ok_or_else(|| missing("leaf degree", l))?;
        portrait.insert(
            l.to_owned(),
            PortraitEntry {
                image: vertex_map[l].clone(),
                degree,
            },
        );
    }

    let mut copies = 0usize;
    for v in x.internal() {
        let fv = vertex_map[v].clone();
        let d = *spec
            .vertex_degree
            .get(v)
            .ok_or_else(|| missing("sphere degree", v))?;
        let given = spec
            .local_degree
            .get(v)
            .ok_or_else(|| missing("local degrees", v))?;
        let mut degs = BTreeMap::new();
        let mut imgs = BTreeMap::new();
        let mut fiber: BTreeMap<String, u32> = spec
            .target
            .points(&fv)
            .into_iter()
            .map(|q| (q.to_owned(), 0))
            .collect();
        for (w, p) in &spec.dynamic.attachments()[v] {
            let e = *given
                .get(w)
                .ok_or_else(|| missing("local degree", &format!("{v}->{w}")))?;
            let q = spec.target.point(&fv, &vertex_map[w]).ok_or_else(|| {
                Error::InvalidArgument(format!("edge {v}--{w} does not map to a target edge"))
            })?;
            degs.insert(p.clone(), e);
            imgs.insert(p.clone(), q.to_owned());
            *fiber.get_mut(q).expect("point of the image sphere") += e;
        }
        for (q, s) in fiber {
            if s > d {
                return Err(Error::InvalidArgument(format!(
                    "fiber of {v} over {q} already has degree {s} > {d}"
                )));
            }
            for _ in s..d {
                copies += 1;
                let root = spec
                    .target
                    .neighbor_at(&fv, &q)
                    .expect("point of the image sphere")
                    .to_owned();
                let branch = z.branch_toward(&fv, &root)?;
                let name = |u: &str| format!("{u}~{copies}");
                let p = name(&q);
                degs.insert(p.clone(), 1);
                imgs.insert(p.clone(), q.clone());
                attachments
                    .get_mut(v)
                    .expect("internal vertex")
                    .insert(name(&root), p);
                edges.push(Edge::new(v, name(&root)));
                for u in &branch {
                    let u2 = name(u);
                    vertices.push(u2.clone());
                    vertex_map.insert(u2.clone(), u.clone());
                    if z.is_leaf(u) {
                        leaves.push(u2.clone());
                        portrait.insert(
                            u2,
                            PortraitEntry {
                                image: u.clone(),
                                degree: 1,
                            },
                        );
                        continue;
                    }
                    let mut att = BTreeMap::new();
                    let mut ld = BTreeMap::new();
                    let mut pi = BTreeMap::new();
                    for w in z.neighbors(u)? {
                        let pt = spec
                            .target
                            .point(u, w)
                            .expect("target attachments")
                            .to_owned();
                        let key = if branch.contains(w) {
                            if z.is_leaf(w) || u.as_str() < w {
                                edges.push(Edge::new(u2.clone(), name(w)));
                            }
                            name(w)
                        } else {
                            v.to_owned()
                        };
                        att.insert(key, pt.clone());
                        ld.insert(pt.clone(), 1);
                        pi.insert(pt.clone(), pt);
                    }
                    attachments.insert(u2.clone(), att);
                    local_degrees.insert(u2.clone(), ld);
                    point_images.insert(u2, pi);
                }
            }
        }
        local_degrees.insert(v.to_owned(), degs);
        point_images.insert(v.to_owned(), imgs);
    }

    let tree = CombinatorialTree::new(
        vertices,
        leaves,
        edges.iter().map(|e| {
            let (a, b) = e.ends();
            (a.to_owned(), b.to_owned())
        }),
    )?;
    let source = MarkedTreeOfSpheres::new(tree, attachments)?;
    let sys = DynamicalTreeSystem {
        cover: TreeCover {
            source,
            target: spec.target.clone(),
            vertex_map,
            local_degrees,
            point_images,
            portrait,
        },
        dynamic: spec.dynamic.clone(),
    };
    let report: Report = validate_system(&sys);
    report.into_result(Error::Construction)?;
    Ok(sys)
}
