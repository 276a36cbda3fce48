use std::collections::{BTreeMap, BTreeSet};

use super::TreeCover;
use crate::error::{Error, Result};
use crate::report::{Report, ViolationKind as K};

/// Checks the six cover invariants and lists every violation found.
///
/// Structural defects at a vertex suppress the downstream checks at that
/// vertex so that one defect is not reported many times over.
pub fn validate_cover(c: &TreeCover) -> Report {
    let mut r = Report::new();
    let src = c.source.tree();
    let tgt = c.target.tree();

    // Vertex map totality and leaf/internal type.
    let mut broken: BTreeSet<String> = BTreeSet::new();
    for v in src.vertices() {
        match c.image(v) {
            None => {
                r.push(K::Structure, v, "vertex has no image");
                broken.insert(v.to_owned());
            }
            Some(w) if !tgt.contains(w) => {
                r.push(K::Structure, v, format!("image {w} is not a target vertex"));
                broken.insert(v.to_owned());
            }
            Some(w) if src.is_leaf(v) != tgt.is_leaf(w) => {
                r.push(
                    K::Structure,
                    v,
                    format!("leaf/internal type differs from its image {w}"),
                );
                broken.insert(v.to_owned());
            }
            _ => {}
        }
    }
    for v in c.vertex_map.keys() {
        if !src.contains(v) {
            r.push(K::Structure, v, "vertex map entry for an unknown vertex");
        }
    }

    // Edges go to edges.
    for e in src.edges() {
        let (a, b) = e.ends();
        if broken.contains(a) || broken.contains(b) {
            continue;
        }
        let (fa, fb) = (c.image(a).unwrap(), c.image(b).unwrap());
        if !tgt.has_edge(fa, fb) {
            r.push(
                K::Structure,
                e.to_string(),
                format!("image {fa}--{fb} is not a target edge"),
            );
            broken.insert(a.to_owned());
            broken.insert(b.to_owned());
        }
    }

    // Portrait agrees with the vertex map on leaves.
    for l in src.leaves() {
        match c.portrait.get(l) {
            None => {
                r.push(K::Structure, l, "leaf missing from portrait");
                broken.insert(l.to_owned());
            }
            Some(p) => {
                if p.degree == 0 {
                    r.push(K::Structure, l, "portrait degree must be positive");
                    broken.insert(l.to_owned());
                }
                if c.image(l) != Some(p.image.as_str()) {
                    r.push(
                        K::Structure,
                        l,
                        format!("portrait image {} differs from vertex map", p.image),
                    );
                    broken.insert(l.to_owned());
                }
            }
        }
    }
    for l in c.portrait.keys() {
        if !src.is_leaf(l) {
            r.push(K::Structure, l, "portrait entry for a non-leaf");
        }
    }

    // Sphere data covers exactly the attaching points.
    for v in src.internal() {
        if broken.contains(v) {
            continue;
        }
        let points = c.source.points(v);
        let fv = c.image(v).unwrap();
        let target_points = c.target.points(fv);
        let degs = c.local_degrees.get(v);
        let imgs = c.point_images.get(v);
        let ok_degs =
            degs.is_some_and(|d| d.keys().map(String::as_str).collect::<BTreeSet<_>>() == points);
        let ok_imgs =
            imgs.is_some_and(|m| m.keys().map(String::as_str).collect::<BTreeSet<_>>() == points);
        if !ok_degs {
            r.push(
                K::Structure,
                v,
                "local degrees must be given for exactly the attaching points",
            );
            broken.insert(v.to_owned());
            continue;
        }
        if !ok_imgs {
            r.push(
                K::Structure,
                v,
                "point images must be given for exactly the attaching points",
            );
            broken.insert(v.to_owned());
            continue;
        }
        if let Some((p, _)) = degs.unwrap().iter().find(|(_, &d)| d == 0) {
            r.push(
                K::Structure,
                v,
                format!("local degree at {p} must be positive"),
            );
            broken.insert(v.to_owned());
            continue;
        }
        if let Some((p, q)) = imgs
            .unwrap()
            .iter()
            .find(|(_, q)| !target_points.contains(q.as_str()))
        {
            r.push(
                K::Structure,
                v,
                format!("image {q} of point {p} is not a point of {fv}"),
            );
            broken.insert(v.to_owned());
        }
    }
    for v in c.local_degrees.keys().chain(c.point_images.keys()) {
        if !src.is_internal(v) {
            r.push(
                K::Structure,
                v,
                "sphere data for a vertex that is not internal",
            );
        }
    }

    // Equivariance: the point of an edge maps to the point of the image edge.
    for v in src.internal() {
        if broken.contains(v) {
            continue;
        }
        let fv = c.image(v).unwrap();
        for (w, p) in &c.source.attachments()[v] {
            if broken.contains(w) {
                continue;
            }
            let fw = c.image(w).unwrap();
            let expected = c.target.point(fv, fw);
            let got = c.point_images[v].get(p).map(String::as_str);
            if expected != got {
                r.push(
                    K::Equivariance,
                    format!("{v}:{p}"),
                    format!(
                        "edge towards {w} maps to the point {} of {fv}, recorded image is {}",
                        expected.unwrap_or("?"),
                        got.unwrap_or("?")
                    ),
                );
            }
        }
    }

    // Local cover condition and Riemann-Hurwitz.
    for v in src.internal() {
        if broken.contains(v) {
            continue;
        }
        let d = c.vertex_degree(v).unwrap();
        for (q, s) in c.fiber_sums(v).unwrap() {
            if s != d {
                r.push(
                    K::LocalCover,
                    format!("{v}->{}:{q}", c.image(v).unwrap()),
                    format!("fiber over {q} has total degree {s}, sphere degree is {d}"),
                );
            }
        }
        let ramification: u32 = c.local_degrees[v].values().map(|e| e - 1).sum();
        if ramification + 2 != 2 * d {
            r.push(
                K::RiemannHurwitz,
                v,
                format!(
                    "sum of (local degree - 1) is {ramification}, expected 2*{d}-2 = {}",
                    2 * i64::from(d) - 2
                ),
            );
        }
    }

    // Edge-degree consistency at both ends.
    for e in src.edges() {
        let (a, b) = e.ends();
        if broken.contains(a) || broken.contains(b) {
            continue;
        }
        let (da, db) = (c.edge_end_degree(a, b), c.edge_end_degree(b, a));
        if da != db {
            r.push(
                K::EdgeDegree,
                e.to_string(),
                format!(
                    "local degree {} at {a} differs from {} at {b}",
                    da.map_or("?".into(), |d| d.to_string()),
                    db.map_or("?".into(), |d| d.to_string())
                ),
            );
        }
    }

    // Global degree: every target leaf has the same weighted preimage count.
    let mut counts: BTreeMap<&str, u32> = tgt.leaves().map(|z| (z, 0)).collect();
    for p in c.portrait.values() {
        if let Some(n) = counts.get_mut(p.image.as_str()) {
            *n += p.degree;
        }
    }
    let mut freq: BTreeMap<u32, usize> = BTreeMap::new();
    for n in counts.values() {
        *freq.entry(*n).or_default() += 1;
    }
    if let Some((&d, _)) = freq.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
        if d == 0 {
            r.push(K::GlobalDegree, "*", "target leaves have no preimages");
        }
        for (z, n) in &counts {
            if *n != d {
                r.push(
                    K::GlobalDegree,
                    *z,
                    format!("leaf has {n} preimages with multiplicity, expected {d}"),
                );
            }
        }
    }
    r
}

/// The common number of leaf preimages, with multiplicity, of every target leaf.
pub fn global_degree(c: &TreeCover) -> Result<u32> {
    let mut common = None;
    for z in c.target.tree().leaves() {
        let n: u32 = c.leaf_preimages(z).iter().map(|(_, d)| d).sum();
        match common {
            None => common = Some(n),
            Some(m) if m != n => {
                return Err(Error::CorruptCover(format!(
                    "target leaf {z} has {n} preimages with multiplicity, others have {m}"
                )))
            }
            _ => {}
        }
    }
    match common {
        Some(d) if d > 0 => Ok(d),
        _ => Err(Error::CorruptCover(
            "target leaves have no preimages".into(),
        )),
    }
}
