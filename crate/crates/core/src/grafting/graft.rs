//! One self-grafting step.
//!
//! Let `x₀` be the grafting leaf, periodic of period `k` with orbit
//! `o₀ = x₀, o₁, …, o_{k−1}`. A new internal vertex `v_i` is inserted on the
//! leaf edge of `o_i` in all three trees, and a copy `B_j` of the branch
//! `B₀ = {x₀}` is attached at `v_{j mod k}` for `j = 1..k`. The map extends the
//! old one by `v_i ↦ v_{i+1}`, `B_j ↦ B_{j+1}`, `B_k ↦ B₁`, post-composed with
//! the involution exchanging `B₀` and `B_k`. On spheres, `v_i` has the degree
//! `d_i` of `o_i`, with the leaf and trunk directions of local degree `d_i` and
//! the graft direction of degree 1; the `d_i − 1` missing preimages of the
//! graft-side image are new degree-1 leaves. Every other preimage leaf `ℓ` of
//! an orbit leaf gets a vertex `w_ℓ` of degree `deg ℓ` inserted on its leaf
//! edge, carrying `deg ℓ` new leaves.

use std::collections::{BTreeMap, BTreeSet};

use super::seed::{default_seed, leaf_period, validate_state};
use super::state::{Branch, GraftInfo, GraftState, Provenance};
use crate::dynamics::{count_independent_nonmonomial_cycles, iterate_vertex, sphere_cycle, Orbit};
use crate::error::{Error, Result};
use crate::report::{Report, ViolationKind as K};
use crate::spheres::{
    Attachments, DynamicalTreeMap, DynamicalTreeSystem, EdgeCounts, MarkedTreeOfSpheres,
    PortraitEntry, TreeCover,
};
use crate::tree::{is_compatible, CombinatorialTree, Edge, TreeBuilder};

const LEAF: &str = "leaf";
const TRUNK: &str = "trunk";
const GRAFT: &str = "graft";

/// Staging area for surgery on a tree of spheres.
struct MarkedBuilder<'a> {
    base: &'a CombinatorialTree,
    tb: TreeBuilder,
    att: Attachments,
}

impl<'a> MarkedBuilder<'a> {
    fn new(m: &'a MarkedTreeOfSpheres) -> Self {
        MarkedBuilder {
            base: m.tree(),
            tb: TreeBuilder::from_tree(m.tree()),
            att: m.attachments().clone(),
        }
    }

    /// Inserts `new` on the edge of the (original) leaf `leaf`, with attaching
    /// points `leaf` and `trunk`; the trunk side keeps its attaching point.
    fn insert_on_leaf_edge(&mut self, leaf: &str, new: &str) -> Result<()> {
        let u = self.base.neighbors(leaf)?[0].to_owned();
        self.tb.subdivide(&u, leaf, new)?;
        let at_u = self
            .att
            .get_mut(&u)
            .expect("internal vertex has attachments");
        let p = at_u.remove(leaf).expect("edge has an attaching point");
        at_u.insert(new.to_owned(), p);
        self.att.insert(
            new.to_owned(),
            BTreeMap::from([(leaf.to_owned(), LEAF.to_owned()), (u, TRUNK.to_owned())]),
        );
        Ok(())
    }

    fn attach_leaf(&mut self, at: &str, new: &str, point: &str) -> Result<()> {
        self.tb.attach_leaf(at, new)?;
        self.att
            .get_mut(at)
            .expect("internal vertex has attachments")
            .insert(new.to_owned(), point.to_owned());
        Ok(())
    }

    fn build(self) -> Result<MarkedTreeOfSpheres> {
        MarkedTreeOfSpheres::new(self.tb.build()?, self.att)
    }
}

/// Orbit of the grafting leaf, `o₀ = x₀, …, o_{k−1}`.
fn leaf_orbit(state: &GraftState) -> Result<Vec<String>> {
    let k = leaf_period(state).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "grafting leaf {} is not periodic",
            state.roles.graft_leaf
        ))
    })?;
    let mut orbit = vec![state.roles.graft_leaf.clone()];
    for _ in 1..k {
        let next = state
            .system
            .cover
            .image(orbit.last().unwrap())
            .expect("periodic orbit");
        orbit.push(next.to_owned());
    }
    Ok(orbit)
}

/// Local degrees and point images of a new sphere: the two given points have
/// degree `degree`, every extra point has degree 1 and maps to `extra_image`.
fn sphere_data(
    degree: u32,
    images: [(&str, &str); 2],
    extra: &[String],
    extra_image: &str,
) -> (BTreeMap<String, u32>, BTreeMap<String, String>) {
    let mut degs = BTreeMap::new();
    let mut imgs = BTreeMap::new();
    for (p, q) in images {
        degs.insert(p.to_owned(), degree);
        imgs.insert(p.to_owned(), q.to_owned());
    }
    for p in extra {
        degs.insert(p.clone(), 1);
        imgs.insert(p.clone(), extra_image.to_owned());
    }
    (degs, imgs)
}

/// Performs one grafting step and checks every postcondition; a failure
/// aborts with the violation report.
pub fn graft_step(s: &GraftState) -> Result<GraftState> {
    let g = s.generation() + 1;
    let c = &s.system.cover;
    let x0 = s.roles.graft_leaf.clone();
    let orbit = leaf_orbit(s)?;
    let k = orbit.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "grafting leaf {x0} is fixed; a period of at least 2 is required"
        )));
    }
    let deg = |l: &str| c.portrait[l].degree;
    let d: Vec<u32> = orbit.iter().map(|o| deg(o)).collect();
    let v: Vec<String> = (0..k).map(|i| format!("v@g{g}#{i}")).collect();
    let copy: Vec<String> = (0..=k).map(|j| format!("{x0}@g{g}#{j}")).collect(); // index 0 unused
                                                                                 // Leaf hanging off the graft side of the image sphere of v_i.
    let graft_side_leaf = |i: usize| {
        if i + 1 < k {
            copy[i + 1].clone()
        } else {
            x0.clone()
        }
    };

    // Other preimage leaves of each orbit leaf.
    let mut others: Vec<Vec<(String, u32)>> = vec![Vec::new(); k];
    for (l, p) in &c.portrait {
        for i in 0..k {
            if p.image == orbit[(i + 1) % k] && *l != orbit[i] {
                others[i].push((l.clone(), p.degree));
            }
        }
    }

    // Trees of spheres.
    let mut xb = MarkedBuilder::new(&s.system.dynamic);
    let mut zb = MarkedBuilder::new(&c.target);
    let mut yb = MarkedBuilder::new(&c.source);
    for b in [&mut xb, &mut yb, &mut zb] {
        for i in 0..k {
            b.insert_on_leaf_edge(&orbit[i], &v[i])?;
        }
        for j in 1..=k {
            b.attach_leaf(&v[j % k], &copy[j], GRAFT)?;
        }
    }
    let mut vertex_map = c.vertex_map.clone();
    let mut local_degrees = c.local_degrees.clone();
    let mut point_images = c.point_images.clone();
    let mut portrait = c.portrait.clone();
    let direction = |i: usize| {
        if i + 1 < k {
            (LEAF, GRAFT)
        } else {
            (GRAFT, LEAF)
        }
    };

    for i in 0..k {
        let (leaf_img, graft_img) = direction(i);
        let ys: Vec<String> = (1..d[i]).map(|j| format!("y{j}")).collect();
        for (j, p) in ys.iter().enumerate() {
            let leaf = format!("{}/y{}", v[i], j + 1);
            yb.attach_leaf(&v[i], &leaf, p)?;
            vertex_map.insert(leaf.clone(), graft_side_leaf(i));
            portrait.insert(
                leaf,
                PortraitEntry {
                    image: graft_side_leaf(i),
                    degree: 1,
                },
            );
        }
        vertex_map.insert(v[i].clone(), v[(i + 1) % k].clone());
        let (mut degs, mut imgs) =
            sphere_data(d[i], [(LEAF, leaf_img), (TRUNK, TRUNK)], &ys, graft_img);
        degs.insert(GRAFT.to_owned(), 1);
        imgs.insert(GRAFT.to_owned(), graft_img.to_owned());
        local_degrees.insert(v[i].clone(), degs);
        point_images.insert(v[i].clone(), imgs);

        for (l, dl) in &others[i] {
            let w = format!("w@g{g}:{l}");
            yb.insert_on_leaf_edge(l, &w)?;
            let ys: Vec<String> = (1..=*dl).map(|j| format!("y{j}")).collect();
            for p in &ys {
                let leaf = format!("{w}/{p}");
                yb.attach_leaf(&w, &leaf, p)?;
                vertex_map.insert(leaf.clone(), graft_side_leaf(i));
                portrait.insert(
                    leaf,
                    PortraitEntry {
                        image: graft_side_leaf(i),
                        degree: 1,
                    },
                );
            }
            vertex_map.insert(w.clone(), v[(i + 1) % k].clone());
            let (degs, imgs) = sphere_data(*dl, [(LEAF, leaf_img), (TRUNK, TRUNK)], &ys, graft_img);
            local_degrees.insert(w.clone(), degs);
            point_images.insert(w, imgs);
        }
    }
    // f on the copies, then the involution exchanging x₀ and B_k.
    let iota = |u: &str| -> String {
        if u == x0 {
            copy[k].clone()
        } else if u == copy[k] {
            x0.clone()
        } else {
            u.to_owned()
        }
    };
    for j in 1..=k {
        let f = if j < k {
            copy[j + 1].clone()
        } else {
            copy[1].clone()
        };
        vertex_map.insert(copy[j].clone(), iota(&f));
        portrait.insert(
            copy[j].clone(),
            PortraitEntry {
                image: iota(&f),
                degree: 1,
            },
        );
    }
    for (l, entry) in portrait.iter_mut() {
        if c.portrait.contains_key(l) && entry.image == x0 {
            entry.image = copy[k].clone();
            vertex_map.insert(l.clone(), copy[k].clone());
        }
    }

    let system = DynamicalTreeSystem {
        cover: TreeCover {
            source: yb.build()?,
            target: zb.build()?,
            vertex_map,
            local_degrees,
            point_images,
            portrait,
        },
        dynamic: xb.build()?,
    };

    let tree_map = graft_tree_map(&s.tree_map(), &orbit, &v, &copy, iota)?;
    let branch = system.x_tree().branch_toward(&v[0], &x0)?;
    let certified = count_independent_nonmonomial_cycles(&system)?;
    let mut roles = s.roles.clone();
    roles.certified_cycles = certified;
    let out = GraftState {
        note: s.note.clone(),
        system,
        roles,
        graft: Some(GraftInfo {
            generation: g,
            branch_b0: Branch {
                root: v[0].clone(),
                vertices: branch.into_iter().collect(),
            },
            cycle: v.clone(),
            copies: (1..=k)
                .map(|j| {
                    (
                        copy[j].clone(),
                        Provenance {
                            copy_index: j,
                            original: x0.clone(),
                        },
                    )
                })
                .collect(),
            involution: BTreeMap::from([
                (x0.clone(), copy[k].clone()),
                (copy[k].clone(), x0.clone()),
            ]),
            tree_map,
        }),
    };

    let mut report = validate_state(&out);
    if !is_compatible(s.system.x_tree(), out.system.x_tree()) {
        report.push(
            K::Graft,
            "tree",
            "previous dynamical tree is not compatible with the new one",
        );
    }
    if certified < s.roles.certified_cycles + 1 {
        report.push(
            K::Graft,
            "certified_cycles",
            format!(
                "count went from {} to {certified}",
                s.roles.certified_cycles
            ),
        );
    }
    report.into_result(Error::Construction)?;
    Ok(out)
}

/// The tree-level map of the grafted system, built from the previous tree map
/// alone: new vertices on edges inherit the edge degree, grafted copies and
/// their edges have degree 1, and the map is `ι ∘ f`.
fn graft_tree_map(
    prev: &DynamicalTreeMap,
    orbit: &[String],
    v: &[String],
    copy: &[String],
    iota: impl Fn(&str) -> String,
) -> Result<DynamicalTreeMap> {
    let k = orbit.len();
    let mut tb = TreeBuilder::from_tree(&prev.tree);
    let mut image: BTreeMap<String, String> = prev
        .image
        .iter()
        .map(|(a, b)| (a.clone(), iota(b)))
        .collect();
    let mut vertex_degree = prev.vertex_degree.clone();
    let mut edge_degree = prev.edge_degree.clone();
    for i in 0..k {
        let u = prev.tree.neighbors(&orbit[i])?[0].to_owned();
        let old = Edge::new(u.clone(), orbit[i].clone());
        let de = edge_degree
            .remove(&old)
            .ok_or_else(|| Error::CorruptCover(format!("tree map has no degree for {old}")))?;
        tb.subdivide(&u, &orbit[i], v[i].clone())?;
        edge_degree.insert(Edge::new(u, v[i].clone()), de);
        edge_degree.insert(Edge::new(v[i].clone(), orbit[i].clone()), de);
        vertex_degree.insert(v[i].clone(), de);
        image.insert(v[i].clone(), iota(&v[(i + 1) % k]));
    }
    for j in 1..=k {
        tb.attach_leaf(&v[j % k], copy[j].clone())?;
        edge_degree.insert(Edge::new(v[j % k].clone(), copy[j].clone()), 1);
        vertex_degree.insert(copy[j].clone(), 1);
        let f = if j < k { &copy[j + 1] } else { &copy[1] };
        image.insert(copy[j].clone(), iota(f));
    }
    Ok(DynamicalTreeMap {
        tree: tb.build()?,
        image,
        vertex_degree,
        edge_degree,
    })
}

/// Applies `n` grafting steps to the shipped seed.
pub fn generate(n: usize) -> Result<GraftState> {
    generate_from(default_seed(), n)
}

pub fn generate_from(seed: GraftState, n: usize) -> Result<GraftState> {
    let mut s = seed;
    for _ in 0..n {
        s = graft_step(&s)?;
    }
    Ok(s)
}

/// The three properties of the newest grafted cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalCheck {
    /// Minimal period of `v₀`.
    pub period: usize,
    /// Degree of `τ^k` on `B_k`.
    pub bk_return_degree: u64,
    /// Whether `τ^k(B_k)` lands in `B₀`.
    pub bk_lands_in_b0: bool,
    /// Local degree of `τ` on the edge entering `B₀`.
    pub b0_degree: u32,
    /// The same degree recovered by counting leaf preimages.
    pub b0_counted_degree: u32,
}

pub fn fundamental_check(state: &GraftState) -> Result<FundamentalCheck> {
    let info = state
        .graft
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("state has not been grafted".into()))?;
    let sys = &state.system;
    let c = &sys.cover;
    let k = info.cycle.len();
    let v0 = &info.branch_b0.root;

    let mut period = None;
    let mut cur = v0.clone();
    for p in 1..=sys.x_tree().len() {
        match iterate_vertex(sys, &cur, 1)? {
            Orbit::Reached { vertex } => cur = vertex,
            Orbit::Escaped { .. } => break,
        }
        if &cur == v0 {
            period = Some(p);
            break;
        }
    }
    let period = period.ok_or_else(|| Error::CorruptCover(format!("{v0} is not periodic")))?;

    let bk = info
        .copies
        .iter()
        .find(|(_, p)| p.copy_index == k)
        .map(|(l, _)| l.clone())
        .ok_or_else(|| Error::CorruptCover(format!("no copy with index {k}")))?;
    let mut degree = 1u64;
    let mut cur = bk;
    for _ in 0..k {
        degree *= u64::from(c.vertex_degree(&cur).unwrap_or(0));
        cur = c
            .image(&cur)
            .ok_or_else(|| Error::CorruptCover(format!("{cur} has no image")))?
            .to_owned();
    }
    let bk_lands_in_b0 = info.branch_b0.vertices.contains(&cur);

    let entry = sys
        .x_tree()
        .neighbors(v0)?
        .into_iter()
        .find(|w| info.branch_b0.vertices.iter().any(|b| b == w))
        .ok_or_else(|| Error::CorruptCover("branch B0 is not adjacent to its root".into()))?
        .to_owned();
    let b0_degree = c
        .edge_end_degree(&entry, v0)
        .ok_or_else(|| Error::CorruptCover("no degree on the edge entering B0".into()))?;
    let edge = Edge::new(v0.clone(), entry);
    let counts = EdgeCounts::new(c, &edge)?;
    let (near, far) = counts.target_sides();
    let (z, z2) = (near.first().copied(), far.first().copied());
    let b0_counted_degree = match (z, z2) {
        (Some(z), Some(z2)) => counts.degree(z, z2)?,
        _ => {
            return Err(Error::CorruptCover(
                "image edge does not separate target leaves".into(),
            ))
        }
    };
    Ok(FundamentalCheck {
        period,
        bk_return_degree: degree,
        bk_lands_in_b0,
        b0_degree,
        b0_counted_degree,
    })
}

/// Consistency of the recorded grafting bookkeeping with the system.
pub(crate) fn check_graft_info(state: &GraftState) -> Report {
    let mut r = Report::new();
    let Some(info) = &state.graft else {
        return r;
    };
    let sys = &state.system;
    let x = sys.x_tree();
    let x0 = &state.roles.graft_leaf;
    let k = info.cycle.len();

    if info.cycle.first() != Some(&info.branch_b0.root) {
        r.push(K::Graft, "cycle", "the cycle must start at the root of B0");
    }
    match sphere_cycle(sys, &info.cycle) {
        Ok(c) if c.period >= 2 && c.is_critical() => {}
        Ok(c) => r.push(
            K::Graft,
            "cycle",
            format!("period {} and return degree {}", c.period, c.return_degree),
        ),
        Err(e) => r.push(K::Graft, "cycle", e.to_string()),
    }
    match x.branch_toward(&info.branch_b0.root, x0) {
        Ok(b) if b.iter().eq(info.branch_b0.vertices.iter()) => {}
        _ => r.push(
            K::Graft,
            "branch_b0",
            "recorded B0 is not the branch at its root containing the grafting leaf",
        ),
    }
    let indices: BTreeSet<usize> = info.copies.values().map(|p| p.copy_index).collect();
    if indices != (1..=k).collect() || info.copies.len() != k {
        r.push(
            K::Graft,
            "copies",
            format!("copy indices must be exactly 1..={k}"),
        );
    }
    for (l, p) in &info.copies {
        let at = &info.cycle[p.copy_index % k.max(1)];
        if !x.has_edge(l, at) {
            r.push(
                K::Graft,
                l,
                format!("copy B{} is not attached at {at}", p.copy_index),
            );
        }
        if !info.branch_b0.vertices.contains(&p.original) {
            r.push(
                K::Graft,
                l,
                format!("provenance {} is not in B0", p.original),
            );
        }
    }
    for (a, b) in &info.involution {
        if info.involution.get(b) != Some(a) {
            r.push(K::Graft, a, "involution applied twice is not the identity");
        }
    }
    let bk: BTreeSet<&String> = info
        .copies
        .iter()
        .filter(|(_, p)| p.copy_index == k)
        .map(|(l, _)| l)
        .collect();
    let b0: BTreeSet<&String> = info.branch_b0.vertices.iter().collect();
    let support: BTreeSet<&String> = info.involution.keys().collect();
    if support != b0.union(&bk).copied().collect() {
        r.push(
            K::Graft,
            "involution",
            "involution must exchange exactly B0 and Bk",
        );
    }
    match fundamental_check(state) {
        Ok(f) => {
            if f.period != k || f.period < 2 {
                r.push(
                    K::Graft,
                    &info.branch_b0.root,
                    format!("period {} differs from cycle length {k}", f.period),
                );
            }
            if f.bk_return_degree != 1 || !f.bk_lands_in_b0 {
                r.push(
                    K::Graft,
                    "Bk",
                    format!(
                        "k-th iterate has degree {} on Bk, lands in B0: {}",
                        f.bk_return_degree, f.bk_lands_in_b0
                    ),
                );
            }
            if f.b0_degree != 2 || f.b0_counted_degree != 2 {
                r.push(
                    K::Graft,
                    "B0",
                    format!(
                        "degree on B0 is {} (counted {})",
                        f.b0_degree, f.b0_counted_degree
                    ),
                );
            }
        }
        Err(e) => r.push(K::Graft, "fundamental", e.to_string()),
    }
    r
}
