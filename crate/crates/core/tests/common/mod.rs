//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! Every oracle here is written against the public API only and recomputes
//! its answer from scratch (breadth-first searches, exhaustive triples), so it
//! shares no code with the implementation it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use graftree_core::spheres::Attachments;
use graftree_core::{
    CombinatorialTree, MarkedTreeOfSpheres, PortraitEntry, TreeBuilder, TreeCover,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random stable tree with `leaves ≥ 3` leaves `l0, l1, …` and internal
/// vertices `n0, n1, …`, grown from a star by attaching leaves to internal
/// vertices or to new vertices subdividing an edge.
pub fn random_stable_tree(rng: &mut impl Rng, leaves: usize) -> CombinatorialTree {
    assert!(leaves >= 3);
    let mut b = TreeBuilder::new();
    b.add_vertex("n0", false);
    for i in 0..3 {
        b.attach_leaf("n0", format!("l{i}")).unwrap();
    }
    let mut internal = vec!["n0".to_owned()];
    let mut edges: Vec<(String, String)> =
        (0..3).map(|i| ("n0".to_owned(), format!("l{i}"))).collect();
    for i in 3..leaves {
        let leaf = format!("l{i}");
        if rng.gen_bool(0.5) {
            let at = internal.choose(rng).unwrap().clone();
            b.attach_leaf(&at, leaf.clone()).unwrap();
            edges.push((at, leaf));
        } else {
            let k = rng.gen_range(0..edges.len());
            let (a, c) = edges.swap_remove(k);
            let new = format!("n{}", internal.len());
            b.subdivide(&a, &c, new.clone()).unwrap();
            b.attach_leaf(&new, leaf.clone()).unwrap();
            internal.push(new.clone());
            edges.push((a, new.clone()));
            edges.push((new.clone(), c));
            edges.push((new, leaf));
        }
    }
    b.build().unwrap()
}

/// Renames the internal vertices through a random permutation onto `m0, m1, …`.
pub fn shuffle_internal_labels(
    rng: &mut impl Rng,
    t: &CombinatorialTree,
) -> BTreeMap<String, String> {
    let internal: Vec<String> = t.internal().map(str::to_owned).collect();
    let mut names: Vec<String> = (0..internal.len()).map(|i| format!("m{i}")).collect();
    names.shuffle(rng);
    internal.into_iter().zip(names).collect()
}

// ---------------------------------------------------------------------------
// Tree oracles

/// Component index of every vertex after deleting `v` (`v` itself is absent).
pub fn components_without(t: &CombinatorialTree, v: &str) -> HashMap<String, usize> {
    let mut comp = HashMap::new();
    for (next, start) in t.neighbors(v).unwrap().into_iter().enumerate() {
        let mut queue = VecDeque::from([start.to_owned()]);
        comp.insert(start.to_owned(), next);
        while let Some(u) = queue.pop_front() {
            for w in t.neighbors(&u).unwrap() {
                if w != v && !comp.contains_key(w) {
                    comp.insert(w.to_owned(), next);
                    queue.push_back(w.to_owned());
                }
            }
        }
    }
    comp
}

/// Whether `a, b, c` lie in three distinct components of `t ∖ {v}`.
pub fn separates(t: &CombinatorialTree, v: &str, a: &str, b: &str, c: &str) -> bool {
    if [a, b, c].contains(&v) {
        return false;
    }
    let comp = components_without(t, v);
    let (x, y, z) = (comp[a], comp[b], comp[c]);
    x != y && y != z && x != z
}

/// The vertex separating three distinct leaves, by exhaustive search.
pub fn median(t: &CombinatorialTree, a: &str, b: &str, c: &str) -> String {
    let found: Vec<&str> = t.internal().filter(|v| separates(t, v, a, b, c)).collect();
    assert_eq!(found.len(), 1, "exactly one vertex separates {a}, {b}, {c}");
    found[0].to_owned()
}

/// The vertex path from `a` to `b`, by breadth-first search.
pub fn path(t: &CombinatorialTree, a: &str, b: &str) -> Vec<String> {
    let mut parent: HashMap<String, String> = HashMap::new();
    let mut queue = VecDeque::from([a.to_owned()]);
    parent.insert(a.to_owned(), a.to_owned());
    while let Some(u) = queue.pop_front() {
        for w in t.neighbors(&u).unwrap() {
            if !parent.contains_key(w) {
                parent.insert(w.to_owned(), u.clone());
                queue.push_back(w.to_owned());
            }
        }
    }
    let mut out = vec![b.to_owned()];
    while out.last().unwrap() != a {
        out.push(parent[out.last().unwrap()].clone());
    }
    out.reverse();
    out
}

/// `t1 ◁ t2` checked over every vertex and every triple of other vertices.
pub fn compatible(t1: &CombinatorialTree, t2: &CombinatorialTree) -> bool {
    if t1.vertices().any(|v| !t2.contains(v)) {
        return false;
    }
    let vs: Vec<&str> = t1.vertices().collect();
    for &v in &vs {
        let c1 = components_without(t1, v);
        let c2 = components_without(t2, v);
        let others: Vec<&str> = vs.iter().copied().filter(|&u| u != v).collect();
        let sep = |c: &HashMap<String, usize>, a: &str, b: &str, d: &str| {
            let (x, y, z) = (c[a], c[b], c[d]);
            x != y && y != z && x != z
        };
        for i in 0..others.len() {
            for j in i + 1..others.len() {
                for k in j + 1..others.len() {
                    let (a, b, d) = (others[i], others[j], others[k]);
                    if sep(&c1, a, b, d) != sep(&c2, a, b, d) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// For every internal vertex of `t1`, the unique vertex of `t2` that is the
/// median of every leaf triple the vertex separates in `t1`.
pub fn embed_all_triples(
    t1: &CombinatorialTree,
    t2: &CombinatorialTree,
) -> Option<BTreeMap<String, String>> {
    let leaves: Vec<&str> = t1.leaves().collect();
    let comps2: Vec<(&str, HashMap<String, usize>)> = t2
        .internal()
        .map(|v| (v, components_without(t2, v)))
        .collect();
    let median2 = |a: &str, b: &str, c: &str| -> String {
        let found: Vec<&str> = comps2
            .iter()
            .filter(|(_, m)| m.get(a) != m.get(b) && m.get(b) != m.get(c) && m.get(a) != m.get(c))
            .map(|(v, _)| *v)
            .collect();
        assert_eq!(found.len(), 1, "exactly one vertex separates {a}, {b}, {c}");
        found[0].to_owned()
    };
    let mut out = BTreeMap::new();
    for u in t1.internal() {
        let comp = components_without(t1, u);
        let mut image: Option<String> = None;
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                for k in j + 1..leaves.len() {
                    let (a, b, c) = (leaves[i], leaves[j], leaves[k]);
                    if comp[a] == comp[b] || comp[b] == comp[c] || comp[a] == comp[c] {
                        continue;
                    }
                    let m = median2(a, b, c);
                    match &image {
                        None => image = Some(m),
                        Some(prev) if *prev == m => {}
                        Some(_) => return None,
                    }
                }
            }
        }
        out.insert(u.to_owned(), image?);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Cover fixtures

/// A cover of degree `d` that is `z ↦ z^d` on every sphere of the arc between
/// two target leaves `p` and `q` (totally ramified towards both ends) and
/// carries `d` unramified copies of every branch hanging off that arc.
#[derive(Debug, Clone)]
pub struct MonomialFixture {
    pub cover: TreeCover,
    pub p: String,
    pub q: String,
    pub degree: u32,
}

pub fn random_monomial_cover(rng: &mut impl Rng, target_leaves: usize, d: u32) -> MonomialFixture {
    let z = random_stable_tree(rng, target_leaves);
    let leaves: Vec<&str> = z.leaves().collect();
    let mut ends: Vec<&str> = leaves.choose_multiple(rng, 2).copied().collect();
    ends.sort_unstable();
    let (p, q) = (ends[0].to_owned(), ends[1].to_owned());
    monomial_cover(&z, &p, &q, d)
}

pub fn monomial_cover(z: &CombinatorialTree, p: &str, q: &str, d: u32) -> MonomialFixture {
    let target = MarkedTreeOfSpheres::with_neighbor_labels(z.clone());
    let arc = path(z, p, q);
    let on_arc: BTreeSet<&str> = arc.iter().map(String::as_str).collect();

    let mut b = TreeBuilder::new();
    let mut att: Attachments = BTreeMap::new();
    let mut vertex_map = BTreeMap::new();
    let mut local_degrees: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
    let mut point_images: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut portrait = BTreeMap::new();

    for v in &arc {
        b.add_vertex(v.clone(), z.is_leaf(v));
        vertex_map.insert(v.clone(), v.clone());
    }
    for w in arc.windows(2) {
        b.add_edge(w[0].clone(), w[1].clone());
    }
    for end in [p, q] {
        portrait.insert(
            end.to_owned(),
            PortraitEntry {
                image: end.to_owned(),
                degree: d,
            },
        );
    }
    for u in arc.iter().filter(|u| z.is_internal(u)) {
        let mut a = BTreeMap::new();
        let mut ld = BTreeMap::new();
        let mut pi = BTreeMap::new();
        for w in z.neighbors(u).unwrap() {
            if on_arc.contains(w) {
                a.insert(w.to_owned(), w.to_owned());
                ld.insert(w.to_owned(), d);
                pi.insert(w.to_owned(), w.to_owned());
                continue;
            }
            let branch = z.branch_toward(u, w).unwrap();
            for m in 1..=d {
                let name = |x: &str| format!("{x}^{m}");
                a.insert(name(w), name(w));
                ld.insert(name(w), 1);
                pi.insert(name(w), w.to_owned());
                b.add_edge(u.clone(), name(w));
                for x in &branch {
                    b.add_vertex(name(x), z.is_leaf(x));
                    vertex_map.insert(name(x), x.clone());
                    if z.is_leaf(x) {
                        portrait.insert(
                            name(x),
                            PortraitEntry {
                                image: x.clone(),
                                degree: 1,
                            },
                        );
                        continue;
                    }
                    let mut xa = BTreeMap::new();
                    let mut xl = BTreeMap::new();
                    let mut xp = BTreeMap::new();
                    for y in z.neighbors(x).unwrap() {
                        let key = if branch.contains(y) {
                            b.add_edge(name(x), name(y));
                            name(y)
                        } else {
                            u.clone()
                        };
                        xa.insert(key, y.to_owned());
                        xl.insert(y.to_owned(), 1);
                        xp.insert(y.to_owned(), y.to_owned());
                    }
                    att.insert(name(x), xa);
                    local_degrees.insert(name(x), xl);
                    point_images.insert(name(x), xp);
                }
            }
        }
        att.insert(u.clone(), a);
        local_degrees.insert(u.clone(), ld);
        point_images.insert(u.clone(), pi);
    }
    let source = MarkedTreeOfSpheres::new(b.build().unwrap(), att).unwrap();
    MonomialFixture {
        cover: TreeCover {
            source,
            target,
            vertex_map,
            local_degrees,
            point_images,
            portrait,
        },
        p: p.to_owned(),
        q: q.to_owned(),
        degree: d,
    }
}

pub fn identity_cover(rng: &mut impl Rng, leaves: usize) -> TreeCover {
    TreeCover::identity(&MarkedTreeOfSpheres::with_neighbor_labels(
        random_stable_tree(rng, leaves),
    ))
}

// ---------------------------------------------------------------------------
// Cover oracles

/// Sphere degree of an internal source vertex: total local degree over one
/// attaching point of the image sphere.
pub fn sphere_degree(c: &TreeCover, v: &str) -> u32 {
    let fv = c.image(v).unwrap();
    let q = c.target.attachments()[fv].values().min().unwrap();
    c.point_images[v]
        .iter()
        .filter(|(_, img)| *img == q)
        .map(|(p, _)| c.local_degrees[v][p])
        .sum()
}

/// `Σ (e − 1) = 2D − 2` at every internal source vertex.
pub fn riemann_hurwitz_holds(c: &TreeCover) -> Result<(), String> {
    for v in c.source.tree().internal() {
        let d = i64::from(sphere_degree(c, v));
        let ram: i64 = c.local_degrees[v].values().map(|e| i64::from(*e) - 1).sum();
        if ram != 2 * d - 2 {
            return Err(format!("{v}: ramification {ram}, degree {d}"));
        }
    }
    Ok(())
}

/// Weighted count of source leaves over `z` in the component of `side` after
/// cutting the source edge `a--b`.
pub fn side_count(c: &TreeCover, a: &str, b: &str, side: &str, z: &str) -> i64 {
    let comp = components_without(c.source.tree(), if side == a { b } else { a });
    let s = comp[side];
    c.portrait
        .iter()
        .filter(|(y, p)| p.image == z && comp.get(y.as_str()) == Some(&s))
        .map(|(_, p)| i64::from(p.degree))
        .sum()
}

/// Stored degree of a source edge: the local degree at an internal end, or the
/// portrait degree when the edge joins two leaves.
pub fn stored_edge_degree(c: &TreeCover, a: &str, b: &str) -> u32 {
    let t = c.source.tree();
    let (v, w) = if t.is_internal(a) { (a, b) } else { (b, a) };
    if t.is_leaf(v) {
        return c.portrait[v].degree;
    }
    let p = c.source.point(v, w).unwrap();
    c.local_degrees[v][p]
}

/// Rebuilds the projection of `c` onto the target leaves `keep` from
/// separating triples alone.
pub fn project_by_triples(c: &TreeCover, keep: &BTreeSet<String>) -> TreeCover {
    let ykeep: BTreeSet<String> = c
        .portrait
        .iter()
        .filter(|(_, p)| keep.contains(&p.image))
        .map(|(y, _)| y.clone())
        .collect();
    let target = restrict_by_triples(&c.target, keep);
    let source = restrict_by_triples(&c.source, &ykeep);
    let mut vertex_map = BTreeMap::new();
    let mut local_degrees = BTreeMap::new();
    let mut point_images = BTreeMap::new();
    for v in source.tree().vertices() {
        vertex_map.insert(v.to_owned(), c.vertex_map[v].clone());
    }
    for v in source.tree().internal() {
        let pts: BTreeSet<&str> = source.points(v);
        let mut ld = BTreeMap::new();
        let mut pi = BTreeMap::new();
        for (p, e) in &c.local_degrees[v] {
            let img = &c.point_images[v][p];
            if pts.contains(p.as_str()) {
                ld.insert(p.clone(), *e);
                pi.insert(p.clone(), img.clone());
            }
        }
        local_degrees.insert(v.to_owned(), ld);
        point_images.insert(v.to_owned(), pi);
    }
    let portrait = c
        .portrait
        .iter()
        .filter(|(y, _)| ykeep.contains(*y))
        .map(|(y, p)| (y.clone(), p.clone()))
        .collect();
    TreeCover {
        source,
        target,
        vertex_map,
        local_degrees,
        point_images,
        portrait,
    }
}

/// The stable tree spanned by `keep`: medians of kept triples, adjacent when no
/// other kept vertex lies between them, with attaching points inherited from
/// the first step of each arc.
pub fn restrict_by_triples(
    m: &MarkedTreeOfSpheres,
    keep: &BTreeSet<String>,
) -> MarkedTreeOfSpheres {
    let t = m.tree();
    let ks: Vec<&str> = keep.iter().map(String::as_str).collect();
    let mut internal = BTreeSet::new();
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            for k in j + 1..ks.len() {
                internal.insert(median(t, ks[i], ks[j], ks[k]));
            }
        }
    }
    let vertices: Vec<String> = internal
        .iter()
        .cloned()
        .chain(keep.iter().cloned())
        .collect();
    let vset: BTreeSet<&str> = vertices.iter().map(String::as_str).collect();
    let mut edges = Vec::new();
    let mut att: Attachments = BTreeMap::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let arc = path(t, &vertices[i], &vertices[j]);
            if arc[1..arc.len() - 1]
                .iter()
                .any(|x| vset.contains(x.as_str()))
            {
                continue;
            }
            edges.push((vertices[i].clone(), vertices[j].clone()));
            for (v, step) in [
                (&arc[0], &arc[1]),
                (&arc[arc.len() - 1], &arc[arc.len() - 2]),
            ] {
                if internal.contains(v) {
                    let other = if v == &arc[0] {
                        &arc[arc.len() - 1]
                    } else {
                        &arc[0]
                    };
                    att.entry(v.clone())
                        .or_default()
                        .insert(other.clone(), m.point(v, step).unwrap().to_owned());
                }
            }
        }
    }
    let tree = CombinatorialTree::new(vertices.clone(), keep.iter().cloned(), edges).unwrap();
    MarkedTreeOfSpheres::new(tree, att).unwrap()
}
