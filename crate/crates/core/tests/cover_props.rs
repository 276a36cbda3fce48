mod common;

use std::collections::BTreeSet;

use common::*;
use graftree_core::format::to_canonical_json;
use graftree_core::spheres::{
    common_arc_degree, edge_degree_by_counting, global_degree, project_cover, validate_cover,
    EdgeCounts,
};
use graftree_core::tree::is_compatible;
use graftree_core::{Error, TreeCover, ViolationKind};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Degree `d ∈ {1, 2, 3}` and a target size keeping the source within 20 leaves.
fn fixture_strategy() -> impl Strategy<Value = MonomialFixture> {
    (1u32..=3, any::<u64>()).prop_flat_map(|(d, seed)| {
        let max_other = (18 / d as usize).min(10);
        (Just(d), Just(seed), 3usize..=max_other + 2)
            .prop_map(|(d, seed, n)| random_monomial_cover(&mut rng(seed), n, d))
    })
}

fn random_keep(rng: &mut impl Rng, f: &MonomialFixture) -> BTreeSet<String> {
    let mut keep: BTreeSet<String> = [f.p.clone(), f.q.clone()].into();
    let others: Vec<&str> = f
        .cover
        .target
        .tree()
        .leaves()
        .filter(|l| !keep.contains(*l))
        .collect();
    let k = rng.gen_range(1..=others.len());
    keep.extend(others.choose_multiple(rng, k).map(|s| (*s).to_owned()));
    keep
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monomial_covers_validate(f in fixture_strategy()) {
        let r = validate_cover(&f.cover);
        prop_assert!(r.is_empty(), "{}", r);
        prop_assert_eq!(global_degree(&f.cover).unwrap(), f.degree);
        prop_assert!(f.cover.source.tree().leaves().count() <= 20);
        prop_assert_eq!(riemann_hurwitz_holds(&f.cover), Ok(()));
    }

    #[test]
    fn counting_recovers_every_edge_degree(f in fixture_strategy()) {
        let c = &f.cover;
        let tgt_leaves: Vec<&str> = c.target.tree().leaves().collect();
        for e in c.source.tree().edges() {
            let (a, b) = e.ends();
            let stored = stored_edge_degree(c, a, b);
            let counts = EdgeCounts::new(c, &e).unwrap();
            let (near, far) = counts.target_sides();
            prop_assert_eq!(near.len() + far.len(), tgt_leaves.len());
            for z in &near {
                for z2 in &far {
                    prop_assert_eq!(counts.degree(z, z2).unwrap(), stored);
                    let brute = (side_count(c, a, b, a, z) - side_count(c, a, b, a, z2)).unsigned_abs();
                    prop_assert_eq!(brute as u32, stored);
                }
            }
        }
    }

    #[test]
    fn arc_degree_is_constant_along_the_critical_arc(f in fixture_strategy()) {
        let c = &f.cover;
        let arc = path(c.source.tree(), &f.p, &f.q);
        if arc.len() >= 4 {
            let (v, w) = (&arc[1], &arc[arc.len() - 2]);
            prop_assert_eq!(common_arc_degree(c, v, w).unwrap(), Some(f.degree));
        }
    }

    #[test]
    fn projection_onto_everything_is_the_identity(f in fixture_strategy()) {
        let all = f.cover.target.tree().leaf_set();
        let out = project_cover(&f.cover, &all).unwrap();
        prop_assert_eq!(to_canonical_json(&out), to_canonical_json(&f.cover));
    }

    #[test]
    fn projection_matches_triple_reconstruction(f in fixture_strategy(), seed in any::<u64>()) {
        let keep = random_keep(&mut rng(seed), &f);
        let out = project_cover(&f.cover, &keep).unwrap();
        prop_assert!(validate_cover(&out).is_empty());
        prop_assert!(is_compatible(out.target.tree(), f.cover.target.tree()));
        prop_assert!(is_compatible(out.source.tree(), f.cover.source.tree()));
        prop_assert_eq!(&out, &project_by_triples(&f.cover, &keep));
        prop_assert_eq!(global_degree(&out).unwrap(), f.degree);
    }

    #[test]
    fn projection_is_idempotent_and_functorial(f in fixture_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let big = random_keep(&mut r, &f);
        let small: BTreeSet<String> = {
            let mut s: BTreeSet<String> = [f.p.clone(), f.q.clone()].into();
            let rest: Vec<&String> = big.iter().filter(|l| !s.contains(*l)).collect();
            s.insert(rest.choose(&mut r).unwrap().to_string());
            s
        };
        let once = project_cover(&f.cover, &big).unwrap();
        prop_assert_eq!(&project_cover(&once, &big).unwrap(), &once);
        prop_assert_eq!(project_cover(&once, &small).unwrap(), project_cover(&f.cover, &small).unwrap());
    }

    #[test]
    fn identity_covers_have_degree_one(seed in any::<u64>(), n in 3usize..16) {
        let c = identity_cover(&mut rng(seed), n);
        prop_assert!(validate_cover(&c).is_empty());
        prop_assert_eq!(global_degree(&c).unwrap(), 1);
        for e in c.source.tree().edges() {
            let (a, b) = e.ends();
            prop_assert_eq!(stored_edge_degree(&c, a, b), 1);
        }
    }

    #[test]
    fn cover_json_round_trips(f in fixture_strategy()) {
        let doc = to_canonical_json(&f.cover);
        let back: TreeCover = serde_json::from_str(&doc).unwrap();
        prop_assert_eq!(to_canonical_json(&back), doc);
    }
}

fn fixed_fixture(d: u32) -> MonomialFixture {
    random_monomial_cover(&mut rng(7), 6, d)
}

#[test]
fn dropping_a_critical_value_is_refused() {
    let f = fixed_fixture(2);
    let keep: BTreeSet<String> = f
        .cover
        .target
        .tree()
        .leaves()
        .filter(|l| *l != f.q)
        .map(str::to_owned)
        .collect();
    match project_cover(&f.cover, &keep) {
        Err(Error::InvalidArgument(msg)) => assert!(msg.contains(&f.q), "{msg}"),
        other => panic!("expected a refusal, got {other:?}"),
    }
}

#[test]
fn changing_a_local_degree_breaks_riemann_hurwitz() {
    let mut f = fixed_fixture(2);
    let v = path(f.cover.source.tree(), &f.p, &f.q)[1].clone();
    let p = f.cover.source.point(&v, &f.p).unwrap().to_owned();
    f.cover.local_degrees.get_mut(&v).unwrap().insert(p, 3);
    let r = validate_cover(&f.cover);
    assert!(r.has(ViolationKind::RiemannHurwitz), "{r}");
    assert!(r.has(ViolationKind::LocalCover), "{r}");
    assert!(riemann_hurwitz_holds(&f.cover).is_err());
}

#[test]
fn redirecting_a_point_breaks_equivariance() {
    let mut f = fixed_fixture(2);
    let c = &mut f.cover;
    let v = path(c.source.tree(), &f.p, &f.q)[1].clone();
    let p = c.source.point(&v, &f.p).unwrap().to_owned();
    let wrong = c
        .target
        .points(&v)
        .into_iter()
        .find(|q| *q != f.p.as_str())
        .unwrap()
        .to_owned();
    c.point_images.get_mut(&v).unwrap().insert(p, wrong);
    let r = validate_cover(c);
    assert!(r.has(ViolationKind::Equivariance), "{r}");
}

#[test]
fn changing_a_leaf_degree_breaks_edge_agreement() {
    let mut f = fixed_fixture(3);
    f.cover.portrait.get_mut(&f.p).unwrap().degree = 1;
    let r = validate_cover(&f.cover);
    assert!(r.has(ViolationKind::EdgeDegree), "{r}");
}

#[test]
fn counting_refuses_pairs_on_one_side() {
    let f = fixed_fixture(2);
    let e = f.cover.source.tree().edges()[0].clone();
    let counts = EdgeCounts::new(&f.cover, &e).unwrap();
    let (near, far) = counts.target_sides();
    let same = if near.len() >= 2 {
        (near[0], near[1])
    } else {
        (far[0], far[1])
    };
    assert!(counts.degree(same.0, same.1).is_err());
    assert!(edge_degree_by_counting(&f.cover, &e, same.0, same.1).is_err());
}
