mod common;

use std::collections::BTreeSet;

use common::*;
use graftree_core::tree::{assert_stable_equality, embed_by_triples, is_compatible};
use graftree_core::{CombinatorialTree, Error, TreeBuilder};
use proptest::prelude::*;

fn tree_strategy(max_leaves: usize) -> impl Strategy<Value = CombinatorialTree> {
    (3..=max_leaves, any::<u64>()).prop_map(|(n, seed)| random_stable_tree(&mut rng(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_trees_are_stable(t in tree_strategy(24)) {
        prop_assert!(t.is_stable());
        prop_assert_eq!(t.edges().len(), t.len() - 1);
    }

    #[test]
    fn canonical_json_round_trips(t in tree_strategy(16)) {
        let doc = serde_json::to_string(&t).unwrap();
        let back: CombinatorialTree = serde_json::from_str(&doc).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), doc);
        prop_assert_eq!(back, t);
    }

    #[test]
    fn separating_vertex_matches_component_search(t in tree_strategy(12), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let leaves: Vec<&str> = t.leaves().collect();
        let chosen: BTreeSet<&str> = picks.iter().map(|i| *i.get(&leaves)).collect();
        prop_assume!(chosen.len() == 3);
        let v: Vec<&str> = chosen.into_iter().collect();
        prop_assert_eq!(t.separating_vertex(v[0], v[1], v[2]).unwrap(), median(&t, v[0], v[1], v[2]));
    }

    #[test]
    fn compatibility_is_reflexive(t in tree_strategy(10)) {
        prop_assert!(is_compatible(&t, &t));
    }

    #[test]
    fn compatibility_agrees_with_exhaustive_check(seed in any::<u64>(), n in 4usize..9) {
        let mut r = rng(seed);
        let big = random_stable_tree(&mut r, n);
        // A subtree spanned by some leaves, and an unrelated tree on the same labels.
        let keep: Vec<String> = big.leaves().take(3 + (seed as usize) % (n - 2)).map(str::to_owned).collect();
        let m = graftree_core::MarkedTreeOfSpheres::with_neighbor_labels(big.clone());
        let small = restrict_by_triples(&m, &keep.into_iter().collect()).tree().clone();
        let other = random_stable_tree(&mut r, n);
        for (a, b) in [(&small, &big), (&big, &small), (&other, &big), (&big, &other)] {
            prop_assert_eq!(is_compatible(a, b), compatible(a, b));
        }
        prop_assert!(is_compatible(&small, &big));
    }

    #[test]
    fn compatibility_is_transitive_along_leaf_restrictions(seed in any::<u64>(), n in 5usize..12) {
        let mut r = rng(seed);
        let t = random_stable_tree(&mut r, n);
        let m = graftree_core::MarkedTreeOfSpheres::with_neighbor_labels(t.clone());
        let leaves: Vec<String> = t.leaf_set().into_iter().collect();
        let mid: BTreeSet<String> = leaves.iter().skip(1).cloned().collect();
        let low: BTreeSet<String> = leaves.iter().skip(2).cloned().collect();
        let t_mid = restrict_by_triples(&m, &mid);
        let t_low = restrict_by_triples(&t_mid, &low).tree().clone();
        prop_assert!(is_compatible(&t_low, t_mid.tree()));
        prop_assert!(is_compatible(t_mid.tree(), &t));
        prop_assert!(is_compatible(&t_low, &t));
    }

    #[test]
    fn embedding_matches_all_triples_oracle(seed in any::<u64>(), n in 3usize..11) {
        let mut r = rng(seed);
        let t = random_stable_tree(&mut r, n);
        let map = shuffle_internal_labels(&mut r, &t);
        let renamed = t.relabel(&map).unwrap();
        let got = embed_by_triples(&t, &renamed).unwrap();
        prop_assert_eq!(&got, &map);
        prop_assert_eq!(Some(got), embed_all_triples(&t, &renamed));
    }

    #[test]
    fn embedding_into_a_refinement(seed in any::<u64>(), n in 4usize..12) {
        let mut r = rng(seed);
        let t = random_stable_tree(&mut r, n);
        let m = graftree_core::MarkedTreeOfSpheres::with_neighbor_labels(t.clone());
        let keep: BTreeSet<String> = t.leaves().skip(1).map(str::to_owned).collect();
        let small = restrict_by_triples(&m, &keep).tree().clone();
        let map = shuffle_internal_labels(&mut r, &small);
        let renamed = small.relabel(&map).unwrap();
        let got = embed_by_triples(&renamed, &t).unwrap();
        let oracle = embed_all_triples(&renamed, &t).unwrap();
        prop_assert_eq!(&got, &oracle);
        prop_assert!(is_compatible(&renamed.relabel(&got).unwrap(), &t));
    }

    #[test]
    fn stable_equality_after_relabeling(seed in any::<u64>(), n in 3usize..20) {
        let mut r = rng(seed);
        let t = random_stable_tree(&mut r, n);
        let map = shuffle_internal_labels(&mut r, &t);
        let renamed = t.relabel(&map).unwrap();
        let back = renamed.relabel(&embed_by_triples(&renamed, &t).unwrap()).unwrap();
        prop_assert!(assert_stable_equality(&back, &t).unwrap());
    }
}

#[test]
fn mismatched_leaf_structure_reports_a_triple() {
    let t1 = CombinatorialTree::from_edges(
        &["a", "b", "c", "d"],
        &[("a", "u"), ("b", "u"), ("u", "v"), ("v", "c"), ("v", "d")],
    )
    .unwrap();
    let t2 = CombinatorialTree::from_edges(
        &["a", "b", "c", "d"],
        &[("a", "p"), ("c", "p"), ("p", "q"), ("q", "b"), ("q", "d")],
    )
    .unwrap();
    match embed_by_triples(&t1, &t2) {
        Err(Error::TripleMismatch(triple)) => {
            let s: BTreeSet<&str> = triple.iter().map(String::as_str).collect();
            assert_eq!(s.len(), 3);
        }
        other => panic!("expected a triple mismatch, got {other:?}"),
    }
    assert!(!is_compatible(&t1, &t2));
    assert!(!compatible(&t1, &t2));
}

#[test]
fn unstable_trees_are_rejected_by_embedding() {
    let mut b = TreeBuilder::new();
    b.add_vertex("u", false);
    for l in ["a", "b", "c"] {
        b.attach_leaf("u", l).unwrap();
    }
    b.subdivide("u", "a", "w").unwrap();
    let t = b.build().unwrap();
    assert!(!t.is_stable());
    assert!(embed_by_triples(&t, &t).is_err());
}

#[test]
fn malformed_tree_documents_fail_to_parse() {
    for doc in [
        r#"{"vertices":["a","b","c"],"leaves":["a","b"],"edges":[["a","b"]]}"#,
        r#"{"vertices":["a","b","c"],"leaves":["a","b","c"],"edges":[["a","b"],["b","c"],["a","c"]]}"#,
        r#"{"vertices":["a","b"],"leaves":["a","b"],"edges":[["a","x"]]}"#,
    ] {
        assert!(
            serde_json::from_str::<CombinatorialTree>(doc).is_err(),
            "{doc}"
        );
    }
}
