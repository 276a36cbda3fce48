//! The seed system and whole-state validation.

use std::collections::BTreeMap;

use super::lift::{lift_system, LiftSpec};
use super::state::{GraftState, Roles};
use crate::dynamics::{
    count_independent_nonmonomial_cycles, find_cycles, iterate_vertex, sphere_cycle, Orbit,
};
use crate::error::{Error, Result};
use crate::report::{Report, ViolationKind as K};
use crate::spheres::{
    check_translation, global_degree, validate_system, DynamicalTreeMap, MarkedTreeOfSpheres,
};
use crate::tree::CombinatorialTree;

/// The shipped seed, in canonical form.
pub const SEED_JSON: &str = include_str!("../../data/seed.json");

pub const SEED_NOTE: &str =
    "Degree-3 seed: fixed sphere x and period-4 sphere cycle c0 -> c1 -> c2 -> c3. \
One validated realization of the required combinatorics; the adjacency is reconstructed, \
not transcribed from a drawing. Regenerate with graftree_core::grafting::build_seed.";

pub const SEED_DEGREE: u32 = 3;
pub const SEED_CYCLE_PERIOD: usize = 4;

fn s(v: &str) -> String {
    v.to_owned()
}

/// Dynamical-tree data of the seed, to be completed by [`lift_system`].
pub fn seed_spec() -> LiftSpec {
    let mut x_edges = vec![(s("x"), s("e"))];
    for i in 0..4 {
        x_edges.push((s("x"), format!("c{i}")));
        x_edges.push((format!("c{i}"), format!("a{i}")));
        x_edges.push((format!("c{i}"), format!("b{i}")));
    }
    let x_leaves: Vec<String> = (0..4)
        .flat_map(|i| [format!("a{i}"), format!("b{i}")])
        .chain([s("e")])
        .collect();
    let x_vertices: Vec<String> = x_edges
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    let x = CombinatorialTree::new(x_vertices.clone(), x_leaves.clone(), x_edges.clone())
        .expect("seed tree");

    let mut z_edges = x_edges;
    z_edges.push((s("x"), s("e1")));
    let z = CombinatorialTree::new(
        x_vertices.into_iter().chain([s("e1")]),
        x_leaves.into_iter().chain([s("e1")]),
        z_edges,
    )
    .expect("seed target tree");

    let mut image = BTreeMap::from([(s("x"), s("x")), (s("e"), s("e1"))]);
    for i in 0..4 {
        let j = (i + 1) % 4;
        for p in ["a", "b", "c"] {
            image.insert(format!("{p}{i}"), format!("{p}{j}"));
        }
    }
    let leaf_degree = x
        .leaves()
        .map(|l| {
            (
                s(l),
                if ["a0", "a1", "b0", "b2"].contains(&l) {
                    2
                } else {
                    1
                },
            )
        })
        .collect();
    let vertex_degree = BTreeMap::from([
        (s("x"), 2),
        (s("c0"), 2),
        (s("c1"), 2),
        (s("c2"), 2),
        (s("c3"), 1),
    ]);
    let degrees = |pairs: &[(&str, u32)]| {
        pairs
            .iter()
            .map(|(w, d)| (s(w), *d))
            .collect::<BTreeMap<_, _>>()
    };
    let local_degree = BTreeMap::from([
        (
            s("x"),
            degrees(&[("c0", 1), ("c1", 2), ("c2", 2), ("c3", 1), ("e", 1)]),
        ),
        (s("c0"), degrees(&[("x", 1), ("a0", 2), ("b0", 2)])),
        (s("c1"), degrees(&[("x", 2), ("a1", 2), ("b1", 1)])),
        (s("c2"), degrees(&[("x", 2), ("a2", 1), ("b2", 2)])),
        (s("c3"), degrees(&[("x", 1), ("a3", 1), ("b3", 1)])),
    ]);
    LiftSpec {
        dynamic: MarkedTreeOfSpheres::with_neighbor_labels(x),
        target: MarkedTreeOfSpheres::with_neighbor_labels(z),
        image,
        leaf_degree,
        vertex_degree,
        local_degree,
    }
}

/// Builds the seed state from [`seed_spec`]; the shipped file is its canonical form.
pub fn build_seed() -> Result<GraftState> {
    let system = lift_system(&seed_spec())?;
    let certified = count_independent_nonmonomial_cycles(&system)?;
    let state = GraftState {
        note: SEED_NOTE.to_owned(),
        system,
        roles: Roles {
            fixed: s("x"),
            graft_leaf: s("a0"),
            graft_target: s("x"),
            seed_cycle: vec![s("c0"), s("c1"), s("c2"), s("c3")],
            certified_cycles: certified,
        },
        graft: None,
    };
    validate_state(&state).into_result(Error::SeedRejected)?;
    Ok(state)
}

/// Parses a seed document and rejects it unless every seed check passes.
pub fn load_seed(doc: &str) -> Result<GraftState> {
    let state = GraftState::from_json(doc)?;
    validate_state(&state).into_result(Error::SeedRejected)?;
    Ok(state)
}

/// The shipped seed.
pub fn default_seed() -> GraftState {
    load_seed(SEED_JSON).expect("the shipped seed is valid")
}

/// All checks on a state: the system, its tree-level cross-check, degree 3,
/// the designated vertices and cycles, the recorded count, and the grafting
/// bookkeeping when present.
pub fn validate_state(state: &GraftState) -> Report {
    let sys = &state.system;
    let mut r = validate_system(sys);
    if r.is_empty() {
        r.extend(check_translation(sys, &state.tree_map()));
        if state.graft.is_some() {
            // The recorded map must also agree with the cover's own restriction.
            r.extend(check_translation(sys, &DynamicalTreeMap::restrict(sys)));
        }
    }

    match global_degree(&sys.cover) {
        Ok(SEED_DEGREE) => {}
        Ok(d) => r.push(
            K::GlobalDegree,
            "*",
            format!("global degree is {d}, expected {SEED_DEGREE}"),
        ),
        Err(e) => r.push(K::GlobalDegree, "*", e.to_string()),
    }

    let roles = &state.roles;
    let x = sys.x_tree();
    if !x.is_internal(&roles.fixed) || sys.cover.image(&roles.fixed) != Some(roles.fixed.as_str()) {
        r.push(
            K::MissingCycle,
            &roles.fixed,
            "designated vertex is not a fixed internal vertex",
        );
    }
    match sphere_cycle(sys, &roles.seed_cycle) {
        Ok(c) if c.period == SEED_CYCLE_PERIOD => {
            let minimal = roles
                .seed_cycle
                .iter()
                .collect::<std::collections::BTreeSet<_>>()
                .len()
                == c.period;
            if !minimal {
                r.push(
                    K::MissingCycle,
                    roles.seed_cycle.join(","),
                    "designated cycle repeats a vertex",
                );
            }
        }
        Ok(c) => r.push(
            K::MissingCycle,
            roles.seed_cycle.join(","),
            format!(
                "designated cycle has period {}, expected {SEED_CYCLE_PERIOD}",
                c.period
            ),
        ),
        Err(e) => r.push(
            K::MissingCycle,
            roles.seed_cycle.join(","),
            format!("designated cycle is broken: {e}"),
        ),
    }
    match find_cycles(sys) {
        Ok(cycles) => {
            if !cycles.iter().any(|c| c.period == SEED_CYCLE_PERIOD) {
                r.push(
                    K::MissingCycle,
                    "*",
                    format!("no cycle of period {SEED_CYCLE_PERIOD}"),
                );
            }
        }
        Err(e) => r.push(K::MissingCycle, "*", e.to_string()),
    }

    if !x.is_leaf(&roles.graft_leaf) {
        r.push(
            K::Seed,
            &roles.graft_leaf,
            "grafting leaf is not a leaf of the dynamical tree",
        );
    } else if leaf_period(state).is_none() {
        r.push(K::Seed, &roles.graft_leaf, "grafting leaf is not periodic");
    } else if sys
        .cover
        .portrait
        .get(&roles.graft_leaf)
        .map_or(0, |p| p.degree)
        < 2
    {
        r.push(K::Seed, &roles.graft_leaf, "grafting leaf is not critical");
    }
    if !x.contains(&roles.graft_target) {
        r.push(
            K::Seed,
            &roles.graft_target,
            "grafting target is not a vertex of the dynamical tree",
        );
    }
    match count_independent_nonmonomial_cycles(sys) {
        Ok(n) if n == roles.certified_cycles => {}
        Ok(n) => r.push(
            K::Seed,
            "certified_cycles",
            format!(
                "recorded {} certified cycles, analysis finds {n}",
                roles.certified_cycles
            ),
        ),
        Err(e) => r.push(K::Seed, "certified_cycles", e.to_string()),
    }

    if state.graft.is_some() {
        r.extend(super::graft::check_graft_info(state));
    }
    r
}

fn leaf_period_bound(state: &GraftState) -> usize {
    state.system.x_tree().len()
}

/// Period of the grafting leaf under `F`, if its orbit returns within the dynamical tree.
pub fn leaf_period(state: &GraftState) -> Option<usize> {
    let sys = &state.system;
    let x0 = &state.roles.graft_leaf;
    let mut cur = x0.clone();
    for step in 1..=leaf_period_bound(state) {
        match iterate_vertex(sys, &cur, 1).ok()? {
            Orbit::Reached { vertex } => cur = vertex,
            Orbit::Escaped { .. } => return None,
        }
        if &cur == x0 {
            return Some(step);
        }
    }
    None
}
