use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spheres::{DynamicalTreeMap, DynamicalTreeSystem};

/// Designated vertices of the seed, carried through every generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roles {
    /// The fixed internal vertex `x`.
    pub fixed: String,
    /// `x₀`: the periodic critical leaf whose branch gets grafted.
    pub graft_leaf: String,
    /// `x₁`: the other end of the grafting arc.
    pub graft_target: String,
    /// The period-4 cycle of the seed, starting at its smallest label.
    pub seed_cycle: Vec<String>,
    /// Number of certified non-monomial critical cycles, as re-derived by analysis.
    pub certified_cycles: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub root: String,
    pub vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub copy_index: usize,
    pub original: String,
}

/// Bookkeeping of the most recent grafting step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraftInfo {
    pub generation: usize,
    /// `B₀`: the branch at `v₀` containing `x₀`.
    pub branch_b0: Branch,
    /// The new cycle `v₀, …, v_{k−1}`.
    pub cycle: Vec<String>,
    /// Grafted vertex → (copy index `i` of `B_i`, original vertex of `B₀`).
    pub copies: BTreeMap<String, Provenance>,
    /// The involution exchanging `B₀` and `B_k`; identity elsewhere.
    pub involution: BTreeMap<String, String>,
    /// The tree-level map built directly by the grafting recipe.
    pub tree_map: DynamicalTreeMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraftState {
    pub note: String,
    pub system: DynamicalTreeSystem,
    pub roles: Roles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graft: Option<GraftInfo>,
}

impl GraftState {
    pub fn generation(&self) -> usize {
        self.graft.as_ref().map_or(0, |g| g.generation)
    }

    /// The tree-level map to cross-check against: the one recorded by the last
    /// grafting step, or the restriction of the cover for a seed.
    pub fn tree_map(&self) -> DynamicalTreeMap {
        match &self.graft {
            Some(g) => g.tree_map.clone(),
            None => DynamicalTreeMap::restrict(&self.system),
        }
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        Ok(serde_json::from_str(doc)?)
    }

    /// Canonical serialization: pretty JSON with sorted maps and a trailing newline.
    pub fn to_json(&self) -> String {
        crate::format::to_canonical_json(self)
    }

    /// Applies the involution to a label (identity off its support).
    pub fn involution(&self, v: &str) -> String {
        self.graft
            .as_ref()
            .and_then(|g| g.involution.get(v).cloned())
            .unwrap_or_else(|| v.to_owned())
    }
}
