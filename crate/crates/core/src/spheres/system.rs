use serde::{Deserialize, Serialize};

use super::{validate_cover, MarkedTreeOfSpheres, TreeCover};
use crate::report::{Report, ViolationKind as K};
use crate::tree::{is_compatible, CombinatorialTree};

/// A cover `F: 𝒯^Y → 𝒯^Z` together with a tree of spheres `𝒯^X` compatible
/// with both sides. Vertices and attaching points of `𝒯^X` are identified with
/// those of `𝒯^Y` and `𝒯^Z` by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicalTreeSystem {
    pub cover: TreeCover,
    pub dynamic: MarkedTreeOfSpheres,
}

impl DynamicalTreeSystem {
    pub fn x_tree(&self) -> &CombinatorialTree {
        self.dynamic.tree()
    }

    pub fn y_tree(&self) -> &CombinatorialTree {
        self.cover.source.tree()
    }

    pub fn z_tree(&self) -> &CombinatorialTree {
        self.cover.target.tree()
    }
}

/// Checks an embedded tree of spheres against an ambient one: compatibility,
/// leaf and internal types, and identified attaching points.
fn check_embedding(
    r: &mut Report,
    x: &MarkedTreeOfSpheres,
    ambient: &MarkedTreeOfSpheres,
    side: &str,
) {
    let (tx, ta) = (x.tree(), ambient.tree());
    for l in tx.leaves() {
        if !ta.is_leaf(l) {
            r.push(
                K::Compatibility,
                l,
                format!("leaf of the dynamical tree is not a leaf of {side}"),
            );
        }
    }
    for v in tx.internal() {
        if !ta.is_internal(v) {
            r.push(
                K::Compatibility,
                v,
                format!("internal vertex is not an internal vertex of {side}"),
            );
        }
    }
    if !r.is_empty() {
        return;
    }
    if !is_compatible(tx, ta) {
        r.push(
            K::Compatibility,
            side,
            "dynamical tree is not compatible with this tree",
        );
        return;
    }
    for (v, pts) in x.attachments() {
        for (w, p) in pts {
            let arc = ta.arc(v, w).expect("vertices of the ambient tree");
            let q = ambient.point(v, &arc[1]);
            if q != Some(p.as_str()) {
                r.push(
                    K::Identification,
                    format!("{v}:{p}"),
                    format!(
                        "attaching point towards {w} is {} in {side}",
                        q.unwrap_or("?")
                    ),
                );
            }
        }
    }
}

/// Validates the cover, stability of the three trees, and the identification
/// of the dynamical tree inside source and target.
pub fn validate_system(sys: &DynamicalTreeSystem) -> Report {
    let mut r = validate_cover(&sys.cover);
    for (name, t) in [
        ("X", sys.x_tree()),
        ("Y", sys.y_tree()),
        ("Z", sys.z_tree()),
    ] {
        if !t.is_stable() {
            let bad: Vec<&str> = t
                .internal()
                .filter(|v| t.degree(v).unwrap_or(0) < 3)
                .collect();
            r.push(
                K::Stability,
                name,
                format!("vertices with fewer than three edges: {}", bad.join(", ")),
            );
        }
    }
    let mut emb = Report::new();
    check_embedding(&mut emb, &sys.dynamic, &sys.cover.source, "source");
    r.extend(emb);
    let mut emb = Report::new();
    check_embedding(&mut emb, &sys.dynamic, &sys.cover.target, "target");
    r.extend(emb);
    r
}
