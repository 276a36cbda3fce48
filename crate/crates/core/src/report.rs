use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Tree map shape: leaves/internal vertices, edges to edges, missing data.
    Structure,
    Equivariance,
    LocalCover,
    EdgeDegree,
    RiemannHurwitz,
    GlobalDegree,
    Compatibility,
    Identification,
    Stability,
    Translation,
    MissingCycle,
    Seed,
    Graft,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::Structure => "structure",
            ViolationKind::Equivariance => "equivariance",
            ViolationKind::LocalCover => "local-cover",
            ViolationKind::EdgeDegree => "edge-degree",
            ViolationKind::RiemannHurwitz => "riemann-hurwitz",
            ViolationKind::GlobalDegree => "global-degree",
            ViolationKind::Compatibility => "compatibility",
            ViolationKind::Identification => "identification",
            ViolationKind::Stability => "stability",
            ViolationKind::Translation => "translation",
            ViolationKind::MissingCycle => "missing-cycle",
            ViolationKind::Seed => "seed",
            ViolationKind::Graft => "graft",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending vertex, edge or leaf, as a printable label.
    pub location: String,
    pub detail: String,
}

/// A list of violated invariants. Empty means the checked object is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn push(
        &mut self,
        kind: ViolationKind,
        location: impl Into<String>,
        detail: impl Into<String>,
    ) {
        self.violations.push(Violation {
            kind,
            location: location.into(),
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn of_kind(&self, kind: ViolationKind) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.kind == kind)
    }

    pub fn into_result<E>(self, wrap: impl FnOnce(Report) -> E) -> Result<(), E> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(wrap(self))
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: no violations");
        }
        for v in &self.violations {
            writeln!(f, "{} @ {}: {}", v.kind.name(), v.location, v.detail)?;
        }
        Ok(())
    }
}
