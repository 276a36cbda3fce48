//! Iteration on a dynamical system between trees of spheres: orbits, periodic
//! sphere cycles, their return correspondences, and refutations of the
//! power-map shape.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spheres::DynamicalTreeSystem;

/// Where an orbit ends up after a number of steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Orbit {
    Reached {
        vertex: String,
    },
    /// The iterate at `step` is `vertex`, which lies outside the dynamical tree.
    Escaped {
        step: usize,
        vertex: String,
    },
}

/// Applies `F` `steps` times to a vertex of the dynamical tree.
pub fn iterate_vertex(sys: &DynamicalTreeSystem, v: &str, steps: usize) -> Result<Orbit> {
    let x = sys.x_tree();
    if !x.contains(v) || !sys.y_tree().contains(v) {
        return Err(Error::InvalidArgument(format!(
            "{v} is not a vertex of the dynamical tree inside the source"
        )));
    }
    let mut cur = v.to_owned();
    for step in 1..=steps {
        let next = sys
            .cover
            .image(&cur)
            .ok_or_else(|| Error::CorruptCover(format!("{cur} has no image")))?;
        if !x.contains(next) {
            return Ok(Orbit::Escaped {
                step,
                vertex: next.to_owned(),
            });
        }
        cur = next.to_owned();
    }
    Ok(Orbit::Reached { vertex: cur })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnPoint {
    pub image: String,
    pub degree: u64,
}

/// A periodic cycle of internal spheres of the dynamical tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereCycle {
    /// `v₀ → F(v₀) → …`, starting at the smallest label.
    pub vertices: Vec<String>,
    pub period: usize,
    /// Product of the sphere degrees along the cycle.
    pub return_degree: u64,
    /// Composition of the sphere maps on attaching points of `v₀` whose
    /// intermediate images stay on attaching points of the dynamical tree.
    pub return_map: BTreeMap<String, ReturnPoint>,
    /// Attaching points of `v₀` whose images leave the dynamical tree's
    /// attaching points before returning.
    pub unmarked: BTreeSet<String>,
}

impl SphereCycle {
    pub fn is_critical(&self) -> bool {
        self.return_degree >= 2
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.iter().any(|u| u == v)
    }

    /// Points of `v₀` at which the return correspondence is ramified.
    pub fn ramified(&self) -> BTreeMap<&str, u64> {
        self.return_map
            .iter()
            .filter(|(_, r)| r.degree >= 2)
            .map(|(p, r)| (p.as_str(), r.degree))
            .collect()
    }

    /// Images of ramified points.
    pub fn critical_values(&self) -> BTreeSet<&str> {
        self.return_map
            .values()
            .filter(|r| r.degree >= 2)
            .map(|r| r.image.as_str())
            .collect()
    }

    /// Total composed degree over each image point.
    pub fn fiber_sums(&self) -> BTreeMap<&str, u64> {
        let mut sums = BTreeMap::new();
        for r in self.return_map.values() {
            *sums.entry(r.image.as_str()).or_insert(0) += r.degree;
        }
        sums
    }
}

pub fn is_critical_cycle(c: &SphereCycle) -> bool {
    c.is_critical()
}

/// Builds the cycle data for `vertices`, checking that `F` permutes them cyclically.
pub fn sphere_cycle(sys: &DynamicalTreeSystem, vertices: &[String]) -> Result<SphereCycle> {
    let k = vertices.len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty cycle".into()));
    }
    let c = &sys.cover;
    let mut return_degree = 1u64;
    for (i, v) in vertices.iter().enumerate() {
        if !sys.x_tree().is_internal(v) {
            return Err(Error::InvalidArgument(format!(
                "{v} is not an internal vertex of the dynamical tree"
            )));
        }
        if c.image(v) != Some(vertices[(i + 1) % k].as_str()) {
            return Err(Error::InvalidArgument(format!(
                "{v} does not map to {}",
                vertices[(i + 1) % k]
            )));
        }
        let d = c
            .vertex_degree(v)
            .ok_or_else(|| Error::CorruptCover(format!("no sphere degree at {v}")))?;
        return_degree *= u64::from(d);
    }

    let start = &vertices[0];
    let mut return_map = BTreeMap::new();
    let mut unmarked = BTreeSet::new();
    'points: for p in c.source.points(start) {
        let mut cur = p;
        let mut degree = 1u64;
        for i in 0..k {
            let v = &vertices[i];
            let lookup = || -> Option<(u32, &str)> {
                Some((
                    *c.local_degrees.get(v)?.get(cur)?,
                    c.point_images.get(v)?.get(cur)?.as_str(),
                ))
            };
            let (d, q) = lookup()
                .ok_or_else(|| Error::CorruptCover(format!("no sphere data for {cur} at {v}")))?;
            degree *= u64::from(d);
            if i + 1 == k {
                return_map.insert(
                    p.to_owned(),
                    ReturnPoint {
                        image: q.to_owned(),
                        degree,
                    },
                );
            } else if sys.dynamic.points(&vertices[i + 1]).contains(q) {
                cur = q;
            } else {
                unmarked.insert(p.to_owned());
                continue 'points;
            }
        }
    }
    Ok(SphereCycle {
        vertices: vertices.to_vec(),
        period: k,
        return_degree,
        return_map,
        unmarked,
    })
}

/// All periodic cycles of internal vertices of the dynamical tree, each
/// starting at its smallest label, sorted by that label.
pub fn find_cycles(sys: &DynamicalTreeSystem) -> Result<Vec<SphereCycle>> {
    let x = sys.x_tree();
    let bound = x.len();
    let mut done: BTreeSet<String> = BTreeSet::new();
    let mut cycles = Vec::new();
    for v in x.internal() {
        if done.contains(v) {
            continue;
        }
        let mut path: Vec<String> = vec![v.to_owned()];
        let mut pos: BTreeMap<String, usize> = BTreeMap::from([(v.to_owned(), 0)]);
        let mut cycle = None;
        for _ in 0..=bound {
            let cur = path.last().unwrap();
            let next = match sys.cover.image(cur) {
                Some(n) if x.is_internal(n) => n.to_owned(),
                _ => break,
            };
            if done.contains(&next) {
                break;
            }
            if let Some(&i) = pos.get(&next) {
                cycle = Some(path[i..].to_vec());
                break;
            }
            pos.insert(next.clone(), path.len());
            path.push(next);
        }
        done.extend(path);
        if let Some(mut c) = cycle {
            let m = c
                .iter()
                .enumerate()
                .min_by_key(|(_, l)| l.as_str())
                .map(|(i, _)| i)
                .unwrap();
            c.rotate_left(m);
            cycles.push(sphere_cycle(sys, &c)?);
        }
    }
    cycles.sort_by(|a, b| a.vertices[0].cmp(&b.vertices[0]));
    Ok(cycles)
}

/// Evidence that a return correspondence is not that of a power map
/// `z ↦ z^{±D}`, which has exactly two critical points, each totally ramified
/// and the only preimage of its critical value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Witness {
    /// A point that is ramified or a critical value has a preimage of
    /// composed degree below the return degree.
    DegreeDrop {
        point: String,
        preimage: String,
        degree: u64,
    },
    /// More than two ramified points.
    ExtraCritical { ramified: BTreeMap<String, u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonMonomialCertificate {
    pub cycle: Vec<String>,
    pub return_degree: u64,
    pub witness: Witness,
}

fn find_witness(c: &SphereCycle, sys: &DynamicalTreeSystem) -> Option<Witness> {
    let ramified = c.ramified();
    if ramified.len() > 2 {
        return Some(Witness::ExtraCritical {
            ramified: ramified
                .iter()
                .map(|(p, d)| ((*p).to_owned(), *d))
                .collect(),
        });
    }
    let shared = sys.dynamic.points(&c.vertices[0]);
    let mut candidates: BTreeSet<&str> = ramified
        .keys()
        .copied()
        .filter(|p| shared.contains(p))
        .collect();
    candidates.extend(c.critical_values());
    for q in candidates {
        for (p, r) in &c.return_map {
            if r.image == q && r.degree < c.return_degree {
                return Some(Witness::DegreeDrop {
                    point: q.to_owned(),
                    preimage: p.clone(),
                    degree: r.degree,
                });
            }
        }
    }
    None
}

/// A sound (not complete) refutation of the power-map shape for a critical cycle.
pub fn non_monomial_certificate(
    sys: &DynamicalTreeSystem,
    c: &SphereCycle,
) -> Result<Option<NonMonomialCertificate>> {
    if !c.is_critical() {
        return Err(Error::InvalidArgument(format!(
            "cycle through {} has return degree {} and is not critical",
            c.vertices[0], c.return_degree
        )));
    }
    Ok(find_witness(c, sys).map(|witness| NonMonomialCertificate {
        cycle: c.vertices.clone(),
        return_degree: c.return_degree,
        witness,
    }))
}

/// Re-derives the cycle from the system and checks the stored witness against it.
pub fn recheck_certificate(sys: &DynamicalTreeSystem, cert: &NonMonomialCertificate) -> bool {
    let Ok(c) = sphere_cycle(sys, &cert.cycle) else {
        return false;
    };
    if c.return_degree != cert.return_degree || !c.is_critical() {
        return false;
    }
    match &cert.witness {
        Witness::ExtraCritical { ramified } => {
            ramified.len() > 2
                && ramified
                    .iter()
                    .all(|(p, d)| *d >= 2 && c.return_map.get(p).is_some_and(|r| r.degree == *d))
        }
        Witness::DegreeDrop {
            point,
            preimage,
            degree,
        } => {
            let Some(r) = c.return_map.get(preimage) else {
                return false;
            };
            let shared = sys.dynamic.points(&c.vertices[0]);
            let is_ramified = c.return_map.get(point).is_some_and(|r| r.degree >= 2)
                && shared.contains(point.as_str());
            let is_value = c.critical_values().contains(point.as_str());
            r.image == *point
                && r.degree == *degree
                && *degree < c.return_degree
                && (is_ramified || is_value)
        }
    }
}

/// Critical cycles with a certificate. Cycles of a map are pairwise disjoint.
pub fn certified_cycles(
    sys: &DynamicalTreeSystem,
) -> Result<Vec<(SphereCycle, NonMonomialCertificate)>> {
    let mut out = Vec::new();
    for c in find_cycles(sys)? {
        if c.is_critical() {
            if let Some(cert) = non_monomial_certificate(sys, &c)? {
                out.push((c, cert));
            }
        }
    }
    Ok(out)
}

/// Number of pairwise vertex-disjoint critical cycles carrying a certificate.
pub fn count_independent_nonmonomial_cycles(sys: &DynamicalTreeSystem) -> Result<usize> {
    let certified = certified_cycles(sys)?;
    let mut seen = BTreeSet::new();
    for (c, _) in &certified {
        for v in &c.vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::CorruptCover(format!("cycles overlap at {v}")));
            }
        }
    }
    Ok(certified.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleSummary {
    pub vertices: Vec<String>,
    pub period: usize,
    pub return_degree: u64,
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub cycles: usize,
    pub critical: usize,
    pub certified: usize,
}

/// Canonical analysis report of a system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub global_degree: u32,
    pub cycles: Vec<CycleSummary>,
    pub certificates: Vec<NonMonomialCertificate>,
    pub counts: Counts,
}

pub fn analyze(sys: &DynamicalTreeSystem) -> Result<Analysis> {
    let global_degree = crate::spheres::global_degree(&sys.cover)?;
    let cycles = find_cycles(sys)?;
    let mut certificates = Vec::new();
    for c in cycles.iter().filter(|c| c.is_critical()) {
        if let Some(cert) = non_monomial_certificate(sys, c)? {
            certificates.push(cert);
        }
    }
    let counts = Counts {
        cycles: cycles.len(),
        critical: cycles.iter().filter(|c| c.is_critical()).count(),
        certified: certificates.len(),
    };
    Ok(Analysis {
        global_degree,
        cycles: cycles
            .iter()
            .map(|c| CycleSummary {
                vertices: c.vertices.clone(),
                period: c.period,
                return_degree: c.return_degree,
                critical: c.is_critical(),
            })
            .collect(),
        certificates,
        counts,
    })
}
