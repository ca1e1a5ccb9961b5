//! Altruist placement: unsafe pairs, then orphanages, then a set cover.

pub mod arrangement;
pub mod cover;
pub mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::topology::{build_graph, AdjacencyGraph, Topology};
use crate::unsafe_pairs::{enumerate_unsafe_pairs, PsmMode, UnsafePairSet};

pub use arrangement::{
    arrangement_candidates, covered_at, covering_disks, crossing_points, enumerate_orphanages, face_bound,
    CoverageDisk, Orphanage, OrphanageSet, WitnessPoint,
};
pub use cover::{exact_cover_indices, greedy_cover_indices, DEFAULT_EXACT_LIMIT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverageError {
    #[error(
        "degenerate arrangement: circles of peers #{a} and #{b} are tangent or coincident \
         (center distance {distance}); perturb one of them"
    )]
    DegenerateArrangement { a: usize, b: usize, distance: f64 },
    #[error("no orphanage covers unsafe pair #{uncovered}")]
    Infeasible { uncovered: usize },
    #[error("minimum cover needs {minimum} altruists, over the budget of {budget}")]
    OverBudget { minimum: usize, budget: usize },
    #[error("{size} orphanages exceed the exact solver limit of {limit}")]
    LimitExceeded { size: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Altruist {
    pub position: Point,
    /// Index into the orphanage set.
    pub orphanage: usize,
    /// The orphanage's UP indices.
    pub covers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub altruists: Vec<Altruist>,
    pub solver: SolverKind,
    /// For each unsafe pair, the first chosen altruist that covers it.
    pub certificate: Vec<usize>,
}

impl Placement {
    pub fn k(&self) -> usize {
        self.altruists.len()
    }

    fn from_choice(up_count: usize, h: &OrphanageSet, chosen: &[usize], solver: SolverKind) -> Placement {
        let altruists: Vec<Altruist> = chosen
            .iter()
            .map(|&k| Altruist { position: h.orphanages[k].witness, orphanage: k, covers: h.orphanages[k].ups.clone() })
            .collect();
        let certificate = (0..up_count)
            .map(|u| {
                altruists.iter().position(|a| a.covers.binary_search(&u).is_ok()).expect("chosen orphanages cover U")
            })
            .collect();
        Placement { altruists, solver, certificate }
    }

    /// Independent geometric check: every unsafe pair's assigned altruist is
    /// within range of both endpoints.
    pub fn verify(&self, t: &Topology, u: &UnsafePairSet) -> Result<(), String> {
        if self.certificate.len() != u.len() {
            return Err(format!("certificate has {} entries for {} pairs", self.certificate.len(), u.len()));
        }
        let r = t.radio_range();
        for (pair, &a) in u.pairs().zip(&self.certificate) {
            let Some(alt) = self.altruists.get(a) else {
                return Err(format!("pair {pair} assigned to missing altruist {a}"));
            };
            if !(alt.position.within(t.position(pair.lo), r) && alt.position.within(t.position(pair.hi), r)) {
                return Err(format!(
                    "altruist at ({}, {}) does not hear both {} and {}",
                    alt.position.x,
                    alt.position.y,
                    t.id(pair.lo),
                    t.id(pair.hi)
                ));
            }
        }
        Ok(())
    }

    pub fn to_doc(&self, t: &Topology, u: &UnsafePairSet, orphanage_count: usize) -> PlacementDoc {
        let pair_ids = |k: usize| {
            let p = u.entries()[k].pair;
            [t.id(p.lo).to_string(), t.id(p.hi).to_string()]
        };
        PlacementDoc {
            altruists: self
                .altruists
                .iter()
                .map(|a| AltruistDoc {
                    x: a.position.x,
                    y: a.position.y,
                    covers: a.covers.iter().map(|&k| pair_ids(k)).collect(),
                })
                .collect(),
            k: self.k(),
            solver: self.solver,
            unsafe_pairs: (0..u.len()).map(pair_ids).collect(),
            orphanage_count,
            certificate: self.certificate.clone(),
        }
    }
}

/// Placement JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementDoc {
    pub altruists: Vec<AltruistDoc>,
    pub k: usize,
    pub solver: SolverKind,
    #[serde(rename = "U")]
    pub unsafe_pairs: Vec<[String; 2]>,
    pub orphanage_count: usize,
    /// Altruist index covering each entry of `U`.
    #[serde(default)]
    pub certificate: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltruistDoc {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub covers: Vec<[String; 2]>,
}

pub fn greedy_cover(u: &UnsafePairSet, h: &OrphanageSet) -> Result<Placement, CoverageError> {
    let chosen = greedy_cover_indices(u.len(), &h.up_sets())?;
    Ok(Placement::from_choice(u.len(), h, &chosen, SolverKind::Greedy))
}

pub fn exact_cover(u: &UnsafePairSet, h: &OrphanageSet, budget: Option<usize>) -> Result<Placement, CoverageError> {
    let chosen = exact_cover_indices(u.len(), &h.up_sets(), budget, DEFAULT_EXACT_LIMIT)?;
    Ok(Placement::from_choice(u.len(), h, &chosen, SolverKind::Exact))
}

/// Everything the planning pipeline derives from a topology.
#[derive(Debug, Clone)]
pub struct Plan {
    pub graph: AdjacencyGraph,
    pub unsafe_pairs: UnsafePairSet,
    pub disks: Vec<CoverageDisk>,
    pub orphanages: OrphanageSet,
    pub placement: Placement,
}

impl Plan {
    pub fn to_doc(&self, t: &Topology) -> PlacementDoc {
        self.placement.to_doc(t, &self.unsafe_pairs, self.orphanages.len())
    }
}

/// Full pipeline. `Exact` falls back to greedy when the orphanage family is
/// over the exact solver's limit; the placement records the solver used.
pub fn plan(t: &Topology, mode: PsmMode, solver: SolverKind) -> Result<Plan, CoverageError> {
    let graph = build_graph(t);
    let unsafe_pairs = enumerate_unsafe_pairs(&graph, mode);
    let disks = covering_disks(t, &unsafe_pairs);
    let orphanages =
        if unsafe_pairs.is_empty() { OrphanageSet::default() } else { enumerate_orphanages(t, &unsafe_pairs)? };
    let placement = match solver {
        SolverKind::Greedy => greedy_cover(&unsafe_pairs, &orphanages)?,
        SolverKind::Exact => match exact_cover(&unsafe_pairs, &orphanages, None) {
            Err(CoverageError::LimitExceeded { .. }) => greedy_cover(&unsafe_pairs, &orphanages)?,
            other => other?,
        },
    };
    Ok(Plan { graph, unsafe_pairs, disks, orphanages, placement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn faces_plan_places_one_altruist_covering_everything() {
        let t = fixtures::faces();
        let p = plan(&t, PsmMode::NoPsm, SolverKind::Exact).unwrap();
        assert_eq!(p.unsafe_pairs.len(), 3);
        assert_eq!(p.orphanages.len(), 4);
        assert_eq!(p.placement.k(), 1);
        assert_eq!(p.placement.altruists[0].covers, vec![0, 1, 2]);
        assert_eq!(covered_at(&t, &p.unsafe_pairs, p.placement.altruists[0].position), vec![0, 1, 2]);
        p.placement.verify(&t, &p.unsafe_pairs).unwrap();
        let g = plan(&t, PsmMode::NoPsm, SolverKind::Greedy).unwrap();
        assert_eq!(g.placement.k(), 1);
    }

    #[test]
    fn faces_decision_problem() {
        let t = fixtures::faces();
        let p = plan(&t, PsmMode::NoPsm, SolverKind::Greedy).unwrap();
        assert_eq!(exact_cover(&p.unsafe_pairs, &p.orphanages, Some(1)).unwrap().k(), 1);
        assert!(exact_cover(&p.unsafe_pairs, &p.orphanages, Some(0)).is_err());
    }

    #[test]
    fn no_unsafe_pairs_means_no_altruists() {
        let t = fixtures::two_isolated_edges();
        let p = plan(&t, PsmMode::NoPsm, SolverKind::Exact).unwrap();
        assert_eq!(p.placement.k(), 0);
        assert!(p.orphanages.is_empty());
        let doc = p.to_doc(&t);
        assert_eq!(doc.k, 0);
        assert!(doc.unsafe_pairs.is_empty());
    }

    #[test]
    fn placement_doc_round_trips_and_lists_ids() {
        let t = fixtures::faces();
        let p = plan(&t, PsmMode::NoPsm, SolverKind::Exact).unwrap();
        let doc = p.to_doc(&t);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"U\":[[\"i\",\"j\"],[\"i\",\"k\"],[\"j\",\"k\"]]"));
        let back: PlacementDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn verify_rejects_a_misplaced_altruist() {
        let t = fixtures::faces();
        let mut p = plan(&t, PsmMode::NoPsm, SolverKind::Exact).unwrap();
        p.placement.altruists[0].position = Point::new(100.0, 100.0);
        assert!(p.placement.verify(&t, &p.unsafe_pairs).is_err());
    }

    #[test]
    fn tangent_fixture_is_rejected() {
        let t = fixtures::tangent();
        assert!(matches!(
            plan(&t, PsmMode::NoPsm, SolverKind::Exact),
            Err(CoverageError::DegenerateArrangement { .. })
        ));
    }
}
