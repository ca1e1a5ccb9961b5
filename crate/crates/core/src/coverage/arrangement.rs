//! Faces of the circle arrangement formed by the radio boundaries of
//! UP-forming peers, and the orphanages (per-face covered UP sets) they give.

use std::collections::BTreeMap;

use crate::geom::{meet_equal_circles, nudge_around_crossing, CircleMeeting, Point};
use crate::topology::Topology;
use crate::unsafe_pairs::UnsafePairSet;

use super::CoverageError;

/// Center distances within this of `0` or `2R` are rejected as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Nudge length away from a crossing point, relative to the radio range.
pub const NUDGE_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageDisk {
    pub owner: usize,
    pub center: Point,
    pub radius: f64,
}

/// A sample point and the indices (into `U`) of the unsafe pairs an altruist
/// placed there would cover.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPoint {
    pub point: Point,
    pub covered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orphanage {
    /// Sorted indices into `U`; never empty.
    pub ups: Vec<usize>,
    pub witness: Point,
}

/// All orphanages of a network, sorted lexicographically by UP set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrphanageSet {
    pub orphanages: Vec<Orphanage>,
    /// Number of covering disks the arrangement was built from.
    pub disk_count: usize,
}

impl OrphanageSet {
    pub fn len(&self) -> usize {
        self.orphanages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orphanages.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Orphanage> {
        self.orphanages.iter()
    }

    pub fn up_sets(&self) -> Vec<Vec<usize>> {
        self.orphanages.iter().map(|h| h.ups.clone()).collect()
    }
}

/// Upper bound on the number of faces in an arrangement of `n` circles.
pub fn face_bound(n: usize) -> usize {
    n * n.saturating_sub(1) + 2
}

/// One disk per peer incident to at least one unsafe pair.
pub fn covering_disks(t: &Topology, u: &UnsafePairSet) -> Vec<CoverageDisk> {
    u.endpoints()
        .into_iter()
        .map(|owner| CoverageDisk { owner, center: t.position(owner), radius: t.radio_range() })
        .collect()
}

/// Pairwise circle crossings in canonical order (disk pairs ascending, left
/// crossing first). Fails on tangent or coincident circles.
pub fn crossing_points(disks: &[CoverageDisk]) -> Result<Vec<(Point, usize, usize)>, CoverageError> {
    let mut out = Vec::new();
    for (a, da) in disks.iter().enumerate() {
        for (b, db) in disks.iter().enumerate().skip(a + 1) {
            match meet_equal_circles(da.center, db.center, da.radius, DEGENERACY_TOL) {
                CircleMeeting::Disjoint => {}
                CircleMeeting::Crossing(l, r) => {
                    out.push((l, a, b));
                    out.push((r, a, b));
                }
                CircleMeeting::Degenerate => {
                    return Err(CoverageError::DegenerateArrangement {
                        a: da.owner,
                        b: db.owner,
                        distance: da.center.distance(db.center),
                    })
                }
            }
        }
    }
    Ok(out)
}

/// Sample points before annotation: four nudged copies of each crossing
/// followed by every disk center.
pub fn raw_candidates(disks: &[CoverageDisk]) -> Result<Vec<Point>, CoverageError> {
    let Some(first) = disks.first() else { return Ok(Vec::new()) };
    let eps = first.radius * NUDGE_FACTOR;
    let mut pts = Vec::new();
    for (p, a, b) in crossing_points(disks)? {
        pts.extend(nudge_around_crossing(p, disks[a].center, disks[b].center, eps));
    }
    pts.extend(disks.iter().map(|d| d.center));
    Ok(pts)
}

/// Covered unsafe pairs at `p`: pairs with both endpoints within range.
pub fn covered_at(t: &Topology, u: &UnsafePairSet, p: Point) -> Vec<usize> {
    let r = t.radio_range();
    u.pairs()
        .enumerate()
        .filter(|(_, pair)| p.within(t.position(pair.lo), r) && p.within(t.position(pair.hi), r))
        .map(|(k, _)| k)
        .collect()
}

/// Annotated candidates with a non-empty covered set.
pub fn arrangement_candidates(
    t: &Topology,
    u: &UnsafePairSet,
    disks: &[CoverageDisk],
) -> Result<Vec<WitnessPoint>, CoverageError> {
    Ok(raw_candidates(disks)?
        .into_iter()
        .map(|point| WitnessPoint { point, covered: covered_at(t, u, point) })
        .filter(|w| !w.covered.is_empty())
        .collect())
}

/// Distinct covered-UP sets over all faces, each with the first candidate
/// that witnessed it.
pub fn enumerate_orphanages(t: &Topology, u: &UnsafePairSet) -> Result<OrphanageSet, CoverageError> {
    let disks = covering_disks(t, u);
    let mut seen: BTreeMap<Vec<usize>, Point> = BTreeMap::new();
    for w in arrangement_candidates(t, u, &disks)? {
        seen.entry(w.covered).or_insert(w.point);
    }
    Ok(OrphanageSet {
        orphanages: seen.into_iter().map(|(ups, witness)| Orphanage { ups, witness }).collect(),
        disk_count: disks.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::topology::{build_graph, Peer, PeerPair};
    use crate::unsafe_pairs::{enumerate_unsafe_pairs, PsmMode};

    fn setup(t: &Topology) -> UnsafePairSet {
        enumerate_unsafe_pairs(&build_graph(t), PsmMode::NoPsm)
    }

    #[test]
    fn faces_fixture_has_three_disks_six_crossings_four_orphanages() {
        let t = fixtures::faces();
        let u = setup(&t);
        let disks = covering_disks(&t, &u);
        let owners: Vec<&str> = disks.iter().map(|d| t.id(d.owner)).collect();
        assert_eq!(owners, ["i", "j", "k"]);
        assert_eq!(crossing_points(&disks).unwrap().len(), 6);
        let h = enumerate_orphanages(&t, &u).unwrap();
        // U is ordered (i,j), (i,k), (j,k)
        assert_eq!(h.up_sets(), vec![vec![0], vec![0, 1, 2], vec![1], vec![2]]);
        assert!(h.len() <= face_bound(disks.len()));
    }

    #[test]
    fn two_disk_candidates() {
        let t = Topology::new(10.0, vec![Peer::new("a", 0.0, 0.0), Peer::new("b", 12.0, 0.0)]).unwrap();
        let disks: Vec<CoverageDisk> =
            (0..2).map(|owner| CoverageDisk { owner, center: t.position(owner), radius: 10.0 }).collect();
        let crossings = crossing_points(&disks).unwrap();
        assert_eq!(crossings.len(), 2);
        assert!((crossings[0].0.y - 8.0).abs() < 1e-12);
        assert_eq!(raw_candidates(&disks).unwrap().len(), 8 + 2);
    }

    #[test]
    fn single_disk_yields_its_center() {
        let d = [CoverageDisk { owner: 0, center: Point::new(1.0, 2.0), radius: 3.0 }];
        assert_eq!(raw_candidates(&d).unwrap(), vec![Point::new(1.0, 2.0)]);
        assert!(raw_candidates(&[]).unwrap().is_empty());
    }

    #[test]
    fn tangent_disks_are_rejected() {
        let d = [
            CoverageDisk { owner: 0, center: Point::new(0.0, 0.0), radius: 5.0 },
            CoverageDisk { owner: 1, center: Point::new(10.0, 0.0), radius: 5.0 },
        ];
        assert!(matches!(crossing_points(&d), Err(CoverageError::DegenerateArrangement { a: 0, b: 1, .. })));
    }

    #[test]
    fn single_up_gives_one_lens_orphanage() {
        // path a-b-c-d: only (b, c) is unsafe
        let t = fixtures::path4();
        let u = setup(&t);
        assert_eq!(u.pairs().collect::<Vec<_>>(), vec![PeerPair::new(1, 2)]);
        assert_eq!(covering_disks(&t, &u).len(), 2);
        let h = enumerate_orphanages(&t, &u).unwrap();
        assert_eq!(h.up_sets(), vec![vec![0]]);
        let w = h.orphanages[0].witness;
        assert!(w.within(t.position(1), 10.0) && w.within(t.position(2), 10.0));
    }

    #[test]
    fn distant_unsafe_pairs_stay_separate() {
        let t = fixtures::two_far_paths();
        let u = setup(&t);
        assert_eq!(u.len(), 2);
        let h = enumerate_orphanages(&t, &u).unwrap();
        assert_eq!(h.up_sets(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn witnesses_cover_exactly_their_orphanage() {
        let t = fixtures::faces();
        let u = setup(&t);
        for h in enumerate_orphanages(&t, &u).unwrap().iter() {
            assert_eq!(covered_at(&t, &u, h.witness), h.ups);
        }
    }
}
