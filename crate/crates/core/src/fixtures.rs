//! Reference topologies and seeded random instance generators.

use rand::Rng;

use crate::coverage::{covering_disks, crossing_points, face_bound};
use crate::topology::{build_graph, Peer, Topology};
use crate::unsafe_pairs::{enumerate_unsafe_pairs, PsmMode, UnsafePairSet};

fn topo(r: f64, pts: &[(&str, f64, f64)]) -> Topology {
    Topology::new(r, pts.iter().map(|&(id, x, y)| Peer::new(id, x, y)).collect()).expect("fixture is valid")
}

/// Triangle `i, j, k` with pairwise distances below the range and one leaf
/// hanging off each vertex. `U = {(i,j), (j,k), (i,k)}`.
pub fn faces() -> Topology {
    topo(
        10.0,
        &[("i", 0.0, 0.0), ("j", 8.0, 0.0), ("k", 4.0, 7.0), ("li", -8.0, -4.0), ("lj", 16.0, -4.0), ("lk", 4.0, 16.0)],
    )
}

/// Five peers that all hear each other.
pub fn single_hop() -> Topology {
    topo(10.0, &[("p1", 0.0, 0.0), ("p2", 4.0, 0.5), ("p3", 2.0, 3.0), ("p4", 0.7, -2.2), ("p5", 3.3, -2.6)])
}

/// Path `a - b - c`.
pub fn path3() -> Topology {
    topo(10.0, &[("a", 0.0, 0.0), ("b", 8.0, 0.0), ("c", 16.0, 0.0)])
}

/// Path `a - b - c - d`; only `(b, c)` is unsafe without power saving.
pub fn path4() -> Topology {
    topo(10.0, &[("a", 0.0, 0.0), ("b", 8.0, 0.0), ("c", 16.0, 0.0), ("d", 24.0, 0.0)])
}

/// Two copies of [`path4`] far apart.
pub fn two_far_paths() -> Topology {
    topo(
        10.0,
        &[
            ("a", 0.0, 0.0),
            ("b", 8.0, 0.0),
            ("c", 16.0, 0.0),
            ("d", 24.0, 0.0),
            ("e", 0.0, 100.0),
            ("f", 8.0, 100.0),
            ("g", 16.0, 100.0),
            ("h", 24.0, 100.0),
        ],
    )
}

/// Two unrelated links; every peer has degree one.
pub fn two_isolated_edges() -> Topology {
    topo(10.0, &[("a", 0.0, 0.0), ("b", 5.0, 0.0), ("c", 0.0, 50.0), ("d", 5.0, 50.0)])
}

/// Two parallel paths whose middle peers sit exactly `2R` apart, so their
/// circles touch.
pub fn tangent() -> Topology {
    topo(
        10.0,
        &[
            ("a", 0.0, 0.0),
            ("b", 8.0, 0.0),
            ("c", 16.0, 0.0),
            ("d", 24.0, 0.0),
            ("e", 0.0, 20.0),
            ("f", 8.0, 20.0),
            ("g", 16.0, 20.0),
            ("h", 24.0, 20.0),
        ],
    )
}

/// Square four-cycle (side 9, range 10).
pub fn four_cycle() -> Topology {
    topo(10.0, &[("a", 0.0, 0.0), ("b", 9.0, 0.0), ("c", 9.0, 9.0), ("d", 0.0, 9.0)])
}

/// Regular octagon of side 9 with range 10: a chordless eight-cycle whose
/// circumradius (~11.76) exceeds the range, so one point cannot hear it all.
pub fn octagon() -> Topology {
    let rc = 9.0 / (2.0 * (std::f64::consts::PI / 8.0).sin());
    let peers = (0..8)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / 4.0 + 0.1;
            Peer::new(format!("o{k}"), rc * a.cos(), rc * a.sin())
        })
        .collect();
    Topology::new(10.0, peers).expect("octagon is valid")
}

/// Two four-peer paths, 12 m apart and hidden from each other, whose middle
/// links are both within range of the origin.
pub fn two_clusters() -> Topology {
    topo(
        10.0,
        &[
            ("a1", -14.0, 6.0),
            ("a2", -6.0, 2.0),
            ("a3", -6.0, -2.0),
            ("a4", -14.0, -6.0),
            ("b1", 14.0, 6.0),
            ("b2", 6.0, 2.0),
            ("b3", 6.0, -2.0),
            ("b4", 14.0, -6.0),
        ],
    )
}

/// Spacing margins used by the random instance generator, as fractions of R.
#[derive(Debug, Clone, Copy)]
pub struct Spacing {
    /// Minimum distance of disk centers from each other and from `2R`.
    pub center: f64,
    /// Minimum distance of every crossing point from any third circle.
    pub crossing: f64,
}

impl Default for Spacing {
    fn default() -> Self {
        Self { center: 0.15, crossing: 0.04 }
    }
}

/// True when the circle arrangement of `U`'s endpoints is well separated.
pub fn well_spaced(t: &Topology, u: &UnsafePairSet, spacing: Spacing) -> bool {
    let r = t.radio_range();
    let disks = covering_disks(t, u);
    for (a, da) in disks.iter().enumerate() {
        for db in &disks[a + 1..] {
            let d = da.center.distance(db.center);
            if d < spacing.center * r || (d - 2.0 * r).abs() < spacing.center * r {
                return false;
            }
        }
    }
    let Ok(crossings) = crossing_points(&disks) else { return false };
    for (p, a, b) in &crossings {
        for (c, dc) in disks.iter().enumerate() {
            if c != *a && c != *b && (p.distance(dc.center) - r).abs() < spacing.crossing * r {
                return false;
            }
        }
    }
    // neighbor decisions far from the boundary
    let n = t.len();
    (0..n).all(|a| (a + 1..n).all(|b| (t.position(a).distance(t.position(b)) - r).abs() > 1e-6 * r))
}

/// A random topology whose covering disks number between 1 and `max_disks`
/// and whose arrangement passes [`well_spaced`].
pub fn random_coverage_instance<R: Rng>(
    rng: &mut R,
    max_disks: usize,
    mode: PsmMode,
    spacing: Spacing,
) -> (Topology, UnsafePairSet) {
    let r = 10.0;
    loop {
        let peers_n = rng.random_range(3..=max_disks + 2);
        let side = r * rng.random_range(1.2..3.0);
        let peers: Vec<Peer> = (0..peers_n)
            .map(|k| Peer::new(format!("n{k:02}"), rng.random_range(0.0..side), rng.random_range(0.0..side)))
            .collect();
        let Ok(t) = Topology::new(r, peers) else { continue };
        let u = enumerate_unsafe_pairs(&build_graph(&t), mode);
        let n = u.endpoints().len();
        if u.is_empty() || n > max_disks || !well_spaced(&t, &u, spacing) {
            continue;
        }
        debug_assert!(face_bound(n) >= 2);
        return (t, u);
    }
}
