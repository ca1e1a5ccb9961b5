//! Brute-force references for the planner: orphanages by dense sampling
//! and minimum covers by exhaustive search.

use std::collections::BTreeSet;

use crate::coverage::covered_at;
use crate::geom::Point;
use crate::topology::Topology;
use crate::unsafe_pairs::UnsafePairSet;

/// Grid pitch as a fraction of the radio range.
pub const GRID_PITCH: f64 = 1.0 / 200.0;

/// Distinct non-empty covered sets over a grid with pitch `pitch * R`
/// spanning the bounding box of `U`'s endpoints inflated by `R`.
pub fn grid_orphanages(t: &Topology, u: &UnsafePairSet, pitch: f64) -> BTreeSet<Vec<usize>> {
    let ends = u.endpoints();
    let mut out = BTreeSet::new();
    if ends.is_empty() {
        return out;
    }
    let r = t.radio_range();
    let xs = ends.iter().map(|&v| t.position(v).x);
    let ys = ends.iter().map(|&v| t.position(v).y);
    let (x0, x1) = (xs.clone().fold(f64::INFINITY, f64::min) - r, xs.fold(f64::NEG_INFINITY, f64::max) + r);
    let (y0, y1) = (ys.clone().fold(f64::INFINITY, f64::min) - r, ys.fold(f64::NEG_INFINITY, f64::max) + r);
    let h = pitch * r;
    let nx = ((x1 - x0) / h).ceil() as usize;
    let ny = ((y1 - y0) / h).ceil() as usize;
    for a in 0..=nx {
        for b in 0..=ny {
            let p = Point::new(x0 + a as f64 * h, y0 + b as f64 * h);
            let c = covered_at(t, u, p);
            if !c.is_empty() {
                out.insert(c);
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return visit(cur);
        }
        for i in start..n {
            cur.push(i);
            if go(i + 1, n, k, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(0, n, k, &mut Vec::with_capacity(k), &mut visit);
}

/// Smallest cover by trying every subset in order of size; `None` when the
/// sets do not cover the universe.
pub fn brute_force_cover(universe: usize, sets: &[Vec<usize>]) -> Option<Vec<usize>> {
    for k in 0..=sets.len() {
        let mut found = None;
        combinations(sets.len(), k, |pick| {
            let mut hit = vec![false; universe];
            for &s in pick {
                for &e in &sets[s] {
                    hit[e] = true;
                }
            }
            if hit.iter().all(|&h| h) {
                found = Some(pick.to_vec());
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Sets not strictly contained in another; enough for a minimum cover.
pub fn maximal_sets(sets: &BTreeSet<Vec<usize>>) -> Vec<Vec<usize>> {
    let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    sets.iter().filter(|a| !sets.iter().any(|b| b.len() > a.len() && subset(a, b))).cloned().collect()
}

/// Minimum number of altruists according to the grid sample.
pub fn grid_min_cover(t: &Topology, u: &UnsafePairSet, pitch: f64) -> Option<usize> {
    let sets = maximal_sets(&grid_orphanages(t, u, pitch));
    brute_force_cover(u.len(), &sets).map(|c| c.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::topology::build_graph;
    use crate::unsafe_pairs::{enumerate_unsafe_pairs, PsmMode};

    #[test]
    fn faces_grid_matches_the_arrangement() {
        let t = fixtures::faces();
        let u = enumerate_unsafe_pairs(&build_graph(&t), PsmMode::NoPsm);
        let grid: Vec<Vec<usize>> = grid_orphanages(&t, &u, 1.0 / 50.0).into_iter().collect();
        assert_eq!(grid, vec![vec![0], vec![0, 1, 2], vec![1], vec![2]]);
        assert_eq!(grid_min_cover(&t, &u, 1.0 / 50.0), Some(1));
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(brute_force_cover(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap().len(), 2);
        assert_eq!(brute_force_cover(0, &[]), Some(vec![]));
        assert_eq!(brute_force_cover(2, &[vec![0]]), None);
    }

    #[test]
    fn maximal_drops_contained_sets() {
        let s: BTreeSet<Vec<usize>> = [vec![0], vec![0, 1], vec![2]].into_iter().collect();
        assert_eq!(maximal_sets(&s), vec![vec![0, 1], vec![2]]);
    }
}
