//! Connected graphs on few vertices, one per isomorphism class, and
//! unit-disk layouts for them.

use rand::Rng;

use crate::geom::Point;
use crate::topology::{AdjacencyGraph, Peer, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SmallGraph {
    pub fn ids(&self) -> Vec<String> {
        (0..self.n).map(|k| format!("v{k}")).collect()
    }

    pub fn graph(&self) -> AdjacencyGraph {
        AdjacencyGraph::from_edges(self.ids(), self.edges.iter().copied())
    }

    pub fn name(&self) -> String {
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}{b}")).collect();
        format!("n{}[{}]", self.n, e.join(","))
    }
}

fn pair_slots(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All connected graphs with 1 to `max_n` vertices up to isomorphism, each
/// in its lexicographically smallest labeling, ordered by size.
pub fn connected_graphs(max_n: usize) -> Vec<SmallGraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let slots = pair_slots(n);
        let perms = permutations(n);
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << slots.len()) {
            let edges: Vec<(usize, usize)> =
                slots.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
            if !connected(n, &edges) {
                continue;
            }
            let canon = perms
                .iter()
                .map(|p| {
                    let mut e: Vec<(usize, usize)> =
                        edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                    e.sort_unstable();
                    e
                })
                .min()
                .expect("n >= 1");
            if seen.insert(canon.clone()) {
                out.push(SmallGraph { n, edges: canon });
            }
        }
    }
    out
}

/// Searches for positions whose unit-disk graph at range `r` is exactly
/// `g`, with every distance at least 10% of `r` away from the threshold.
pub fn realize_unit_disk<R: Rng>(g: &SmallGraph, r: f64, rng: &mut R, restarts: usize) -> Option<Topology> {
    let n = g.n;
    let adj = |a: usize, b: usize| g.edges.contains(&(a.min(b), a.max(b)));
    let (near, far) = (0.9 * r, 1.1 * r);
    let ok = |p: &[Point]| {
        (0..n).all(|a| {
            (a + 1..n).all(|b| {
                let d = p[a].distance(p[b]);
                if adj(a, b) {
                    d <= near
                } else {
                    d >= far
                }
            })
        })
    };
    let side = r * (n as f64).sqrt();
    for _ in 0..restarts {
        let mut p: Vec<Point> =
            (0..n).map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side))).collect();
        for _ in 0..400 {
            if ok(&p) {
                let peers = p.iter().enumerate().map(|(k, q)| Peer::new(format!("v{k}"), q.x, q.y)).collect();
                return Topology::new(r, peers).ok();
            }
            for a in 0..n {
                for b in a + 1..n {
                    let (dx, dy) = (p[b].x - p[a].x, p[b].y - p[a].y);
                    let d = (dx * dx + dy * dy).sqrt().max(1e-9);
                    let push = if adj(a, b) && d > 0.8 * r {
                        (d - 0.8 * r) / 2.0
                    } else if !adj(a, b) && d < 1.2 * r {
                        -(1.2 * r - d) / 2.0
                    } else {
                        continue;
                    };
                    let (ux, uy) = (dx / d * push * 0.5, dy / d * push * 0.5);
                    p[a] = Point::new(p[a].x + ux, p[a].y + uy);
                    p[b] = Point::new(p[b].x - ux, p[b].y - uy);
                }
            }
        }
    }
    None
}
