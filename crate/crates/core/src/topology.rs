//! Peer topology ingestion and the unit-disk neighbor graph built from it.
//!
//! Peers are kept sorted by id, so a peer's index doubles as its rank in the
//! lexicographic order used for every tie-break downstream.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peer {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

impl Peer {
    pub fn new(id: impl Into<String>, x: f64, y: f64) -> Self {
        Self { id: id.into(), x, y }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("duplicate peer id `{0}`")]
    DuplicateId(String),
    #[error("radio range must be positive and finite, got {0}")]
    NonPositiveRange(f64),
    #[error("peer `{0}` has a non-finite coordinate")]
    NonFiniteCoordinate(String),
    #[error("peers `{0}` and `{1}` share a position")]
    CoincidentPeers(String, String),
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("malformed topology document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid topology: {0}")]
    Validation(#[from] ValidationError),
}

/// Wire form of a topology document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub radio_range: f64,
    pub peers: Vec<Peer>,
}

/// A validated set of peers sharing one radio range (meters).
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    radio_range: f64,
    peers: Vec<Peer>,
}

impl Topology {
    pub fn new(radio_range: f64, mut peers: Vec<Peer>) -> Result<Self, ValidationError> {
        if !(radio_range.is_finite() && radio_range > 0.0) {
            return Err(ValidationError::NonPositiveRange(radio_range));
        }
        peers.sort_by(|a, b| a.id.cmp(&b.id));
        for w in peers.windows(2) {
            if w[0].id == w[1].id {
                return Err(ValidationError::DuplicateId(w[0].id.clone()));
            }
        }
        if let Some(p) = peers.iter().find(|p| !p.position().is_finite()) {
            return Err(ValidationError::NonFiniteCoordinate(p.id.clone()));
        }
        for (i, a) in peers.iter().enumerate() {
            for b in &peers[i + 1..] {
                if a.x == b.x && a.y == b.y {
                    return Err(ValidationError::CoincidentPeers(a.id.clone(), b.id.clone()));
                }
            }
        }
        Ok(Self { radio_range, peers })
    }

    pub fn from_json(document: &str) -> Result<Self, TopologyError> {
        let doc: TopologyDoc = serde_json::from_str(document)?;
        Ok(Self::new(doc.radio_range, doc.peers)?)
    }

    pub fn to_doc(&self) -> TopologyDoc {
        TopologyDoc { radio_range: self.radio_range, peers: self.peers.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("topology serializes")
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn peers(&self) -> &[Peer] {
        &self.peers
    }

    pub fn len(&self) -> usize {
        self.peers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peers.is_empty()
    }

    pub fn position(&self, index: usize) -> Point {
        self.peers[index].position()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.peers[index].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.peers.binary_search_by(|p| p.id.as_str().cmp(id)).ok()
    }
}

/// Parses and validates a topology JSON document.
pub fn load_topology(document: &str) -> Result<Topology, TopologyError> {
    Topology::from_json(document)
}

/// An unordered pair of vertex indices, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeerPair {
    pub lo: usize,
    pub hi: usize,
}

impl PeerPair {
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a pair needs two distinct peers");
        if a < b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn contains(self, v: usize) -> bool {
        self.lo == v || self.hi == v
    }
}

impl fmt::Display for PeerPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("`{0}` and `{1}` are not neighbors")]
    NotAdjacent(String, String),
}

/// Undirected neighbor graph. Vertex `i` is the `i`-th peer of the topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    ids: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
}

impl AdjacencyGraph {
    /// Builds an abstract graph from explicit edges. Self-loops are ignored.
    pub fn from_edges(ids: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![BTreeSet::new(); ids.len()];
        for (a, b) in edges {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        Self { ids, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Edges in ascending `(lo, hi)` order.
    pub fn edges(&self) -> impl Iterator<Item = PeerPair> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, ns)| ns.range(a + 1..).map(move |&b| PeerPair { lo: a, hi: b }))
    }

    /// Whether the edge `(i, j)` lies on a three-cycle.
    pub fn shared_triangle(&self, i: usize, j: usize) -> Result<bool, GraphError> {
        if !self.has_edge(i, j) {
            return Err(GraphError::NotAdjacent(self.ids[i].clone(), self.ids[j].clone()));
        }
        Ok(self.adj[i].intersection(&self.adj[j]).next().is_some())
    }
}

/// Unit-disk graph of the topology: an edge joins every two peers at
/// distance at most the radio range.
pub fn build_graph(t: &Topology) -> AdjacencyGraph {
    let r = t.radio_range();
    let n = t.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if t.position(a).within(t.position(b), r) {
                edges.push((a, b));
            }
        }
    }
    AdjacencyGraph::from_edges(t.peers().iter().map(|p| p.id.clone()).collect(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn topo(r: f64, pts: &[(&str, f64, f64)]) -> Topology {
        Topology::new(r, pts.iter().map(|&(id, x, y)| Peer::new(id, x, y)).collect()).unwrap()
    }

    #[test]
    fn loads_minimal_document() {
        let t =
            load_topology(r#"{"radio_range": 10, "peers": [{"id":"a","x":0,"y":0},{"id":"b","x":5,"y":0}]}"#).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.radio_range(), 10.0);
    }

    #[test]
    fn rejects_zero_range() {
        let err = load_topology(r#"{"radio_range": 0, "peers": [{"id":"a","x":0,"y":0}]}"#).unwrap_err();
        assert!(matches!(err, TopologyError::Validation(ValidationError::NonPositiveRange(_))));
    }

    #[test]
    fn rejects_duplicates_coincidence_and_garbage() {
        let dup = r#"{"radio_range": 1, "peers": [{"id":"a","x":0,"y":0},{"id":"a","x":1,"y":0}]}"#;
        assert!(matches!(load_topology(dup), Err(TopologyError::Validation(ValidationError::DuplicateId(_)))));
        let same = r#"{"radio_range": 1, "peers": [{"id":"a","x":0,"y":0},{"id":"b","x":0,"y":0}]}"#;
        assert!(matches!(load_topology(same), Err(TopologyError::Validation(ValidationError::CoincidentPeers(..)))));
        assert!(matches!(load_topology("{\"peers\": 3}"), Err(TopologyError::Parse(_))));
    }

    #[test]
    fn empty_peer_list_is_valid() {
        let t = load_topology(r#"{"radio_range": 5, "peers": []}"#).unwrap();
        assert!(t.is_empty());
        assert_eq!(build_graph(&t).edge_count(), 0);
    }

    #[test]
    fn edge_within_range_only() {
        let g = build_graph(&topo(10.0, &[("a", 0.0, 0.0), ("b", 5.0, 0.0)]));
        assert!(g.has_edge(0, 1));
        assert_eq!((g.degree(0), g.degree(1)), (1, 1));
        let g = build_graph(&topo(10.0, &[("a", 0.0, 0.0), ("b", 15.0, 0.0)]));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn boundary_distance_is_a_neighbor() {
        let g = build_graph(&topo(10.0, &[("a", 0.0, 0.0), ("b", 10.0, 0.0)]));
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn small_triangle_has_three_edges() {
        // sides 8, sqrt(52) ~ 7.21, sqrt(52)
        let g = build_graph(&topo(10.0, &[("a", 0.0, 0.0), ("b", 8.0, 0.0), ("c", 4.0, 6.0)]));
        assert_eq!(g.edge_count(), 3);
        assert!((0..3).all(|v| g.degree(v) == 2));
        for e in g.edges().collect::<Vec<_>>() {
            assert!(g.shared_triangle(e.lo, e.hi).unwrap());
        }
    }

    #[test]
    fn four_cycle_has_no_triangle() {
        let g = AdjacencyGraph::from_edges(
            ["a", "b", "c", "d"].map(String::from).to_vec(),
            [(0, 1), (1, 2), (2, 3), (3, 0)],
        );
        assert!(!g.shared_triangle(0, 1).unwrap());
        assert_eq!(g.shared_triangle(0, 2), Err(GraphError::NotAdjacent("a".into(), "c".into())));
    }

    #[test]
    fn peers_are_indexed_by_sorted_id() {
        let t = topo(3.0, &[("z", 0.0, 0.0), ("m", 1.0, 0.0), ("a", 2.0, 0.0)]);
        assert_eq!(t.id(0), "a");
        assert_eq!(t.index_of("z"), Some(2));
        assert_eq!(t.index_of("q"), None);
    }

    fn arb_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0..50.0f64, 0.0..50.0f64), 1..12)
    }

    proptest! {
        #[test]
        fn degree_sum_and_symmetry(pts in arb_points(), r in 1.0..30.0f64) {
            let peers = pts.iter().enumerate().map(|(i, &(x, y))| Peer::new(format!("p{i:02}"), x, y)).collect();
            let Ok(t) = Topology::new(r, peers) else { return Ok(()) };
            let g = build_graph(&t);
            let sum: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
            prop_assert_eq!(sum, 2 * g.edge_count());
            for e in g.edges().collect::<Vec<_>>() {
                prop_assert!(g.has_edge(e.hi, e.lo));
                prop_assert_eq!(g.shared_triangle(e.lo, e.hi), g.shared_triangle(e.hi, e.lo));
                prop_assert!(t.position(e.lo).distance(t.position(e.hi)) <= r);
            }
        }

        #[test]
        fn relabeling_gives_an_isomorphic_graph(pts in arb_points(), r in 1.0..30.0f64) {
            let fwd: Vec<Peer> = pts.iter().enumerate().map(|(i, &(x, y))| Peer::new(format!("p{i:02}"), x, y)).collect();
            let n = fwd.len();
            // reverse the label order and map back
            let rev: Vec<Peer> = pts.iter().enumerate().map(|(i, &(x, y))| Peer::new(format!("p{:02}", n - 1 - i), x, y)).collect();
            let (Ok(a), Ok(b)) = (Topology::new(r, fwd), Topology::new(r, rev)) else { return Ok(()) };
            let (ga, gb) = (build_graph(&a), build_graph(&b));
            for e in ga.edges().collect::<Vec<_>>() {
                prop_assert!(gb.has_edge(n - 1 - e.lo, n - 1 - e.hi));
            }
            prop_assert_eq!(ga.edge_count(), gb.edge_count());
        }
    }
}
