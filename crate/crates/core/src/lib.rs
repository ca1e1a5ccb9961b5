//! Planning and verification for altruistic DISH networks.
//!
//! The crate classifies unsafe pairs in a peer topology, places altruists
//! so that every unsafe pair is overheard, and simulates the DISH-p control
//! channel handshake to check that placements actually prevent
//! multi-channel coordination (MCC) problems.

pub mod coverage;
pub mod fixtures;
pub mod geom;
pub mod oracle;
pub mod sim;
pub mod topology;
pub mod unsafe_pairs;

pub use coverage::{plan, CoverageError, Placement, PlacementDoc, Plan, SolverKind};
pub use geom::Point;
pub use topology::{build_graph, load_topology, AdjacencyGraph, Peer, PeerPair, Topology, TopologyError};
pub use unsafe_pairs::{classify_pair, enumerate_unsafe_pairs, MccKind, PsmMode, UnsafePairSet};
