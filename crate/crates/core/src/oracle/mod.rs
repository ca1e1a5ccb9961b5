//! Reference implementations used to cross-check the planner and the
//! classifier: exhaustive small graphs, scripted scenarios, grid sampling.

pub mod graphs;
pub mod grid;
pub mod scenario;

pub use graphs::{connected_graphs, realize_unit_disk, SmallGraph};
pub use grid::{brute_force_cover, grid_min_cover, grid_orphanages, maximal_sets, GRID_PITCH};
pub use scenario::{
    compare_classifier, oracle_scripts, scenario_verdicts, small_graph_oracle, EdgeVerdict, GraphVerdicts, Mismatch,
};
