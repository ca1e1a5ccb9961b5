//! Seeded inputs shared by the benchmarks.

use dish_core::fixtures::{random_coverage_instance, Spacing};
use dish_core::{PsmMode, Topology, UnsafePairSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A reproducible planner instance with at most `max_disks` covering disks.
pub fn coverage_instance(seed: u64, max_disks: usize) -> (Topology, UnsafePairSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_coverage_instance(&mut rng, max_disks, PsmMode::NoPsm, Spacing::default())
}
