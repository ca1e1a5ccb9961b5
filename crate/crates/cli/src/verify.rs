use anyhow::anyhow;
use dish_core::coverage::{enumerate_orphanages, exact_cover_indices, greedy_cover_indices, DEFAULT_EXACT_LIMIT};
use dish_core::fixtures::{self, random_coverage_instance, Spacing};
use dish_core::oracle::{brute_force_cover, compare_classifier, grid_orphanages, small_graph_oracle, GRID_PITCH};
use dish_core::sim::{remark_counterexample, scripted_scenario, simulate, to_jsonl, Network, SimConfig, Traffic};
use dish_core::unsafe_pairs::Condition;
use dish_core::{
    build_graph, classify_pair, enumerate_unsafe_pairs, plan, CoverageError, PsmMode, SolverKind, Topology,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exit::{Failure, Outcome, INTERNAL};

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

fn classifier_matches_oracle() -> Check {
    let oracle = small_graph_oracle(5);
    let bad = compare_classifier(&oracle, classify_pair);
    match bad.first() {
        None => Ok(format!("{} graphs, both modes", oracle.len() / 2)),
        Some(m) => Err(format!("{} mismatches, first on {} edge {} ({:?})", bad.len(), m.graph, m.edge, m.kind)),
    }
}

fn mutated_classifier_is_caught() -> Check {
    let oracle = small_graph_oracle(4);
    let mutated = |g: &_, i, j, mode| {
        let mut c = classify_pair(g, i, j, mode)?;
        if c.condition == Condition::CondB {
            c.channel_conflict_up = false;
        }
        Ok(c)
    };
    let n = compare_classifier(&oracle, mutated).len();
    if n > 0 {
        Ok(format!("{n} mismatches reported for a classifier that drops the degree-two clause"))
    } else {
        Err("the oracle did not notice a broken classifier".into())
    }
}

fn grid_matches_arrangement() -> Check {
    let mut cases: Vec<(String, Topology, PsmMode)> = vec![
        ("faces".into(), fixtures::faces(), PsmMode::NoPsm),
        ("four_cycle".into(), fixtures::four_cycle(), PsmMode::NoPsm),
        ("octagon".into(), fixtures::octagon(), PsmMode::NoPsm),
        ("two_clusters".into(), fixtures::two_clusters(), PsmMode::Psm),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for k in 0..4 {
        let (t, _) = random_coverage_instance(&mut rng, 5, PsmMode::NoPsm, Spacing::default());
        cases.push((format!("random #{k}"), t, PsmMode::NoPsm));
    }
    for (name, t, mode) in &cases {
        let u = enumerate_unsafe_pairs(&build_graph(t), *mode);
        let arr = enumerate_orphanages(t, &u).map_err(|e| format!("{name}: {e}"))?.up_sets();
        let grid: Vec<Vec<usize>> = grid_orphanages(t, &u, GRID_PITCH).into_iter().collect();
        if arr != grid {
            return Err(format!("{name}: arrangement {} sets, grid {}", arr.len(), grid.len()));
        }
    }
    Ok(format!("{} topologies", cases.len()))
}

fn covers_match_brute_force() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut done = 0;
    while done < 30 {
        let (t, u) = random_coverage_instance(&mut rng, 7, PsmMode::NoPsm, Spacing::default());
        let h = enumerate_orphanages(&t, &u).map_err(|e| e.to_string())?;
        if h.len() > 15 {
            continue;
        }
        done += 1;
        let sets = h.up_sets();
        let opt = brute_force_cover(u.len(), &sets).ok_or("brute force found no cover")?.len();
        let exact = exact_cover_indices(u.len(), &sets, None, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?.len();
        let greedy = greedy_cover_indices(u.len(), &sets).map_err(|e| e.to_string())?.len();
        let cap = ((u.len() as f64).ln() + 1.0) * opt as f64 + 1e-9;
        if exact != opt || greedy < opt || greedy as f64 > cap {
            return Err(format!("instance {done}: optimum {opt}, exact {exact}, greedy {greedy}"));
        }
    }
    Ok(format!("{done} instances"))
}

fn tangent_is_rejected() -> Check {
    match plan(&fixtures::tangent(), PsmMode::NoPsm, SolverKind::Exact) {
        Err(CoverageError::DegenerateArrangement { .. }) => Ok("DegenerateArrangement raised as expected".into()),
        Err(e) => Err(format!("unexpected error {e}")),
        Ok(_) => Err("tangent circles were accepted".into()),
    }
}

fn single_hop_is_protected() -> Check {
    let t = fixtures::single_hop();
    for mode in PsmMode::ALL {
        let p = plan(&t, mode, SolverKind::Exact).map_err(|e| e.to_string())?;
        let alt: Vec<_> = p.placement.altruists.iter().map(|a| a.position).collect();
        for seed in 0..5 {
            let mut cfg =
                SimConfig::new(Network::from_topology(&t, &alt), mode, Traffic::Poisson { rate_per_s: 100.0 });
            cfg.seed = seed;
            cfg.horizon_us = 2e6;
            let m = simulate(&cfg).map_err(|e| e.to_string())?.metrics;
            if m.mcc_realized != 0 {
                return Err(format!("{mode:?} seed {seed}: {} realized", m.mcc_realized));
            }
        }
    }
    Ok("5 seeds per mode, none realized".into())
}

fn remark_counterexample_slips_through() -> Check {
    let (_, _, script) = remark_counterexample(true);
    let out = scripted_scenario(&script).map_err(|e| e.to_string())?;
    if out.metrics.mcc_realized == 0 {
        return Err("the overlapping handshakes were all prevented".into());
    }
    Ok(format!("{} realized despite full coverage", out.metrics.mcc_realized))
}

fn replay_is_identical() -> Check {
    let t = fixtures::faces();
    let mut cfg = SimConfig::new(Network::from_topology(&t, &[]), PsmMode::Psm, Traffic::Poisson { rate_per_s: 80.0 });
    cfg.seed = 9;
    cfg.horizon_us = 5e5;
    cfg.record_trace = true;
    let a = simulate(&cfg).map_err(|e| e.to_string())?;
    let b = simulate(&cfg).map_err(|e| e.to_string())?;
    let (ta, tb) = (to_jsonl(&a.trace, &cfg.network.ids), to_jsonl(&b.trace, &cfg.network.ids));
    if ta == tb && a.metrics == b.metrics {
        Ok(format!("{} trace bytes", ta.len()))
    } else {
        Err("two runs of one seed differ".into())
    }
}

pub fn run() -> Outcome {
    let checks: [NamedCheck; 8] = [
        ("classifier agrees with the scenario oracle", classifier_matches_oracle),
        ("scenario oracle catches a mutated classifier", mutated_classifier_is_caught),
        ("arrangement orphanages match the grid oracle", grid_matches_arrangement),
        ("exact cover is optimal and greedy within its bound", covers_match_brute_force),
        ("tangent circles are rejected", tangent_is_rejected),
        ("covered single-hop network realizes no MCC problem", single_hop_is_protected),
        ("overlapping handshakes can defeat a shared altruist", remark_counterexample_slips_through),
        ("simulation replay is identical", replay_is_identical),
    ];
    let mut first_failure = None;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("ok   {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                first_failure.get_or_insert(name);
            }
        }
    }
    match first_failure {
        None => {
            println!("all properties passed");
            Ok(())
        }
        Some(name) => Err(Failure { code: INTERNAL, error: anyhow!("property failed: {name}") }),
    }
}
