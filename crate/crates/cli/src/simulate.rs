use std::path::Path;

use anyhow::Context;
use dish_core::sim::{load_sim_config, simulate, to_jsonl, write_csv, Network, Outcome as HsOutcome, SimMetrics};
use dish_core::{Point, PsmMode};
use rayon::prelude::*;

use crate::exit::{read_input, write_output, Outcome, WithCode, INPUT, INTERNAL};
use crate::plan::load_placement;

pub struct Request<'a> {
    pub config: &'a Path,
    pub seed: Option<u64>,
    pub runs: u64,
    pub mode: Option<PsmMode>,
    pub placement: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub trace: Option<&'a Path>,
}

pub fn run(req: Request) -> Outcome {
    let text = read_input(req.config)?;
    let (t, mut cfg) = load_sim_config(&text).with_context(|| req.config.display().to_string()).code(INPUT)?;
    if let Some(path) = req.placement {
        let doc = load_placement(path)?;
        let pts: Vec<Point> = doc.altruists.iter().map(|a| Point::new(a.x, a.y)).collect();
        cfg.network = Network::from_topology(&t, &pts);
    }
    if let Some(mode) = req.mode {
        cfg.psm = mode;
    }
    cfg.validate().code(INPUT)?;
    let first = req.seed.unwrap_or(cfg.seed);
    let seeds: Vec<u64> = (0..req.runs.max(1)).map(|k| first.wrapping_add(k)).collect();

    let mut results: Vec<(SimMetrics, Option<String>)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.seed = seed;
            c.record_trace = req.trace.is_some() && seed == first;
            let out = simulate(&c)?;
            let trace = c.record_trace.then(|| to_jsonl(&out.trace, &c.network.ids));
            Ok((out.metrics, trace))
        })
        .collect::<Result<_, dish_core::sim::ConfigError>>()
        .code(INPUT)?;
    results.sort_by_key(|(m, _)| m.seed);

    if let Some(path) = req.trace {
        let trace = results.iter().find_map(|(_, tr)| tr.clone()).unwrap_or_default();
        write_output(path, &trace)?;
    }
    let metrics: Vec<SimMetrics> = results.into_iter().map(|(m, _)| m).collect();
    let ids = &cfg.network.ids[..cfg.network.peers];
    let mut csv = Vec::new();
    write_csv(&mut csv, ids, &metrics).code(INTERNAL)?;
    let csv = String::from_utf8(csv).code(INTERNAL)?;
    match req.out {
        Some(path) => write_output(path, &csv)?,
        None => print!("{csv}"),
    }

    for m in &metrics {
        eprintln!(
            "seed={} handshakes={} success={} prevented_by_inv={} mcc_created={} mcc_prevented={} mcc_realized={} mean_awake={:.4}",
            m.seed,
            m.handshakes,
            m.count(HsOutcome::Success),
            m.count(HsOutcome::PreventedByInv),
            m.mcc_created,
            m.mcc_prevented,
            m.mcc_realized,
            m.mean_awake()
        );
    }
    Ok(())
}
