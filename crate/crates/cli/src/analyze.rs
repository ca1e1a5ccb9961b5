use std::path::Path;

use anyhow::Context;
use dish_core::{build_graph, enumerate_unsafe_pairs, load_topology, PsmMode};

use crate::exit::{read_input, write_output, Outcome, WithCode, INPUT, INTERNAL};

pub fn run(topology: &Path, mode: PsmMode, out: Option<&Path>) -> Outcome {
    let text = read_input(topology)?;
    let t = load_topology(&text).with_context(|| topology.display().to_string()).code(INPUT)?;
    let g = build_graph(&t);
    let u = enumerate_unsafe_pairs(&g, mode);
    let report = u.report(&g);

    println!("{:<24} {:<10} risks", "pair", "condition");
    for r in &report {
        let risks: Vec<String> = r.risks.iter().map(|k| format!("{k:?}")).collect();
        println!(
            "{:<24} {:<10} {}",
            format!("{}-{}", r.pair[0], r.pair[1]),
            format!("{:?}", r.condition),
            risks.join(",")
        );
    }
    println!("{} unsafe pairs ({} peers, {} links, mode {:?})", u.len(), t.len(), g.edge_count(), mode);

    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&report).code(INTERNAL)?;
        write_output(path, &(json + "\n"))?;
    }
    Ok(())
}
