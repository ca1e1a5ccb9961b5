//! The JSON files under `fixtures/` must describe the same networks as the
//! code fixtures. Set `DISH_BLESS=1` to regenerate them.

use std::path::PathBuf;

use dish_core::fixtures;
use dish_core::sim::{
    load_sim_config, remark_counterexample, AltruistPosition, Directive, DirectiveDoc, SimConfig, SimConfigDoc, SimDoc,
    TrafficDoc,
};
use dish_core::{plan, PsmMode, SolverKind, Topology};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bless() -> bool {
    std::env::var_os("DISH_BLESS").is_some()
}

fn topologies() -> Vec<(&'static str, Topology)> {
    vec![
        ("faces", fixtures::faces()),
        ("single_hop", fixtures::single_hop()),
        ("path3", fixtures::path3()),
        ("path4", fixtures::path4()),
        ("tangent", fixtures::tangent()),
        ("four_cycle", fixtures::four_cycle()),
        ("octagon", fixtures::octagon()),
        ("two_clusters", fixtures::two_clusters()),
    ]
}

fn sim_docs() -> Vec<(&'static str, SimConfigDoc)> {
    let hop = fixtures::single_hop();
    let placed = plan(&hop, PsmMode::Psm, SolverKind::Exact).unwrap();
    let altruists = placed.placement.altruists.iter().map(|a| AltruistPosition { x: a.position.x, y: a.position.y });
    let single_hop = SimConfigDoc {
        topology: hop.to_doc(),
        sim: SimDoc {
            altruists: altruists.collect(),
            psm: PsmMode::Psm,
            traffic: TrafficDoc::Poisson { rate_per_s: 100.0 },
            seed: 1,
            horizon_us: 2e6,
            ..SimDoc::default()
        },
    };

    let (t, alt, script) = remark_counterexample(true);
    let id = |k: usize| t.id(k).to_string();
    let directives = script
        .directives
        .iter()
        .map(|d| match *d {
            Directive::Arrive { at, src, dst, channel } => {
                DirectiveDoc::Arrive { at, src: id(src), dst: id(dst), channel }
            }
            Directive::Sleep { node, from, until } => DirectiveDoc::Sleep { node: id(node), from, until },
        })
        .collect();
    let remark_cfg = script.config();
    let remark = SimConfigDoc {
        topology: t.to_doc(),
        sim: SimDoc {
            altruists: alt.iter().map(|p| AltruistPosition { x: p.x, y: p.y }).collect(),
            traffic: TrafficDoc::Script(directives),
            seed: remark_cfg.seed,
            horizon_us: remark_cfg.horizon_us,
            trace: true,
            ..SimDoc::default()
        },
    };
    vec![("single_hop_sim", single_hop), ("remark", remark)]
}

#[test]
fn topology_files_match_the_code() {
    for (name, t) in topologies() {
        let path = dir().join(format!("{name}.json"));
        if bless() {
            std::fs::write(&path, t.to_json() + "\n").unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(Topology::from_json(&text).unwrap(), t, "{name}");
    }
}

#[test]
fn simulation_files_match_the_code() {
    for (name, doc) in sim_docs() {
        let path = dir().join(format!("{name}.json"));
        if bless() {
            std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let (t, cfg) = load_sim_config(&text).unwrap();
        let expected: SimConfig = doc.sim.resolve(&t).unwrap();
        assert_eq!(cfg, expected, "{name}");
    }
    // the script file replays the built-in counterexample
    let (_, _, script) = remark_counterexample(true);
    let (_, cfg) = load_sim_config(&std::fs::read_to_string(dir().join("remark.json")).unwrap()).unwrap();
    assert_eq!(cfg, script.config());
}
