//! Independent unsafe-pair oracle: run a family of scripted three-handshake
//! scenarios without altruists and mark every edge that some run attributes
//! a realized MCC problem to.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sim::{simulate, Directive, Network, Phases, SimConfig, Timing, Traffic, SCRIPT_SEED};
use crate::topology::{build_graph, AdjacencyGraph, GraphError, PeerPair};
use crate::unsafe_pairs::{MccKind, PairClassification, PsmMode};

use super::graphs::{connected_graphs, realize_unit_disk, SmallGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeVerdict {
    pub channel_conflict: bool,
    pub deaf_terminal: bool,
}

impl EdgeVerdict {
    pub fn get(&self, kind: MccKind) -> bool {
        match kind {
            MccKind::ChannelConflict => self.channel_conflict,
            MccKind::DeafTerminal => self.deaf_terminal,
        }
    }

    fn set(&mut self, kind: MccKind) {
        match kind {
            MccKind::ChannelConflict => self.channel_conflict = true,
            MccKind::DeafTerminal => self.deaf_terminal = true,
        }
    }
}

fn directed_edges(g: &AdjacencyGraph) -> Vec<(usize, usize)> {
    g.edges().flat_map(|e| [(e.lo, e.hi), (e.hi, e.lo)]).collect()
}

/// The script family for one graph. Handshake 1 starts at 0; handshake 2,
/// optional and disjoint from the first, is requested late in the first
/// exchange; handshake 3 comes from a node of the first pair after it
/// returns or, with power saving, from a peer that slept through it, once
/// per preferred channel.
pub fn oracle_scripts(g: &AdjacencyGraph, mode: PsmMode, timing: Timing, channels: usize) -> Vec<Vec<Directive>> {
    let ph = Phases::new(timing, mode == PsmMode::Psm);
    let arcs = directed_edges(g);
    let mut out = Vec::new();
    for &(s1, r1) in &arcs {
        let mut seconds: Vec<Option<(usize, usize)>> = vec![None];
        seconds
            .extend(arcs.iter().filter(|&&(a, b)| ![s1, r1].contains(&a) && ![s1, r1].contains(&b)).map(|&e| Some(e)));
        for h2 in seconds {
            let busy = |v: usize| v == s1 || v == r1 || h2.is_some_and(|(a, b)| v == a || v == b);
            let mut thirds: Vec<(usize, f64)> = vec![(s1, ph.after_first_return()), (r1, ph.after_first_return())];
            if mode == PsmMode::Psm {
                for v in (0..g.vertex_count()).filter(|&v| !busy(v)) {
                    thirds.push((v, ph.while_first_away()));
                    thirds.push((v, ph.after_first_return()));
                }
            }
            for (s3, t3) in thirds {
                for r3 in g.neighbors(s3).collect::<Vec<_>>() {
                    for pref in 0..channels as u8 {
                        let mut ds = vec![Directive::Arrive { at: 0.0, src: s1, dst: r1, channel: None }];
                        if let Some((a, b)) = h2 {
                            ds.push(Directive::Arrive { at: ph.during_first_data(), src: a, dst: b, channel: None });
                        }
                        ds.push(Directive::Arrive { at: t3, src: s3, dst: r3, channel: Some(pref) });
                        out.push(ds);
                    }
                }
            }
        }
    }
    out
}

/// Verdict per edge of `g`, with `net` as the radio network (its first
/// `g.vertex_count()` nodes must be `g`'s vertices and no altruists).
pub fn scenario_verdicts(net: &Network, g: &AdjacencyGraph, mode: PsmMode) -> BTreeMap<PeerPair, EdgeVerdict> {
    let timing = Timing::default();
    let channels = 3;
    let mut verdicts: BTreeMap<PeerPair, EdgeVerdict> = g.edges().map(|e| (e, EdgeVerdict::default())).collect();
    for ds in oracle_scripts(g, mode, timing, channels) {
        let horizon = ds
            .iter()
            .map(|d| match *d {
                Directive::Arrive { at, .. } => at,
                Directive::Sleep { until, .. } => until,
            })
            .fold(0.0, f64::max)
            + timing.handshake_len();
        let mut cfg = SimConfig::new(net.clone(), mode, Traffic::Scripted(ds));
        cfg.data_channels = channels;
        cfg.timing = timing;
        cfg.seed = SCRIPT_SEED;
        cfg.horizon_us = horizon;
        let out = simulate(&cfg).expect("generated scripts are valid");
        for ev in &out.mcc_events {
            for e in &ev.edges {
                verdicts.entry(*e).or_default().set(ev.kind);
            }
        }
    }
    verdicts
}

/// One small graph with its oracle verdicts for a mode.
#[derive(Debug, Clone)]
pub struct GraphVerdicts {
    pub graph: SmallGraph,
    pub geometric: bool,
    pub mode: PsmMode,
    pub verdicts: BTreeMap<PeerPair, EdgeVerdict>,
}

/// Verdicts for every connected graph on up to `max_n` vertices and both
/// modes. Graphs with a unit-disk layout run on it; the rest run on their
/// abstract adjacency.
pub fn small_graph_oracle(max_n: usize) -> Vec<GraphVerdicts> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = Vec::new();
    for sg in connected_graphs(max_n) {
        let g = sg.graph();
        let layout = realize_unit_disk(&sg, 10.0, &mut rng, 40);
        let net = match &layout {
            Some(t) => {
                debug_assert_eq!(build_graph(t).edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
                Network::from_topology(t, &[])
            }
            None => Network::from_graph(&g),
        };
        for mode in PsmMode::ALL {
            let verdicts = scenario_verdicts(&net, &g, mode);
            out.push(GraphVerdicts { graph: sg.clone(), geometric: layout.is_some(), mode, verdicts });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub graph: String,
    pub mode: PsmMode,
    pub edge: PeerPair,
    pub kind: MccKind,
    pub classifier: bool,
    pub scenario: bool,
}

/// Compares a classifier against precomputed verdicts, per edge and kind.
pub fn compare_classifier<F>(oracle: &[GraphVerdicts], classify: F) -> Vec<Mismatch>
where
    F: Fn(&AdjacencyGraph, usize, usize, PsmMode) -> Result<PairClassification, GraphError>,
{
    let mut out = Vec::new();
    for gv in oracle {
        let g = gv.graph.graph();
        for (edge, v) in &gv.verdicts {
            let c = classify(&g, edge.lo, edge.hi, gv.mode).expect("oracle edges are adjacent");
            for kind in [MccKind::ChannelConflict, MccKind::DeafTerminal] {
                if c.risk(kind) != v.get(kind) {
                    out.push(Mismatch {
                        graph: gv.graph.name(),
                        mode: gv.mode,
                        edge: *edge,
                        kind,
                        classifier: c.risk(kind),
                        scenario: v.get(kind),
                    });
                }
            }
        }
    }
    out
}
