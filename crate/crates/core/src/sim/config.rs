//! Simulator inputs: timing, the radio network, traffic, and the JSON `sim`
//! block that extends a topology document.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::topology::{AdjacencyGraph, Peer, Topology, TopologyDoc, TopologyError};
use crate::unsafe_pairs::PsmMode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("timing field `{0}` must be positive and finite")]
    BadDuration(&'static str),
    #[error("data channel count must be between 1 and 64, got {0}")]
    BadChannelCount(usize),
    #[error("horizon must be positive and finite")]
    BadHorizon,
    #[error("arrival rate must be non-negative and finite")]
    BadRate,
    #[error("max_attempts must be at least 1")]
    BadAttempts,
    #[error("altruist at ({x}, {y}) has a non-finite coordinate")]
    BadAltruist { x: f64, y: f64 },
    #[error(transparent)]
    Script(#[from] ScriptError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScriptError {
    #[error("unknown peer id `{0}`")]
    UnknownPeer(String),
    #[error("`{0}` is an altruist and cannot send or receive data")]
    AltruistEndpoint(String),
    #[error("arrival at {at} has the same source and destination `{node}`")]
    SelfLoop { at: f64, node: String },
    #[error("arrival at {at}: `{dst}` is not a neighbor of `{src}`")]
    NotNeighbor { at: f64, src: String, dst: String },
    #[error("arrival at {at}: channel {channel} is outside 0..{channels}")]
    BadChannel { at: f64, channel: u8, channels: usize },
    #[error("time {0} is negative or not finite")]
    BadTime(f64),
    #[error("sleep of `{node}` from {from} until {until} is empty")]
    EmptySleep { node: String, from: f64, until: f64 },
    #[error("sleeps of `{0}` overlap")]
    OverlappingSleep(String),
    #[error("arrival at {at} for `{node}` falls inside a scripted sleep")]
    ArrivalWhileAsleep { at: f64, node: String },
}

/// Frame and phase durations in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Timing {
    pub difs: f64,
    pub ccap: f64,
    pub t_pra: f64,
    pub t_prb: f64,
    pub t_cfa: f64,
    pub t_cfb: f64,
    pub t_inv: f64,
    pub t_ncf: f64,
    pub t_data: f64,
    pub t_ack: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Timing {
            difs: 50.0,
            ccap: 100.0,
            t_pra: 200.0,
            t_prb: 200.0,
            t_cfa: 200.0,
            t_cfb: 200.0,
            t_inv: 200.0,
            t_ncf: 200.0,
            t_data: 5000.0,
            t_ack: 200.0,
        }
    }
}

impl Timing {
    /// Gap after PRA or PRB: the CCAP window plus room for the last INV to end.
    pub fn slot(&self) -> f64 {
        self.ccap + self.t_inv
    }

    /// Margin added to reply timeouts.
    pub fn guard(&self) -> f64 {
        1.0
    }

    /// PRA start to CFB end.
    pub fn control_span(&self) -> f64 {
        self.t_pra + self.slot() + self.t_prb + self.slot() + self.t_cfa + self.t_cfb
    }

    /// Control span plus the leading DIFS.
    pub fn handshake_len(&self) -> f64 {
        self.difs + self.control_span()
    }

    pub fn exchange(&self) -> f64 {
        self.t_data + self.t_ack
    }

    /// Longest silent stretch inside a handshake.
    pub fn max_gap(&self) -> f64 {
        self.slot() + self.guard()
    }

    /// How long a node that has just returned or woken listens before it
    /// trusts the medium.
    pub fn eifs(&self) -> f64 {
        self.max_gap() + self.difs
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("difs", self.difs),
            ("ccap", self.ccap),
            ("t_pra", self.t_pra),
            ("t_prb", self.t_prb),
            ("t_cfa", self.t_cfa),
            ("t_cfb", self.t_cfb),
            ("t_inv", self.t_inv),
            ("t_ncf", self.t_ncf),
            ("t_data", self.t_data),
            ("t_ack", self.t_ack),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::BadDuration(name));
            }
        }
        Ok(())
    }
}

/// Who hears whom. Indices `0..peers` are peers in topology order, the rest
/// altruists.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub ids: Vec<String>,
    pub peers: usize,
    hears: Vec<Vec<bool>>,
    neighbors: Vec<Vec<usize>>,
}

impl Network {
    fn from_matrix(ids: Vec<String>, peers: usize, hears: Vec<Vec<bool>>) -> Network {
        let neighbors =
            hears.iter().map(|row| row.iter().enumerate().filter(|(_, &h)| h).map(|(k, _)| k).collect()).collect();
        Network { ids, peers, hears, neighbors }
    }

    /// Geometric network: peers plus altruists at `altruists`, hearing
    /// within the radio range.
    pub fn from_topology(t: &Topology, altruists: &[Point]) -> Network {
        let r = t.radio_range();
        let mut pos: Vec<Point> = t.peers().iter().map(Peer::position).collect();
        pos.extend_from_slice(altruists);
        let mut ids: Vec<String> = t.peers().iter().map(|p| p.id.clone()).collect();
        ids.extend((0..altruists.len()).map(|k| format!("altruist{k}")));
        let n = pos.len();
        let hears = (0..n).map(|a| (0..n).map(|b| a != b && pos[a].within(pos[b], r)).collect()).collect();
        Network::from_matrix(ids, t.len(), hears)
    }

    /// Abstract network following a graph's adjacency, with no altruists.
    pub fn from_graph(g: &AdjacencyGraph) -> Network {
        let n = g.vertex_count();
        let hears = (0..n).map(|a| (0..n).map(|b| g.has_edge(a, b)).collect()).collect();
        Network::from_matrix(g.ids().to_vec(), n, hears)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_altruist(&self, node: usize) -> bool {
        node >= self.peers
    }

    pub fn hears(&self, a: usize, b: usize) -> bool {
        self.hears[a][b]
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn peer_neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[node].iter().copied().filter(|&n| n < self.peers)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

/// One scripted event, with node indices already resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Directive {
    /// A packet for `dst` appears in `src`'s queue at `at`.
    Arrive { at: f64, src: usize, dst: usize, channel: Option<u8> },
    /// `node` is forced asleep during `[from, until)`.
    Sleep { node: usize, from: f64, until: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Traffic {
    /// Independent Poisson arrivals at every peer with a neighbor, each
    /// packet addressed to a uniformly chosen neighbor.
    Poisson {
        rate_per_s: f64,
    },
    Scripted(Vec<Directive>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub network: Network,
    pub data_channels: usize,
    pub timing: Timing,
    pub psm: PsmMode,
    pub traffic: Traffic,
    pub seed: u64,
    /// No handshake starts at or after this time; those in flight finish.
    pub horizon_us: f64,
    pub max_attempts: u32,
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(network: Network, psm: PsmMode, traffic: Traffic) -> SimConfig {
        SimConfig {
            network,
            data_channels: 3,
            timing: Timing::default(),
            psm,
            traffic,
            seed: 0,
            horizon_us: 1e6,
            max_attempts: 6,
            record_trace: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.timing.validate()?;
        if !(1..=64).contains(&self.data_channels) {
            return Err(ConfigError::BadChannelCount(self.data_channels));
        }
        if !(self.horizon_us.is_finite() && self.horizon_us > 0.0) {
            return Err(ConfigError::BadHorizon);
        }
        if self.max_attempts == 0 {
            return Err(ConfigError::BadAttempts);
        }
        match &self.traffic {
            Traffic::Poisson { rate_per_s } => {
                if !(rate_per_s.is_finite() && *rate_per_s >= 0.0) {
                    return Err(ConfigError::BadRate);
                }
            }
            Traffic::Scripted(ds) => self.validate_script(ds)?,
        }
        Ok(())
    }

    fn validate_script(&self, ds: &[Directive]) -> Result<(), ScriptError> {
        let net = &self.network;
        let name = |k: usize| net.ids[k].clone();
        let check_time = |t: f64| if t.is_finite() && t >= 0.0 { Ok(()) } else { Err(ScriptError::BadTime(t)) };
        let mut sleeps: Vec<(usize, f64, f64)> = Vec::new();
        for d in ds {
            match *d {
                Directive::Arrive { at, src, dst, channel } => {
                    check_time(at)?;
                    for n in [src, dst] {
                        if n >= net.len() {
                            return Err(ScriptError::UnknownPeer(format!("#{n}")));
                        }
                        if net.is_altruist(n) {
                            return Err(ScriptError::AltruistEndpoint(name(n)));
                        }
                    }
                    if src == dst {
                        return Err(ScriptError::SelfLoop { at, node: name(src) });
                    }
                    if !net.hears(src, dst) {
                        return Err(ScriptError::NotNeighbor { at, src: name(src), dst: name(dst) });
                    }
                    if let Some(c) = channel {
                        if c as usize >= self.data_channels {
                            return Err(ScriptError::BadChannel { at, channel: c, channels: self.data_channels });
                        }
                    }
                }
                Directive::Sleep { node, from, until } => {
                    check_time(from)?;
                    check_time(until)?;
                    if node >= net.len() {
                        return Err(ScriptError::UnknownPeer(format!("#{node}")));
                    }
                    if net.is_altruist(node) {
                        return Err(ScriptError::AltruistEndpoint(name(node)));
                    }
                    if until <= from {
                        return Err(ScriptError::EmptySleep { node: name(node), from, until });
                    }
                    sleeps.push((node, from, until));
                }
            }
        }
        sleeps.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        for w in sleeps.windows(2) {
            if w[0].0 == w[1].0 && w[1].1 < w[0].2 {
                return Err(ScriptError::OverlappingSleep(name(w[0].0)));
            }
        }
        for d in ds {
            if let Directive::Arrive { at, src, .. } = *d {
                if sleeps.iter().any(|&(n, f, u)| n == src && f <= at && at < u) {
                    return Err(ScriptError::ArrivalWhileAsleep { at, node: name(src) });
                }
            }
        }
        Ok(())
    }
}

// ---- JSON ----------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltruistPosition {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectiveDoc {
    Arrive {
        at: f64,
        src: String,
        dst: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        channel: Option<u8>,
    },
    Sleep {
        node: String,
        from: f64,
        until: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficDoc {
    Poisson { rate_per_s: f64 },
    Script(Vec<DirectiveDoc>),
}

impl Default for TrafficDoc {
    fn default() -> Self {
        TrafficDoc::Poisson { rate_per_s: 50.0 }
    }
}

fn default_channels() -> usize {
    3
}
fn default_horizon() -> f64 {
    1e6
}
fn default_attempts() -> u32 {
    6
}
fn default_psm() -> PsmMode {
    PsmMode::NoPsm
}

/// The `sim` block. Every field is optional. `altruists` accepts the
/// `altruists` array of a placement document as is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDoc {
    #[serde(default)]
    pub altruists: Vec<AltruistPosition>,
    #[serde(default = "default_channels")]
    pub data_channels: usize,
    #[serde(default)]
    pub timing: Timing,
    #[serde(default = "default_psm")]
    pub psm: PsmMode,
    #[serde(default)]
    pub traffic: TrafficDoc,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon_us: f64,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
    #[serde(default)]
    pub trace: bool,
}

impl Default for SimDoc {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// A topology document with an optional `sim` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfigDoc {
    #[serde(flatten)]
    pub topology: TopologyDoc,
    #[serde(default)]
    pub sim: SimDoc,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl SimDoc {
    /// Resolves ids against `t` and validates.
    pub fn resolve(&self, t: &Topology) -> Result<SimConfig, ConfigError> {
        for a in &self.altruists {
            if !(a.x.is_finite() && a.y.is_finite()) {
                return Err(ConfigError::BadAltruist { x: a.x, y: a.y });
            }
        }
        let pts: Vec<Point> = self.altruists.iter().map(|a| Point::new(a.x, a.y)).collect();
        let network = Network::from_topology(t, &pts);
        let peer = |id: &str| -> Result<usize, ScriptError> {
            t.index_of(id).ok_or_else(|| ScriptError::UnknownPeer(id.to_string()))
        };
        let traffic = match &self.traffic {
            TrafficDoc::Poisson { rate_per_s } => Traffic::Poisson { rate_per_s: *rate_per_s },
            TrafficDoc::Script(ds) => Traffic::Scripted(
                ds.iter()
                    .map(|d| {
                        Ok(match d {
                            DirectiveDoc::Arrive { at, src, dst, channel } => {
                                Directive::Arrive { at: *at, src: peer(src)?, dst: peer(dst)?, channel: *channel }
                            }
                            DirectiveDoc::Sleep { node, from, until } => {
                                Directive::Sleep { node: peer(node)?, from: *from, until: *until }
                            }
                        })
                    })
                    .collect::<Result<_, ScriptError>>()?,
            ),
        };
        let cfg = SimConfig {
            network,
            data_channels: self.data_channels,
            timing: self.timing,
            psm: self.psm,
            traffic,
            seed: self.seed,
            horizon_us: self.horizon_us,
            max_attempts: self.max_attempts,
            record_trace: self.trace,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses a configuration JSON into its topology and simulator settings.
pub fn load_sim_config(json: &str) -> Result<(Topology, SimConfig), LoadError> {
    let doc: SimConfigDoc = serde_json::from_str(json).map_err(TopologyError::Parse)?;
    let t = Topology::new(doc.topology.radio_range, doc.topology.peers).map_err(TopologyError::Validation)?;
    let cfg = doc.sim.resolve(&t)?;
    Ok((t, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn plain_topology_gets_defaults() {
        let json = fixtures::path3().to_json();
        let (t, cfg) = load_sim_config(&json).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(cfg.data_channels, 3);
        assert_eq!(cfg.network.len(), 3);
        assert_eq!(cfg.traffic, Traffic::Poisson { rate_per_s: 50.0 });
    }

    #[test]
    fn placement_altruists_are_accepted() {
        let json = r#"{"radio_range":10,"peers":[{"id":"a","x":0,"y":0},{"id":"b","x":8,"y":0}],
            "sim":{"altruists":[{"x":4,"y":0,"covers":[["a","b"]]}],"psm":"psm",
                   "traffic":{"script":[{"arrive":{"at":0,"src":"a","dst":"b","channel":1}}]}}}"#;
        let (_, cfg) = load_sim_config(json).unwrap();
        assert_eq!(cfg.network.len(), 3);
        assert!(cfg.network.is_altruist(2));
        assert!(cfg.network.hears(2, 0));
        assert_eq!(cfg.psm, PsmMode::Psm);
        assert_eq!(
            cfg.traffic,
            Traffic::Scripted(vec![Directive::Arrive { at: 0.0, src: 0, dst: 1, channel: Some(1) }])
        );
    }

    #[test]
    fn script_errors_are_reported() {
        let t = fixtures::path3();
        let bad = |traffic: &str| {
            let json = format!(
                r#"{{"radio_range":10,"peers":{},"sim":{{"traffic":{traffic}}}}}"#,
                serde_json::to_string(&t.to_doc().peers).unwrap()
            );
            load_sim_config(&json).unwrap_err().to_string()
        };
        assert!(bad(r#"{"script":[{"arrive":{"at":0,"src":"a","dst":"c"}}]}"#).contains("not a neighbor"));
        assert!(bad(r#"{"script":[{"arrive":{"at":0,"src":"a","dst":"z"}}]}"#).contains("unknown peer"));
        assert!(bad(r#"{"script":[{"arrive":{"at":0,"src":"a","dst":"a"}}]}"#).contains("same source"));
        assert!(bad(r#"{"script":[{"arrive":{"at":0,"src":"a","dst":"b","channel":3}}]}"#).contains("channel 3"));
        assert!(bad(
            r#"{"script":[{"sleep":{"node":"a","from":0,"until":10}},{"sleep":{"node":"a","from":5,"until":20}}]}"#
        )
        .contains("overlap"));
        assert!(bad(
            r#"{"script":[{"sleep":{"node":"a","from":0,"until":10}},{"arrive":{"at":5,"src":"a","dst":"b"}}]}"#
        )
        .contains("inside a scripted sleep"));
        assert!(bad(r#"{"poisson":{"rate_per_s":-1}}"#).contains("rate"));
    }

    #[test]
    fn derived_timing() {
        let t = Timing::default();
        assert_eq!(t.slot(), 300.0);
        assert_eq!(t.control_span(), 200.0 * 4.0 + 600.0);
        assert_eq!(t.exchange(), 5200.0);
        assert!(t.eifs() > t.max_gap());
    }
}
