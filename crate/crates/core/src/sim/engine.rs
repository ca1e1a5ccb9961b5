//! Discrete-event engine for the DISH-p control and data channels.
//!
//! Time is in microseconds. Propagation is instantaneous, so a node senses a
//! transmission from the instant after it starts. Two receptions that
//! overlap at a node destroy each other; a transmitting node receives
//! nothing.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::topology::PeerPair;
use crate::unsafe_pairs::{MccKind, PsmMode};

use super::ccap::{ccap_contention, CcapDecision, Contender};
use super::config::{ConfigError, Directive, SimConfig, Traffic};
use super::frame::{Frame, FrameKind};
use super::metrics::{MccEvent, Outcome, SimMetrics};
use super::table::{detect_mcc, ChannelUsageTable, InvIntent, UsageEntry};
use super::trace::{TraceEvent, TraceKind};

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub metrics: SimMetrics,
    pub mcc_events: Vec<MccEvent>,
    pub handshakes: Vec<HandshakeRecord>,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandshakeRecord {
    pub sender: usize,
    pub receiver: usize,
    pub start: f64,
    pub proposed: Option<u8>,
    pub confirmed: Option<u8>,
    pub outcome: Option<Outcome>,
    /// Ground truth said the PRA or PRB would commit to a problem.
    pub created: bool,
}

#[derive(Debug, Clone, Copy)]
enum Ev {
    Arrival { node: usize },
    Scripted { idx: usize },
    SleepStart { node: usize, until: f64 },
    SleepEnd { node: usize },
    Contend { node: usize, epoch: u64 },
    TxEnd { node: usize, tx: u64 },
    SendPrb { node: usize, epoch: u64 },
    SendCfa { node: usize, epoch: u64 },
    Timeout { node: usize, epoch: u64 },
    InvStart { node: usize, intent: InvIntent, hs: usize },
    DataEnd { node: usize, epoch: u64 },
}

struct Scheduled {
    time: f64,
    seq: u64,
    ev: Ev,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    // min-heap on (time, seq)
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Idle,
    Waiting,
    SendingPra(usize),
    AwaitPrb(usize),
    AwaitCfaSlot(usize),
    SendingCfa(usize),
    AwaitCfb(usize),
    SendingNcf(usize),
    RespondWait(usize),
    SendingPrb(usize),
    AwaitCfa(usize),
    SendingCfb(usize),
    Data(usize),
    SendingInv,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    dst: usize,
    pref: Option<u8>,
    attempts: u32,
}

#[derive(Debug, Clone, Copy)]
struct Tx {
    id: u64,
    frame: Frame,
}

#[derive(Debug, Clone, Copy)]
struct Rx {
    tx: u64,
    collided: bool,
}

#[derive(Debug, Clone)]
struct Node {
    awake: bool,
    forced_sleep: bool,
    on_control: bool,
    tx: Option<Tx>,
    rx: Vec<Rx>,
    audible: u32,
    busy_since: f64,
    idle_since: f64,
    listening_since: f64,
    nav_until: f64,
    table: ChannelUsageTable,
    queue: VecDeque<Packet>,
    role: Role,
    epoch: u64,
    awake_since: f64,
    awake_total: f64,
}

impl Node {
    fn new() -> Node {
        Node {
            awake: true,
            forced_sleep: false,
            on_control: true,
            tx: None,
            rx: Vec::new(),
            audible: 0,
            busy_since: f64::NEG_INFINITY,
            idle_since: f64::NEG_INFINITY,
            listening_since: f64::NEG_INFINITY,
            nav_until: f64::NEG_INFINITY,
            table: ChannelUsageTable::new(),
            queue: VecDeque::new(),
            role: Role::Idle,
            epoch: 0,
            awake_since: 0.0,
            awake_total: 0.0,
        }
    }

    fn can_receive(&self) -> bool {
        self.awake && self.on_control && self.tx.is_none()
    }

    fn senses_busy(&self, now: f64) -> bool {
        self.tx.is_some() || (self.audible > 0 && self.busy_since < now)
    }
}

#[derive(Debug, Clone)]
struct Handshake {
    sender: usize,
    receiver: usize,
    start: f64,
    reserve_until: f64,
    proposed: Option<u8>,
    free_mask: u64,
    confirmed: Option<u8>,
    data_until: f64,
    created: bool,
    target_away: bool,
    receiver_alarmed: bool,
    outcome: Option<Outcome>,
}

#[derive(Debug, Clone, Copy)]
struct Exchange {
    a: usize,
    b: usize,
    channel: u8,
    until: f64,
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    now: f64,
    seq: u64,
    heap: BinaryHeap<Scheduled>,
    nodes: Vec<Node>,
    hss: Vec<Handshake>,
    exchanges: Vec<Exchange>,
    rng: ChaCha8Rng,
    metrics: SimMetrics,
    mcc_events: Vec<MccEvent>,
    trace: Vec<TraceEvent>,
    next_tx: u64,
}

/// Runs one simulation to completion.
pub fn simulate(cfg: &SimConfig) -> Result<SimOutput, ConfigError> {
    cfg.validate()?;
    let mut sim = Sim::new(cfg);
    sim.bootstrap();
    while let Some(item) = sim.heap.pop() {
        sim.now = item.time;
        sim.handle(item.ev);
    }
    Ok(sim.finish())
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a SimConfig) -> Sim<'a> {
        let n = cfg.network.len();
        Sim {
            cfg,
            now: 0.0,
            seq: 0,
            heap: BinaryHeap::new(),
            nodes: vec![Node::new(); n],
            hss: Vec::new(),
            exchanges: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            metrics: SimMetrics::new(cfg.seed, n, cfg.network.peers),
            mcc_events: Vec::new(),
            trace: Vec::new(),
            next_tx: 0,
        }
    }

    fn at(&mut self, time: f64, ev: Ev) {
        self.seq += 1;
        self.heap.push(Scheduled { time, seq: self.seq, ev });
    }

    fn log(&mut self, node: usize, kind: TraceKind, frame: Option<Frame>, detail: Option<String>) {
        if self.cfg.record_trace {
            self.trace.push(TraceEvent { time: self.now, node, kind, frame, detail });
        }
    }

    fn is_peer(&self, node: usize) -> bool {
        !self.cfg.network.is_altruist(node)
    }

    fn bump(&mut self, node: usize) -> u64 {
        self.nodes[node].epoch += 1;
        self.nodes[node].epoch
    }

    fn bootstrap(&mut self) {
        let peers = self.cfg.network.peers;
        match &self.cfg.traffic {
            Traffic::Poisson { rate_per_s } => {
                if *rate_per_s > 0.0 {
                    for p in 0..peers {
                        if self.cfg.network.peer_neighbors(p).next().is_some() {
                            self.schedule_arrival(p, 0.0);
                        }
                    }
                }
            }
            Traffic::Scripted(ds) => {
                for (idx, d) in ds.iter().enumerate() {
                    match *d {
                        Directive::Arrive { at, .. } => self.at(at, Ev::Scripted { idx }),
                        Directive::Sleep { node, from, until } => {
                            self.at(from, Ev::SleepStart { node, until });
                            self.at(until, Ev::SleepEnd { node });
                        }
                    }
                }
            }
        }
        if self.cfg.psm == PsmMode::Psm {
            for p in 0..peers {
                self.maybe_sleep(p);
            }
        }
    }

    fn schedule_arrival(&mut self, node: usize, from: f64) {
        let Traffic::Poisson { rate_per_s } = self.cfg.traffic else { return };
        let exp = Exp::new(rate_per_s / 1e6).expect("positive rate");
        let t = from + exp.sample(&mut self.rng);
        if t < self.cfg.horizon_us {
            self.at(t, Ev::Arrival { node });
        }
    }

    fn handle(&mut self, ev: Ev) {
        match ev {
            Ev::Arrival { node } => {
                let nbrs: Vec<usize> = self.cfg.network.peer_neighbors(node).collect();
                let dst = nbrs[self.rng.random_range(0..nbrs.len())];
                self.push_packet(node, dst, None);
                self.schedule_arrival(node, self.now);
            }
            Ev::Scripted { idx } => {
                let Traffic::Scripted(ds) = &self.cfg.traffic else { unreachable!() };
                if let Directive::Arrive { src, dst, channel, .. } = ds[idx] {
                    self.push_packet(src, dst, channel);
                }
            }
            Ev::SleepStart { node, until } => self.forced_sleep(node, until),
            Ev::SleepEnd { node } => {
                if !self.nodes[node].awake && self.nodes[node].forced_sleep {
                    self.wake(node);
                    self.resume(node);
                }
            }
            Ev::Contend { node, epoch } => {
                if self.nodes[node].epoch == epoch && self.nodes[node].role == Role::Waiting {
                    self.contend(node);
                }
            }
            Ev::TxEnd { node, tx } => self.tx_end(node, tx),
            Ev::SendPrb { node, epoch } => {
                if self.nodes[node].epoch == epoch {
                    if let Role::RespondWait(hs) = self.nodes[node].role {
                        self.send_prb(node, hs);
                    }
                }
            }
            Ev::SendCfa { node, epoch } => {
                if self.nodes[node].epoch == epoch {
                    if let Role::AwaitCfaSlot(hs) = self.nodes[node].role {
                        self.send_cfa(node, hs);
                    }
                }
            }
            Ev::Timeout { node, epoch } => {
                if self.nodes[node].epoch == epoch {
                    self.timeout(node);
                }
            }
            Ev::InvStart { node, intent, hs } => self.inv_start(node, intent, hs),
            Ev::DataEnd { node, epoch } => {
                if self.nodes[node].epoch == epoch {
                    self.data_end(node);
                }
            }
        }
    }

    // ---- queueing and contention -------------------------------------

    fn push_packet(&mut self, node: usize, dst: usize, pref: Option<u8>) {
        self.metrics.arrivals += 1;
        self.nodes[node].queue.push_back(Packet { dst, pref, attempts: 0 });
        self.log(node, TraceKind::Arrival, None, Some(format!("dst={}", self.cfg.network.ids[dst])));
        if !self.nodes[node].awake && !self.nodes[node].forced_sleep {
            self.wake(node);
        }
        self.resume(node);
    }

    fn backoff(&mut self, attempts: u32) -> f64 {
        let cw = self.cfg.timing.difs * f64::from(1u32 << (attempts + 1).min(10));
        self.rng.random_range(0.0..=cw)
    }

    /// Earliest time the node may start listening for DIFS.
    fn gate(&self, node: usize) -> f64 {
        let n = &self.nodes[node];
        self.now.max(n.nav_until).max(n.listening_since + self.cfg.timing.eifs())
    }

    fn resume(&mut self, node: usize) {
        let n = &self.nodes[node];
        if n.role != Role::Idle || !n.awake || !n.on_control {
            return;
        }
        if n.queue.is_empty() || self.now >= self.cfg.horizon_us {
            self.maybe_sleep(node);
            return;
        }
        let difs = self.cfg.timing.difs;
        let gated = n.senses_busy(self.now) || self.gate(node) > self.now;
        let attempts = n.queue.front().map_or(0, |p| p.attempts);
        let t = if gated { self.gate(node) + difs + self.backoff(attempts) } else { self.now + difs };
        self.wait_until(node, t);
    }

    fn wait_until(&mut self, node: usize, t: f64) {
        self.nodes[node].role = Role::Waiting;
        let epoch = self.bump(node);
        self.at(t, Ev::Contend { node, epoch });
    }

    fn contend(&mut self, node: usize) {
        if self.now >= self.cfg.horizon_us {
            self.nodes[node].role = Role::Idle;
            self.bump(node);
            self.maybe_sleep(node);
            return;
        }
        let now = self.now;
        let difs = self.cfg.timing.difs;
        let m = self.cfg.data_channels;
        let pkt = *self.nodes[node].queue.front().expect("waiting with a packet");
        let n = &self.nodes[node];
        // the table says the target is away or every channel is taken
        let blocked_until = match n.table.node_entry(pkt.dst, now) {
            Some(e) => Some(e.busy_until),
            None if n.table.free_mask(m, now) == 0 => n.table.earliest_expiry(now),
            None => None,
        };
        if let Some(t) = blocked_until {
            let t = t + difs + self.backoff(pkt.attempts);
            self.wait_until(node, t);
            return;
        }
        let ready = !n.senses_busy(now)
            && n.idle_since <= now - difs
            && n.nav_until <= now
            && n.listening_since + self.cfg.timing.eifs() <= now;
        if !ready {
            let t = self.gate(node) + difs + self.backoff(pkt.attempts);
            self.wait_until(node, t);
            return;
        }
        self.begin_handshake(node, pkt);
    }

    fn begin_handshake(&mut self, s: usize, pkt: Packet) {
        let now = self.now;
        let tm = self.cfg.timing;
        let r = pkt.dst;
        let free = self.nodes[s].table.free_mask(self.cfg.data_channels, now);
        let proposed = match pkt.pref {
            Some(c) if free >> c & 1 == 1 => Some(c),
            _ => Some(free.trailing_zeros() as u8),
        };
        let target = &self.nodes[r];
        let target_away = !target.on_control || (!target.awake && target.forced_sleep);
        let clash = !self.clashes(s, r, proposed.expect("some channel"), now).is_empty();
        let hs = self.hss.len();
        let reserve_until = now + tm.control_span() + tm.guard() + tm.t_ncf;
        self.hss.push(Handshake {
            sender: s,
            receiver: r,
            start: now,
            reserve_until,
            proposed,
            free_mask: free,
            confirmed: None,
            data_until: 0.0,
            created: target_away || clash,
            target_away,
            receiver_alarmed: false,
            outcome: None,
        });
        self.metrics.handshakes += 1;
        let mut f = Frame::control(FrameKind::Pra, hs, s, Some(r), proposed, reserve_until);
        f.free_mask = free;
        self.nodes[s].role = Role::SendingPra(hs);
        self.bump(s);
        self.transmit(s, f);
    }

    /// Exchanges on `channel` that would interfere with one between `s`
    /// and `r`.
    fn clashes(&self, s: usize, r: usize, channel: u8, now: f64) -> Vec<Exchange> {
        let net = &self.cfg.network;
        self.exchanges
            .iter()
            .filter(|e| e.channel == channel && e.until > now)
            .filter(|e| [s, r].iter().any(|&x| [e.a, e.b].iter().any(|&y| x == y || net.hears(x, y))))
            .copied()
            .collect()
    }

    // ---- the radio ------------------------------------------------------

    fn duration(&self, kind: FrameKind) -> f64 {
        let t = &self.cfg.timing;
        match kind {
            FrameKind::Pra => t.t_pra,
            FrameKind::Prb => t.t_prb,
            FrameKind::Cfa => t.t_cfa,
            FrameKind::Cfb => t.t_cfb,
            FrameKind::Inv => t.t_inv,
            FrameKind::Ncf => t.t_ncf,
        }
    }

    fn transmit(&mut self, node: usize, frame: Frame) {
        let id = self.next_tx;
        self.next_tx += 1;
        let now = self.now;
        {
            let n = &mut self.nodes[node];
            n.tx = Some(Tx { id, frame });
            for rx in &mut n.rx {
                rx.collided = true;
            }
        }
        self.metrics.frames_sent[node] += 1;
        self.log(node, TraceKind::TxStart, Some(frame), None);
        let wakes_target = frame.kind == FrameKind::Pra;
        for k in 0..self.cfg.network.neighbors(node).len() {
            let m = self.cfg.network.neighbors(node)[k];
            if wakes_target && frame.dst == Some(m) && !self.nodes[m].awake && !self.nodes[m].forced_sleep {
                self.wake(m);
            }
            let nm = &mut self.nodes[m];
            if nm.audible == 0 {
                nm.busy_since = now;
            }
            nm.audible += 1;
            if nm.can_receive() {
                let collided = !nm.rx.is_empty();
                for rx in &mut nm.rx {
                    rx.collided = true;
                }
                nm.rx.push(Rx { tx: id, collided });
            }
        }
        let end = now + self.duration(frame.kind);
        self.at(end, Ev::TxEnd { node, tx: id });
    }

    fn tx_end(&mut self, node: usize, tx: u64) {
        let now = self.now;
        let frame = {
            let n = &mut self.nodes[node];
            let t = n.tx.take().expect("transmitting");
            debug_assert_eq!(t.id, tx);
            if n.audible == 0 {
                n.idle_since = now;
            }
            t.frame
        };
        self.log(node, TraceKind::TxEnd, Some(frame), None);
        let mut delivered = Vec::new();
        let mut garbled = Vec::new();
        for &m in self.cfg.network.neighbors(node) {
            let nm = &mut self.nodes[m];
            nm.audible -= 1;
            if nm.audible == 0 && nm.tx.is_none() {
                nm.idle_since = now;
                // came onto the channel mid-frame: the EIFS restarts once it is quiet
                if nm.listening_since > nm.busy_since {
                    nm.listening_since = now;
                }
            }
            if let Some(pos) = nm.rx.iter().position(|r| r.tx == tx) {
                let rx = nm.rx.remove(pos);
                if rx.collided {
                    garbled.push(m);
                } else {
                    delivered.push(m);
                }
            }
        }
        self.after_tx(node, frame);
        let mut contenders = Vec::new();
        for m in delivered {
            self.deliver(m, &frame, &mut contenders);
        }
        for m in garbled {
            self.log(m, TraceKind::Collision, Some(frame), None);
            if frame.kind == FrameKind::Inv {
                self.alarm(m, None);
            }
        }
        if !contenders.is_empty() {
            self.run_ccap(&contenders, frame.handshake);
        }
    }

    fn after_tx(&mut self, node: usize, frame: Frame) {
        let tm = self.cfg.timing;
        let now = self.now;
        match (frame.kind, self.nodes[node].role) {
            (FrameKind::Pra, Role::SendingPra(hs)) => {
                self.nodes[node].role = Role::AwaitPrb(hs);
                let epoch = self.bump(node);
                self.at(now + tm.slot() + tm.t_prb + tm.guard(), Ev::Timeout { node, epoch });
            }
            (FrameKind::Prb, Role::SendingPrb(hs)) => {
                if self.hss[hs].confirmed.is_none() {
                    self.nodes[node].role = Role::Idle;
                    self.bump(node);
                    self.resume(node);
                } else {
                    self.nodes[node].role = Role::AwaitCfa(hs);
                    let epoch = self.bump(node);
                    self.at(now + tm.slot() + tm.t_cfa + tm.guard(), Ev::Timeout { node, epoch });
                }
            }
            (FrameKind::Cfa, Role::SendingCfa(hs)) => {
                self.nodes[node].role = Role::AwaitCfb(hs);
                let epoch = self.bump(node);
                self.at(now + tm.t_cfb + tm.guard(), Ev::Timeout { node, epoch });
            }
            (FrameKind::Cfb, Role::SendingCfb(hs)) => self.enter_data(node, hs),
            (FrameKind::Ncf, Role::SendingNcf(hs)) => self.fail(node, hs, Outcome::AbortedNcf, None),
            (FrameKind::Inv, Role::SendingInv) => self.nodes[node].role = Role::Idle,
            (kind, role) => unreachable!("{kind:?} sent from {role:?}"),
        }
    }

    fn deliver(&mut self, m: usize, frame: &Frame, contenders: &mut Vec<Contender>) {
        let now = self.now;
        self.log(m, TraceKind::Rx, Some(*frame), None);
        let hs = frame.handshake;
        let (s, r) = (self.hss[hs].sender, self.hss[hs].receiver);
        {
            let n = &mut self.nodes[m];
            n.table.purge_participant(frame.src);
            if frame.kind != FrameKind::Inv && frame.dst != Some(m) {
                n.nav_until = n.nav_until.max(frame.reserve_until);
            }
        }
        if self.cfg.network.is_altruist(m) && matches!(frame.kind, FrameKind::Pra | FrameKind::Prb) {
            // judge liveness when the frame began: a peer returning mid-frame missed it
            let began = now - self.duration(frame.kind);
            if let Some(intent) = detect_mcc(&self.nodes[m].table, frame, began) {
                contenders.push(Contender { node: m, intent });
            }
        }
        match frame.kind {
            FrameKind::Cfa | FrameKind::Cfb if m != s && m != r => {
                let entry = UsageEntry {
                    channel: frame.channel.expect("confirmed channel"),
                    sender: s,
                    receiver: r,
                    busy_until: frame.busy_until,
                };
                self.nodes[m].table.insert(entry);
            }
            FrameKind::Inv => {
                if let Some(e) = frame.usage {
                    if !e.involves(m) {
                        self.nodes[m].table.insert(e);
                    }
                }
            }
            _ => {}
        }
        if frame.kind == FrameKind::Inv {
            self.alarm(m, frame.usage);
            return;
        }
        if frame.dst != Some(m) {
            return;
        }
        let role = self.nodes[m].role;
        match frame.kind {
            FrameKind::Pra if self.is_peer(m) && matches!(role, Role::Idle | Role::Waiting) => {
                self.nodes[m].role = Role::RespondWait(hs);
                let epoch = self.bump(m);
                self.at(now + self.cfg.timing.slot(), Ev::SendPrb { node: m, epoch });
            }
            FrameKind::Prb if role == Role::AwaitPrb(hs) => {
                self.bump(m);
                match frame.channel {
                    None => self.fail(m, hs, Outcome::Declined, None),
                    Some(c) => {
                        self.hss[hs].confirmed = Some(c);
                        self.nodes[m].role = Role::AwaitCfaSlot(hs);
                        let epoch = self.nodes[m].epoch;
                        self.at(now + self.cfg.timing.slot(), Ev::SendCfa { node: m, epoch });
                    }
                }
            }
            FrameKind::Cfa if role == Role::AwaitCfa(hs) => {
                self.bump(m);
                self.nodes[m].role = Role::SendingCfb(hs);
                let h = &self.hss[hs];
                let mut f = Frame::control(FrameKind::Cfb, hs, m, Some(s), h.confirmed, h.reserve_until);
                f.busy_until = h.data_until;
                self.transmit(m, f);
            }
            FrameKind::Cfb if role == Role::AwaitCfb(hs) => self.enter_data(m, hs),
            _ => {}
        }
    }

    /// An INV, decoded or garbled, reached `m`.
    fn alarm(&mut self, m: usize, usage: Option<UsageEntry>) {
        let exchange = self.cfg.timing.exchange();
        match self.nodes[m].role {
            Role::AwaitPrb(hs) | Role::AwaitCfaSlot(hs) => {
                let until = usage.map_or(self.now + exchange, |e| e.busy_until);
                self.fail(m, hs, Outcome::PreventedByInv, Some(until));
            }
            Role::RespondWait(hs) | Role::AwaitCfa(hs) => {
                self.hss[hs].receiver_alarmed = true;
                self.nodes[m].role = Role::Idle;
                self.bump(m);
                self.resume(m);
            }
            _ => {}
        }
    }

    fn run_ccap(&mut self, contenders: &[Contender], hs: usize) {
        let tm = self.cfg.timing;
        let net = &self.cfg.network;
        let out = ccap_contention(contenders, tm.ccap, tm.t_inv, |a, b| net.hears(a, b), &mut self.rng);
        for d in out.decisions {
            match d {
                CcapDecision::Transmit { node, delay, intent } => {
                    self.at(self.now + delay, Ev::InvStart { node, intent, hs })
                }
                CcapDecision::Suppressed { node, by } => {
                    let by = self.cfg.network.ids[by].clone();
                    self.log(node, TraceKind::InvSuppressed, None, Some(format!("by={by}")));
                }
            }
        }
    }

    fn inv_start(&mut self, node: usize, intent: InvIntent, hs: usize) {
        if self.nodes[node].senses_busy(self.now) {
            self.log(node, TraceKind::InvSuppressed, None, Some("medium busy".into()));
            return;
        }
        let kind = match intent.kind {
            MccKind::ChannelConflict => "channel_conflict",
            MccKind::DeafTerminal => "deaf_terminal",
        };
        self.log(node, TraceKind::Mcc, None, Some(format!("detected={kind}")));
        let mut f = Frame::control(FrameKind::Inv, hs, node, Some(intent.alarmed), Some(intent.entry.channel), 0.0);
        f.usage = Some(intent.entry);
        self.nodes[node].role = Role::SendingInv;
        self.transmit(node, f);
    }

    // ---- handshake steps --------------------------------------------------

    fn send_prb(&mut self, node: usize, hs: usize) {
        let now = self.now;
        let own = self.nodes[node].table.free_mask(self.cfg.data_channels, now);
        let h = &self.hss[hs];
        let mutual = own & h.free_mask;
        let confirmed = match h.proposed {
            Some(p) if mutual >> p & 1 == 1 => Some(p),
            _ if mutual != 0 => Some(mutual.trailing_zeros() as u8),
            _ => None,
        };
        let (s, r) = (h.sender, h.receiver);
        if let Some(c) = confirmed {
            if !self.clashes(s, r, c, now).is_empty() {
                self.hss[hs].created = true;
            }
        }
        self.hss[hs].confirmed = confirmed;
        let f = Frame::control(FrameKind::Prb, hs, node, Some(s), confirmed, self.hss[hs].reserve_until);
        self.nodes[node].role = Role::SendingPrb(hs);
        self.bump(node);
        self.transmit(node, f);
    }

    fn send_cfa(&mut self, node: usize, hs: usize) {
        let tm = self.cfg.timing;
        let until = self.now + tm.t_cfa + tm.t_cfb + tm.exchange();
        self.hss[hs].data_until = until;
        let h = &self.hss[hs];
        let mut f = Frame::control(FrameKind::Cfa, hs, node, Some(h.receiver), h.confirmed, h.reserve_until);
        f.busy_until = until;
        self.nodes[node].role = Role::SendingCfa(hs);
        self.bump(node);
        self.transmit(node, f);
    }

    fn timeout(&mut self, node: usize) {
        match self.nodes[node].role {
            Role::AwaitPrb(hs) => {
                let h = &self.hss[hs];
                let outcome = if h.receiver_alarmed {
                    Outcome::PreventedByInv
                } else if h.target_away {
                    Outcome::DeafTerminalRealized
                } else {
                    Outcome::ControlCollision
                };
                if outcome == Outcome::DeafTerminalRealized {
                    let ev = MccEvent {
                        time: self.now,
                        kind: MccKind::DeafTerminal,
                        sender: h.sender,
                        receiver: h.receiver,
                        channel: h.proposed,
                        edges: vec![PeerPair::new(h.sender, h.receiver)],
                    };
                    self.mcc_events.push(ev);
                }
                self.fail(node, hs, outcome, None);
            }
            Role::AwaitCfa(_) => {
                self.nodes[node].role = Role::Idle;
                self.bump(node);
                self.resume(node);
            }
            Role::AwaitCfb(hs) => {
                let h = &self.hss[hs];
                let f = Frame::control(FrameKind::Ncf, hs, node, Some(h.receiver), h.confirmed, h.reserve_until);
                self.nodes[node].role = Role::SendingNcf(hs);
                self.bump(node);
                self.transmit(node, f);
            }
            _ => {}
        }
    }

    fn enter_data(&mut self, node: usize, hs: usize) {
        let until = self.hss[hs].data_until;
        {
            let n = &mut self.nodes[node];
            n.on_control = false;
            n.rx.clear();
            n.role = Role::Data(hs);
        }
        let epoch = self.bump(node);
        self.at(until, Ev::DataEnd { node, epoch });
        self.log(node, TraceKind::ToData, None, self.hss[hs].confirmed.map(|c| format!("channel={c}")));
        if node != self.hss[hs].sender {
            return;
        }
        let (s, r) = (self.hss[hs].sender, self.hss[hs].receiver);
        let c = self.hss[hs].confirmed.expect("confirmed channel");
        let clashes = self.clashes(s, r, c, self.now);
        let outcome = if clashes.is_empty() {
            Outcome::Success
        } else {
            let net = &self.cfg.network;
            let mut edges: Vec<PeerPair> = clashes
                .iter()
                .flat_map(|e| [(s, e.a), (s, e.b), (r, e.a), (r, e.b)])
                .filter(|&(x, y)| x != y && net.hears(x, y))
                .map(|(x, y)| PeerPair::new(x, y))
                .collect();
            edges.sort();
            edges.dedup();
            self.mcc_events.push(MccEvent {
                time: self.now,
                kind: MccKind::ChannelConflict,
                sender: s,
                receiver: r,
                channel: Some(c),
                edges,
            });
            Outcome::ChannelConflictRealized
        };
        self.exchanges.retain(|e| e.until > self.now);
        self.exchanges.push(Exchange { a: s, b: r, channel: c, until });
        self.record(node, hs, outcome);
        self.nodes[node].queue.pop_front();
        self.metrics.delivered += 1;
    }

    fn data_end(&mut self, node: usize) {
        {
            let n = &mut self.nodes[node];
            n.on_control = true;
            n.listening_since = self.now;
            n.role = Role::Idle;
        }
        self.bump(node);
        self.log(node, TraceKind::Return, None, None);
        self.resume(node);
    }

    fn record(&mut self, node: usize, hs: usize, outcome: Outcome) {
        let h = &mut self.hss[hs];
        debug_assert!(h.outcome.is_none());
        h.outcome = Some(outcome);
        let created = h.created;
        self.metrics.record(outcome, created);
        self.log(node, TraceKind::Outcome, None, Some(outcome.name().to_string()));
    }

    fn fail(&mut self, node: usize, hs: usize, outcome: Outcome, wait_until: Option<f64>) {
        self.record(node, hs, outcome);
        self.nodes[node].role = Role::Idle;
        self.bump(node);
        let max = self.cfg.max_attempts;
        let attempts = {
            let q = &mut self.nodes[node].queue;
            let head = q.front_mut().expect("handshake for a queued packet");
            head.attempts += 1;
            let a = head.attempts;
            if a >= max {
                q.pop_front();
                self.metrics.dropped += 1;
            }
            a
        };
        if self.nodes[node].queue.is_empty() || self.now >= self.cfg.horizon_us {
            self.maybe_sleep(node);
            return;
        }
        let from = self.gate(node).max(wait_until.unwrap_or(self.now));
        let t = from + self.cfg.timing.difs + self.backoff(attempts.min(max));
        self.wait_until(node, t);
    }

    // ---- power saving ---------------------------------------------------

    fn maybe_sleep(&mut self, node: usize) {
        if self.cfg.psm != PsmMode::Psm || !self.is_peer(node) {
            return;
        }
        let n = &self.nodes[node];
        if n.awake && n.role == Role::Idle && n.queue.is_empty() && n.on_control && n.tx.is_none() {
            self.sleep(node, false);
        }
    }

    fn sleep(&mut self, node: usize, forced: bool) {
        let now = self.now;
        let n = &mut self.nodes[node];
        n.awake_total += now - n.awake_since;
        n.awake = false;
        n.forced_sleep = forced;
        n.rx.clear();
        self.log(node, TraceKind::Sleep, None, forced.then(|| "scripted".to_string()));
    }

    fn forced_sleep(&mut self, node: usize, until: f64) {
        let n = &self.nodes[node];
        if !n.awake {
            self.nodes[node].forced_sleep = true;
            return;
        }
        if !matches!(n.role, Role::Idle | Role::Waiting) || !n.on_control || n.tx.is_some() {
            // busy; try again shortly while the window is still open
            let retry = self.now + self.cfg.timing.difs;
            if retry < until {
                self.at(retry, Ev::SleepStart { node, until });
            }
            return;
        }
        self.nodes[node].role = Role::Idle;
        self.bump(node);
        self.sleep(node, true);
    }

    fn wake(&mut self, node: usize) {
        let now = self.now;
        let n = &mut self.nodes[node];
        n.awake = true;
        n.forced_sleep = false;
        n.awake_since = now;
        n.listening_since = now;
        self.log(node, TraceKind::Wake, None, None);
    }

    fn finish(mut self) -> SimOutput {
        let end = self.now.max(self.cfg.horizon_us);
        self.metrics.end_time = end;
        for p in 0..self.cfg.network.peers {
            let n = &self.nodes[p];
            let awake = n.awake_total + if n.awake { end - n.awake_since } else { 0.0 };
            self.metrics.awake_fraction[p] = if end > 0.0 { awake / end } else { 1.0 };
        }
        debug_assert_eq!(self.metrics.handshakes, self.metrics.outcome_total());
        let handshakes = self
            .hss
            .iter()
            .map(|h| HandshakeRecord {
                sender: h.sender,
                receiver: h.receiver,
                start: h.start,
                proposed: h.proposed,
                confirmed: h.confirmed,
                outcome: h.outcome,
                created: h.created,
            })
            .collect();
        SimOutput { metrics: self.metrics, mcc_events: self.mcc_events, handshakes, trace: self.trace }
    }
}
