//! Per-node channel usage cache and the MCC check an overhearing node runs
//! against it.

use serde::{Deserialize, Serialize};

use crate::unsafe_pairs::MccKind;

use super::frame::{Frame, FrameKind};

/// One overheard data exchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsageEntry {
    pub channel: u8,
    pub sender: usize,
    pub receiver: usize,
    pub busy_until: f64,
}

impl UsageEntry {
    pub fn involves(&self, node: usize) -> bool {
        self.sender == node || self.receiver == node
    }

    pub fn live(&self, now: f64) -> bool {
        self.busy_until > now
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelUsageTable {
    entries: Vec<UsageEntry>,
}

impl ChannelUsageTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[UsageEntry] {
        &self.entries
    }

    /// Records an exchange, replacing anything known about its two peers.
    pub fn insert(&mut self, e: UsageEntry) {
        self.entries.retain(|o| !o.involves(e.sender) && !o.involves(e.receiver));
        self.entries.push(e);
    }

    /// Drops entries naming `node`; called when `node` is heard on the control
    /// channel and so is evidently not away.
    pub fn purge_participant(&mut self, node: usize) {
        self.entries.retain(|o| !o.involves(node));
    }

    pub fn expire(&mut self, now: f64) {
        self.entries.retain(|e| e.live(now));
    }

    pub fn channel_entry(&self, channel: u8, now: f64) -> Option<&UsageEntry> {
        self.entries.iter().find(|e| e.channel == channel && e.live(now))
    }

    pub fn node_entry(&self, node: usize, now: f64) -> Option<&UsageEntry> {
        self.entries.iter().find(|e| e.involves(node) && e.live(now))
    }

    /// Bit `c` set when channel `c` looks free.
    pub fn free_mask(&self, channels: usize, now: f64) -> u64 {
        (0..channels as u8).filter(|&c| self.channel_entry(c, now).is_none()).fold(0, |m, c| m | 1 << c)
    }

    pub fn earliest_expiry(&self, now: f64) -> Option<f64> {
        self.entries.iter().filter(|e| e.live(now)).map(|e| e.busy_until).min_by(f64::total_cmp)
    }
}

/// What an overhearing cooperative node decides to alarm about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvIntent {
    pub kind: MccKind,
    /// The handshaking node the INV tells to back off.
    pub alarmed: usize,
    /// Carried as the INV payload.
    pub entry: UsageEntry,
}

/// Checks an overheard PRA or PRB against the table: a proposed or confirmed
/// channel already in use is a channel conflict; a PRA addressed to a peer
/// recorded as away is a deaf terminal. Other frame kinds never alarm.
/// `at` is the instant the observed frame started.
pub fn detect_mcc(table: &ChannelUsageTable, observed: &Frame, at: f64) -> Option<InvIntent> {
    match observed.kind {
        FrameKind::Pra | FrameKind::Prb => {}
        _ => return None,
    }
    if let Some(c) = observed.channel {
        if let Some(e) = table.channel_entry(c, at) {
            return Some(InvIntent { kind: MccKind::ChannelConflict, alarmed: observed.src, entry: *e });
        }
    }
    if observed.kind == FrameKind::Pra {
        let target = observed.dst?;
        if let Some(e) = table.node_entry(target, at) {
            return Some(InvIntent { kind: MccKind::DeafTerminal, alarmed: observed.src, entry: *e });
        }
    }
    None
}
