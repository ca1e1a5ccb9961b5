use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::topology::PeerPair;
use crate::unsafe_pairs::MccKind;

/// How a handshake ended, from the initiator's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    PreventedByInv,
    AbortedNcf,
    ChannelConflictRealized,
    DeafTerminalRealized,
    ControlCollision,
    /// The receiver found no mutually free channel.
    Declined,
}

impl Outcome {
    pub const ALL: [Outcome; 7] = [
        Outcome::Success,
        Outcome::PreventedByInv,
        Outcome::AbortedNcf,
        Outcome::ChannelConflictRealized,
        Outcome::DeafTerminalRealized,
        Outcome::ControlCollision,
        Outcome::Declined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::PreventedByInv => "prevented_by_inv",
            Outcome::AbortedNcf => "aborted_ncf",
            Outcome::ChannelConflictRealized => "channel_conflict_realized",
            Outcome::DeafTerminalRealized => "deaf_terminal_realized",
            Outcome::ControlCollision => "control_collision",
            Outcome::Declined => "declined",
        }
    }

    pub fn realized(self) -> Option<MccKind> {
        match self {
            Outcome::ChannelConflictRealized => Some(MccKind::ChannelConflict),
            Outcome::DeafTerminalRealized => Some(MccKind::DeafTerminal),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        Outcome::ALL.iter().position(|&o| o == self).expect("listed")
    }
}

/// A realized MCC problem and the peer pairs it is attributed to.
#[derive(Debug, Clone, PartialEq)]
pub struct MccEvent {
    pub time: f64,
    pub kind: MccKind,
    pub sender: usize,
    pub receiver: usize,
    pub channel: Option<u8>,
    /// Deaf terminal: the initiator and its target. Channel conflict: every
    /// adjacent pair across the two clashing exchanges.
    pub edges: Vec<PeerPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    pub seed: u64,
    pub handshakes: u64,
    pub outcomes: [u64; 7],
    pub mcc_created: u64,
    pub mcc_prevented: u64,
    pub mcc_realized: u64,
    pub arrivals: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Per peer.
    pub awake_fraction: Vec<f64>,
    /// Per node, peers then altruists.
    pub frames_sent: Vec<u64>,
    pub end_time: f64,
}

impl SimMetrics {
    pub fn new(seed: u64, nodes: usize, peers: usize) -> Self {
        SimMetrics {
            seed,
            handshakes: 0,
            outcomes: [0; 7],
            mcc_created: 0,
            mcc_prevented: 0,
            mcc_realized: 0,
            arrivals: 0,
            delivered: 0,
            dropped: 0,
            awake_fraction: vec![1.0; peers],
            frames_sent: vec![0; nodes],
            end_time: 0.0,
        }
    }

    pub fn count(&self, o: Outcome) -> u64 {
        self.outcomes[o.slot()]
    }

    pub(crate) fn record(&mut self, o: Outcome, created: bool) {
        self.outcomes[o.slot()] += 1;
        let realized = o.realized().is_some();
        if created || realized {
            self.mcc_created += 1;
            if realized {
                self.mcc_realized += 1;
            } else {
                self.mcc_prevented += 1;
            }
        }
    }

    pub fn outcome_total(&self) -> u64 {
        self.outcomes.iter().sum()
    }

    pub fn mean_awake(&self) -> f64 {
        if self.awake_fraction.is_empty() {
            1.0
        } else {
            self.awake_fraction.iter().sum::<f64>() / self.awake_fraction.len() as f64
        }
    }
}

pub fn csv_header(peer_ids: &[String]) -> Vec<String> {
    let mut h: Vec<String> = ["seed", "handshakes"].iter().map(|s| s.to_string()).collect();
    h.extend(Outcome::ALL.iter().map(|o| o.name().to_string()));
    h.extend(
        ["mcc_created", "mcc_prevented", "mcc_realized", "arrivals", "delivered", "dropped", "mean_awake"]
            .iter()
            .map(|s| s.to_string()),
    );
    h.extend(peer_ids.iter().map(|id| format!("awake_{id}")));
    h
}

pub fn csv_row(m: &SimMetrics) -> Vec<String> {
    let mut r = vec![m.seed.to_string(), m.handshakes.to_string()];
    r.extend(m.outcomes.iter().map(u64::to_string));
    r.extend(
        [m.mcc_created, m.mcc_prevented, m.mcc_realized, m.arrivals, m.delivered, m.dropped].map(|v| v.to_string()),
    );
    let mut mean = String::new();
    let _ = write!(mean, "{:.6}", m.mean_awake());
    r.push(mean);
    r.extend(m.awake_fraction.iter().map(|f| format!("{f:.6}")));
    r
}

/// One header row and one row per run, in the order given.
pub fn write_csv<W: std::io::Write>(out: W, peer_ids: &[String], runs: &[SimMetrics]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(peer_ids))?;
    for m in runs {
        w.write_record(csv_row(m))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accounting_splits_created_into_prevented_and_realized() {
        let mut m = SimMetrics::new(1, 2, 2);
        m.record(Outcome::Success, false);
        m.record(Outcome::PreventedByInv, true);
        m.record(Outcome::DeafTerminalRealized, false);
        assert_eq!((m.mcc_created, m.mcc_prevented, m.mcc_realized), (2, 1, 1));
        assert_eq!(m.outcome_total(), 3);
        assert_eq!(m.count(Outcome::Success), 1);
    }

    #[test]
    fn csv_has_one_column_per_peer() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let mut buf = Vec::new();
        write_csv(&mut buf, &ids, &[SimMetrics::new(7, 2, 2)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("seed,handshakes,success,"));
        assert!(header.ends_with("awake_a,awake_b"));
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), header.split(',').count());
        assert!(row.starts_with("7,0,"));
    }
}
