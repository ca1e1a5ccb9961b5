//! Unsafe-pair classification from vertex degrees and triangle membership.
//!
//! Without power saving, adjacent peers `i`, `j` form an unsafe pair when
//! either both degrees are at least two and not both exactly two, or both are
//! exactly two and the edge lies on no triangle. With power saving the rule
//! above still governs channel conflicts, while deaf terminals arise on every
//! edge except an isolated one.

use serde::{Deserialize, Serialize};

use crate::topology::{AdjacencyGraph, GraphError, PeerPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsmMode {
    NoPsm,
    Psm,
}

impl PsmMode {
    pub const ALL: [PsmMode; 2] = [PsmMode::NoPsm, PsmMode::Psm];
}

/// Which clause made a pair unsafe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    CondA,
    CondB,
    PsmDeaf,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MccKind {
    ChannelConflict,
    DeafTerminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClassification {
    pub pair: PeerPair,
    pub mode: PsmMode,
    pub channel_conflict_up: bool,
    pub deaf_terminal_up: bool,
    pub condition: Condition,
}

impl PairClassification {
    pub fn is_unsafe(&self) -> bool {
        self.channel_conflict_up || self.deaf_terminal_up
    }

    pub fn risk(&self, kind: MccKind) -> bool {
        match kind {
            MccKind::ChannelConflict => self.channel_conflict_up,
            MccKind::DeafTerminal => self.deaf_terminal_up,
        }
    }

    pub fn risks(&self) -> Vec<MccKind> {
        let mut out = Vec::new();
        if self.channel_conflict_up {
            out.push(MccKind::ChannelConflict);
        }
        if self.deaf_terminal_up {
            out.push(MccKind::DeafTerminal);
        }
        out
    }
}

fn joint_condition(g: &AdjacencyGraph, i: usize, j: usize) -> Result<Condition, GraphError> {
    let triangle = g.shared_triangle(i, j)?;
    let (di, dj) = (g.degree(i), g.degree(j));
    let both_two = di == 2 && dj == 2;
    Ok(if di >= 2 && dj >= 2 && !both_two {
        Condition::CondA
    } else if both_two && !triangle {
        Condition::CondB
    } else {
        Condition::None
    })
}

/// Classifies the edge `(i, j)`; the result is independent of argument order.
pub fn classify_pair(g: &AdjacencyGraph, i: usize, j: usize, mode: PsmMode) -> Result<PairClassification, GraphError> {
    let joint = joint_condition(g, i, j)?;
    let pair = PeerPair::new(i, j);
    let conflict = joint != Condition::None;
    Ok(match mode {
        PsmMode::NoPsm => PairClassification {
            pair,
            mode,
            channel_conflict_up: conflict,
            deaf_terminal_up: conflict,
            condition: joint,
        },
        PsmMode::Psm => {
            let (di, dj) = (g.degree(i), g.degree(j));
            let deaf = di >= 1 && dj >= 1 && !(di == 1 && dj == 1);
            let condition = match (conflict, deaf) {
                (true, _) => joint,
                (false, true) => Condition::PsmDeaf,
                (false, false) => Condition::None,
            };
            PairClassification { pair, mode, channel_conflict_up: conflict, deaf_terminal_up: deaf, condition }
        }
    })
}

/// The set `U` of unsafe pairs of a graph, ordered by `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnsafePairSet {
    mode: PsmMode,
    entries: Vec<PairClassification>,
}

impl UnsafePairSet {
    pub fn mode(&self) -> PsmMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PairClassification] {
        &self.entries
    }

    pub fn pairs(&self) -> impl Iterator<Item = PeerPair> + '_ {
        self.entries.iter().map(|c| c.pair)
    }

    pub fn position(&self, pair: PeerPair) -> Option<usize> {
        self.entries.binary_search_by(|c| c.pair.cmp(&pair)).ok()
    }

    pub fn contains(&self, pair: PeerPair) -> bool {
        self.position(pair).is_some()
    }

    /// Vertices incident to at least one unsafe pair, ascending.
    pub fn endpoints(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs().flat_map(|p| [p.lo, p.hi]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn report(&self, g: &AdjacencyGraph) -> Vec<UpReportEntry> {
        self.entries
            .iter()
            .map(|c| UpReportEntry {
                pair: [g.id(c.pair.lo).to_string(), g.id(c.pair.hi).to_string()],
                condition: c.condition,
                risks: c.risks(),
                mode: c.mode,
            })
            .collect()
    }
}

/// One row of the JSON unsafe-pair report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpReportEntry {
    pub pair: [String; 2],
    pub condition: Condition,
    pub risks: Vec<MccKind>,
    pub mode: PsmMode,
}

pub fn enumerate_unsafe_pairs(g: &AdjacencyGraph, mode: PsmMode) -> UnsafePairSet {
    let entries = g
        .edges()
        .map(|e| classify_pair(g, e.lo, e.hi, mode).expect("edge endpoints are adjacent"))
        .filter(PairClassification::is_unsafe)
        .collect();
    UnsafePairSet { mode, entries }
}
