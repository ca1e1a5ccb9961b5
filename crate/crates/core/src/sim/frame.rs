use serde::{Deserialize, Serialize};

use super::table::UsageEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FrameKind {
    Pra,
    Prb,
    Cfa,
    Cfb,
    Inv,
    Ncf,
}

impl FrameKind {
    pub fn name(self) -> &'static str {
        match self {
            FrameKind::Pra => "PRA",
            FrameKind::Prb => "PRB",
            FrameKind::Cfa => "CFA",
            FrameKind::Cfb => "CFB",
            FrameKind::Inv => "INV",
            FrameKind::Ncf => "NCF",
        }
    }
}

/// A control-channel frame. Fields that a kind does not use stay at their
/// neutral values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    /// Handshake the frame belongs to; INV frames carry the alarmed one.
    pub handshake: usize,
    pub src: usize,
    pub dst: Option<usize>,
    /// Proposed (PRA), confirmed (PRB, CFA, CFB) channel.
    pub channel: Option<u8>,
    /// Sender's free channels (PRA).
    pub free_mask: u64,
    /// End of the control-channel reservation, for NAV.
    pub reserve_until: f64,
    /// End of the data exchange (CFA, CFB).
    pub busy_until: f64,
    /// INV payload.
    pub usage: Option<UsageEntry>,
}

impl Frame {
    pub fn control(
        kind: FrameKind,
        handshake: usize,
        src: usize,
        dst: Option<usize>,
        channel: Option<u8>,
        reserve_until: f64,
    ) -> Frame {
        Frame { kind, handshake, src, dst, channel, free_mask: 0, reserve_until, busy_until: 0.0, usage: None }
    }
}
