use serde::Serialize;

use super::frame::{Frame, FrameKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Arrival,
    TxStart,
    TxEnd,
    Rx,
    Collision,
    InvSuppressed,
    Outcome,
    Mcc,
    ToData,
    Return,
    Sleep,
    Wake,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub node: usize,
    pub kind: TraceKind,
    pub frame: Option<Frame>,
    pub detail: Option<String>,
}

#[derive(Serialize)]
struct FrameLine<'a> {
    kind: FrameKind,
    src: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    dst: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel: Option<u8>,
}

#[derive(Serialize)]
struct Line<'a> {
    time: f64,
    node: &'a str,
    event: TraceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<FrameLine<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a str>,
}

/// One JSON object per line, node indices rendered as ids.
pub fn to_jsonl(events: &[TraceEvent], ids: &[String]) -> String {
    let mut out = String::new();
    for e in events {
        let frame = e.frame.map(|f| FrameLine {
            kind: f.kind,
            src: &ids[f.src],
            dst: f.dst.map(|d| ids[d].as_str()),
            channel: f.channel,
        });
        let line = Line { time: e.time, node: &ids[e.node], event: e.kind, frame, detail: e.detail.as_deref() };
        out.push_str(&serde_json::to_string(&line).expect("trace line serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_use_ids() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let f = Frame::control(FrameKind::Pra, 0, 0, Some(1), Some(2), 0.0);
        let ev = TraceEvent { time: 1.5, node: 1, kind: TraceKind::Rx, frame: Some(f), detail: None };
        let text = to_jsonl(&[ev], &ids);
        assert_eq!(
            text,
            "{\"time\":1.5,\"node\":\"b\",\"event\":\"rx\",\"frame\":{\"kind\":\"PRA\",\"src\":\"a\",\"dst\":\"b\",\"channel\":2}}\n"
        );
    }
}
