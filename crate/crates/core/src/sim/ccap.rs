//! Contention among cooperative nodes during one CCAP window.

use rand::Rng;

use super::table::InvIntent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contender {
    pub node: usize,
    pub intent: InvIntent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CcapDecision {
    /// Starts its INV `delay` after the window opens.
    Transmit { node: usize, delay: f64, intent: InvIntent },
    /// Heard an earlier INV and stays quiet.
    Suppressed { node: usize, by: usize },
}

/// How an INV-bearing window looks from one listener.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlarmReception {
    Silent,
    Decoded,
    /// Overlapping INVs: nothing decodes but the energy is still an alarm.
    CollidedAlarming,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcapOutcome {
    pub decisions: Vec<CcapDecision>,
    pub t_inv: f64,
}

impl CcapOutcome {
    pub fn transmitters(&self) -> impl Iterator<Item = (usize, f64, InvIntent)> + '_ {
        self.decisions.iter().filter_map(|d| match *d {
            CcapDecision::Transmit { node, delay, intent } => Some((node, delay, intent)),
            CcapDecision::Suppressed { .. } => None,
        })
    }

    /// What `listener` receives, given who it hears.
    pub fn reception_at<F: Fn(usize, usize) -> bool>(&self, listener: usize, hears: F) -> AlarmReception {
        let heard: Vec<f64> = self.transmitters().filter(|&(n, _, _)| hears(n, listener)).map(|(_, d, _)| d).collect();
        match heard.len() {
            0 => AlarmReception::Silent,
            1 => AlarmReception::Decoded,
            _ => {
                let mut d = heard;
                d.sort_by(f64::total_cmp);
                if d.windows(2).any(|w| w[1] - w[0] < self.t_inv) {
                    AlarmReception::CollidedAlarming
                } else {
                    AlarmReception::Decoded
                }
            }
        }
    }
}

/// Each contender draws a start in `[0, ccap]`. In start order, a contender
/// that hears an INV already on the air defers; mutually hidden contenders
/// both transmit. Ties by node index.
pub fn ccap_contention<R: Rng, F: Fn(usize, usize) -> bool>(
    contenders: &[Contender],
    ccap: f64,
    t_inv: f64,
    hears: F,
    rng: &mut R,
) -> CcapOutcome {
    let mut drawn: Vec<(f64, Contender)> = contenders.iter().map(|c| (rng.random_range(0.0..=ccap), *c)).collect();
    drawn.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.node.cmp(&b.1.node)));
    let mut on_air: Vec<(usize, f64)> = Vec::new();
    let mut decisions = Vec::with_capacity(drawn.len());
    for (delay, c) in drawn {
        let blocker = on_air
            .iter()
            .find(|&&(n, start)| start < delay && delay < start + t_inv && hears(n, c.node))
            .map(|&(n, _)| n);
        match blocker {
            Some(by) => decisions.push(CcapDecision::Suppressed { node: c.node, by }),
            None => {
                on_air.push((c.node, delay));
                decisions.push(CcapDecision::Transmit { node: c.node, delay, intent: c.intent });
            }
        }
    }
    CcapOutcome { decisions, t_inv }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::table::UsageEntry;
    use crate::unsafe_pairs::MccKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn intent() -> InvIntent {
        InvIntent {
            kind: MccKind::ChannelConflict,
            alarmed: 0,
            entry: UsageEntry { channel: 0, sender: 5, receiver: 6, busy_until: 1e4 },
        }
    }

    fn contenders(nodes: &[usize]) -> Vec<Contender> {
        nodes.iter().map(|&node| Contender { node, intent: intent() }).collect()
    }

    #[test]
    fn lone_contender_is_decoded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = ccap_contention(&contenders(&[3]), 100.0, 200.0, |_, _| true, &mut rng);
        assert_eq!(out.transmitters().count(), 1);
        assert_eq!(out.reception_at(0, |_, _| true), AlarmReception::Decoded);
    }

    #[test]
    fn mutually_audible_contenders_only_send_once() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = ccap_contention(&contenders(&[3, 4, 5]), 100.0, 200.0, |_, _| true, &mut rng);
            assert_eq!(out.transmitters().count(), 1, "seed {seed}");
            assert_eq!(out.reception_at(0, |_, _| true), AlarmReception::Decoded);
        }
    }

    #[test]
    fn hidden_contenders_collide_but_still_alarm() {
        let hears = |a: usize, b: usize| a == 0 || b == 0 || a == b;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = ccap_contention(&contenders(&[3, 4]), 100.0, 200.0, hears, &mut rng);
        assert_eq!(out.transmitters().count(), 2);
        assert_eq!(out.reception_at(0, hears), AlarmReception::CollidedAlarming);
        assert_eq!(out.reception_at(7, |_, _| false), AlarmReception::Silent);
    }

    #[test]
    fn no_contenders_no_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = ccap_contention(&[], 100.0, 200.0, |_, _| true, &mut rng);
        assert!(out.decisions.is_empty());
    }
}
