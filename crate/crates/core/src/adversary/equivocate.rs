use super::AdversaryContext;
use crate::error::Result;
use crate::model::{Bit, NodeId};
use crate::protocols::{InnerProtocol, ScheduleHint};
use crate::simnet::{Adversary, AdversaryOutbox, Payload, RoundTraffic, SigChain};

/// Crafted two-faced messages.
///
/// Honest nodes are split into a 0-side and a 1-side (by input when inputs
/// differ, otherwise by id halves). In Phase King steps every faulty
/// participant votes, proposes and, as king, commands the side's value. In
/// Dolev-Strong every faulty sender withholds its broadcast and reveals both
/// values with all-faulty chains as late as possible, one per side. In the
/// decision round each side is told its own value.
pub struct Equivocate {
    hint: ScheduleHint,
    faulty: Vec<NodeId>,
    honest: Vec<(NodeId, Bit)>,
}

impl Equivocate {
    pub fn new(ctx: &AdversaryContext<'_>) -> Self {
        let config = ctx.config;
        let honest: Vec<NodeId> = config.honest().collect();
        let mixed = config.inputs.values().any(|b| *b == Bit::Zero) && config.inputs.values().any(|b| *b == Bit::One);
        let half = honest.len() / 2;
        let honest = honest
            .iter()
            .enumerate()
            .map(|(k, &i)| (i, if mixed { config.input(i).unwrap_or_default() } else { Bit::from(k >= half) }))
            .collect();
        Equivocate { hint: ctx.hint.clone(), faulty: config.faulty.iter().copied().collect(), honest }
    }
}

impl Adversary for Equivocate {
    fn act(&mut self, _: &RoundTraffic<'_>, out: &mut AdversaryOutbox<'_>) -> Result<()> {
        let r = out.round();
        if self.hint.decision_round == Some(r) {
            for &j in &self.faulty {
                for &(i, side) in &self.honest {
                    out.send(j, i, Payload::Decision { value: side }, SigChain::empty())?;
                }
            }
        }
        let Some(inner) = self.hint.inner.as_ref().filter(|s| r <= s.total_rounds) else {
            if self.hint.inner.is_none() && r == 1 {
                for &j in &self.faulty {
                    for &(i, side) in &self.honest {
                        out.send(j, i, Payload::Echo { value: side }, SigChain::empty())?;
                    }
                }
            }
            return Ok(());
        };
        let members: Vec<NodeId> =
            self.faulty.iter().copied().filter(|j| inner.participants.binary_search(j).is_ok()).collect();
        match inner.protocol {
            InnerProtocol::PhaseKing => {
                let (phase, step) = ((r - 1) / 3, (r - 1) % 3);
                let king = inner.participants[phase as usize % inner.participants.len()];
                for &j in &members {
                    let template = match step {
                        0 => Payload::Vote { phase, value: Bit::Zero },
                        1 => Payload::Propose { phase, value: Bit::Zero },
                        _ if j == king => Payload::King { phase, value: Bit::Zero },
                        _ => continue,
                    };
                    for &(i, side) in &self.honest {
                        out.send(j, i, template.with_value(side), SigChain::empty())?;
                    }
                }
            }
            InnerProtocol::DolevStrongBa => {
                // Latest round in which a chain of distinct faulty signers can still be accepted.
                let reveal = inner.total_rounds.min(members.len() as u32);
                if r != reveal {
                    return Ok(());
                }
                let needed = r as usize;
                for &s in &members {
                    let signers: Vec<NodeId> =
                        std::iter::once(s).chain(members.iter().copied().filter(|m| *m != s)).take(needed).collect();
                    let relayer = *signers.last().expect("at least one signer");
                    for value in [Bit::Zero, Bit::One] {
                        let payload = Payload::Relay { instance: s, value };
                        let digest = payload.digest();
                        let chain = signers.iter().map(|x| out.mint(*x, digest)).collect::<Result<SigChain>>()?;
                        for &(i, side) in self.honest.iter().filter(|(_, side)| *side == value) {
                            debug_assert_eq!(side, value);
                            out.send(relayer, i, payload, chain.clone())?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
