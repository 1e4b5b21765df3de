//! Phase King with three-round phases.
//!
//! With budget `b` there are `b + 1` phases and the king of phase `k` is the
//! `k`-th participant in ascending id order (wrapping around). Honest
//! participants agree whenever fewer than `m / 3` of the `m` participants are
//! faulty and `b` is at least the number of faulty participants.

use crate::error::Result;
use crate::model::{Bit, NodeId};
use crate::simnet::{Message, Node, Outbox, Payload};

#[derive(Clone, Debug)]
pub struct PhaseKing {
    me: NodeId,
    members: Vec<NodeId>,
    is_member: Vec<bool>,
    budget: usize,
    value: Bit,
    proposal: Option<Bit>,
    strong: bool,
}

impl PhaseKing {
    /// `members` must be sorted ascending; `n` bounds the node ids.
    pub fn new(me: NodeId, input: Bit, members: &[NodeId], n: usize, budget: usize) -> Self {
        let mut is_member = vec![false; n + 1];
        for m in members {
            is_member[m.index()] = true;
        }
        PhaseKing { me, members: members.to_vec(), is_member, budget, value: input, proposal: None, strong: false }
    }

    /// `3 (b + 1)` rounds, or none without participants.
    pub fn rounds(participants: usize, budget: usize) -> u32 {
        if participants == 0 {
            0
        } else {
            3 * (budget as u32 + 1)
        }
    }

    pub fn output(&self) -> Bit {
        self.value
    }

    fn king(&self, phase: u32) -> NodeId {
        self.members[phase as usize % self.members.len()]
    }

    fn step(round: u32) -> (u32, u32) {
        ((round - 1) / 3, (round - 1) % 3)
    }

    /// Sends for the protocol-local round `round` (1-based).
    pub fn send(&mut self, round: u32, out: &mut Outbox<'_>) {
        let (phase, step) = Self::step(round);
        let payload = match step {
            0 => Payload::Vote { phase, value: self.value },
            1 => match self.proposal {
                Some(value) => Payload::Propose { phase, value },
                None => return,
            },
            _ if self.king(phase) == self.me => Payload::King { phase, value: self.value },
            _ => return,
        };
        for &m in &self.members {
            out.send(m, payload);
        }
    }

    /// Counts the first matching message of every participant.
    fn tally(&self, inbox: &[Message], want: impl Fn(&Payload) -> Option<Bit>) -> [usize; 2] {
        let mut counts = [0usize; 2];
        let mut last: Option<NodeId> = None;
        for msg in inbox {
            if !self.is_member.get(msg.sender.index()).copied().unwrap_or(false) || last == Some(msg.sender) {
                continue;
            }
            if let Some(v) = want(&msg.payload) {
                counts[v.index()] += 1;
                last = Some(msg.sender);
            }
        }
        counts
    }

    pub fn receive(&mut self, round: u32, inbox: &[Message]) {
        let (phase, step) = Self::step(round);
        let m = self.members.len();
        match step {
            0 => {
                let votes = self.tally(inbox, |p| match *p {
                    Payload::Vote { phase: ph, value } if ph == phase => Some(value),
                    _ => None,
                });
                let need = m.saturating_sub(self.budget);
                self.proposal = [Bit::Zero, Bit::One].into_iter().find(|b| votes[b.index()] >= need);
            }
            1 => {
                let props = self.tally(inbox, |p| match *p {
                    Payload::Propose { phase: ph, value } if ph == phase => Some(value),
                    _ => None,
                });
                let pick = if props[1] > props[0] { Bit::One } else { Bit::Zero };
                if props[pick.index()] > self.budget {
                    self.value = pick;
                    self.strong = props[pick.index()] >= m.saturating_sub(self.budget);
                } else {
                    self.strong = false;
                }
            }
            _ => {
                let king = self.king(phase);
                let from_king = inbox.iter().find_map(|msg| match msg.payload {
                    Payload::King { phase: ph, value } if ph == phase && msg.sender == king => Some(value),
                    _ => None,
                });
                if !self.strong {
                    if let Some(v) = from_king {
                        self.value = v;
                    }
                }
                self.proposal = None;
                self.strong = false;
            }
        }
    }
}

/// Stand-alone Phase King node over a fixed participant set.
pub struct PhaseKingNode {
    core: Option<PhaseKing>,
    input: Bit,
    rounds: u32,
    decision: Option<Bit>,
}

impl PhaseKingNode {
    pub fn new(me: NodeId, input: Bit, members: &[NodeId], n: usize, budget: usize) -> Self {
        let member = members.contains(&me);
        let rounds = PhaseKing::rounds(members.len(), budget);
        PhaseKingNode {
            core: member.then(|| PhaseKing::new(me, input, members, n, budget)),
            input,
            rounds,
            decision: None,
        }
    }
}

impl Node for PhaseKingNode {
    fn send(&mut self, out: &mut Outbox<'_>) -> Result<()> {
        let r = out.round();
        if let Some(core) = self.core.as_mut().filter(|_| r <= self.rounds) {
            core.send(r, out);
        }
        Ok(())
    }

    fn receive(&mut self, round: u32, inbox: &[Message], _: &crate::simnet::Ledger) {
        if round > self.rounds {
            return;
        }
        if let Some(core) = self.core.as_mut() {
            core.receive(round, inbox);
        }
        if round == self.rounds {
            self.decision = Some(self.core.as_ref().map_or(self.input, PhaseKing::output));
        }
    }

    fn decision(&self) -> Option<Bit> {
        self.decision
    }
}
