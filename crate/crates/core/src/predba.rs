//! The prediction-augmented wrappers.
//!
//! Every node derives the same active set `L` from the global prediction.
//! Members of `L` run the inner protocol (Phase King without signatures,
//! parallel Dolev-Strong with them) and broadcast their result in one extra
//! round. Passive nodes adopt a value announced by at least `|L| - t + 1`
//! members of `L` and otherwise keep their own input.

use num_rational::Ratio;

use crate::error::Result;
use crate::model::{all_nodes, Bit, Mode, NodeId, Prediction, TrustParam};
use crate::protocols::{DolevStrong, InnerProtocol, PhaseKing, ProtocolSchedule};
use crate::simnet::{Ledger, Message, Node, Outbox, Payload};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSet {
    pub mode: Mode,
    /// Sorted ascending.
    pub members: Vec<NodeId>,
    /// `t`; the inner protocol tolerates `t - 1` faults.
    pub fault_param: usize,
    pub min_size: Ratio<i64>,
}

impl ActiveSet {
    pub fn contains(&self, id: NodeId) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn inner_budget(&self) -> usize {
        self.fault_param.saturating_sub(1)
    }

    /// Announcements a passive node needs before adopting a value.
    pub fn passive_threshold(&self) -> usize {
        self.members.len() + 1 - self.fault_param
    }

    pub fn schedule(&self) -> ProtocolSchedule {
        let protocol = match self.mode {
            Mode::NonAuth => InnerProtocol::PhaseKing,
            Mode::Auth => InnerProtocol::DolevStrongBa,
        };
        ProtocolSchedule::new(protocol, self.members.clone(), self.inner_budget())
    }
}

/// Minimum size of `L`: `3/2 (1 - alpha) n - 1` or `2 (1 - alpha) n - 1`.
pub fn active_set_threshold(mode: Mode, alpha: TrustParam, n: usize) -> Result<Ratio<i64>> {
    let a = alpha.check(mode)?.value();
    let one = Ratio::from_integer(1);
    let factor = match mode {
        Mode::NonAuth => Ratio::new(3, 2),
        Mode::Auth => Ratio::from_integer(2),
    };
    Ok(factor * (one - a) * Ratio::from_integer(n as i64) - one)
}

/// Starts from the prediction and pads with the lowest missing ids until the
/// mode's minimum size is reached.
pub fn build_active_set(pred: &Prediction, alpha: TrustParam, n: usize, mode: Mode) -> Result<ActiveSet> {
    pred.validate(n)?;
    let min_size = active_set_threshold(mode, alpha, n)?;
    let mut members: Vec<NodeId> = pred.members.iter().copied().collect();
    let mut padding = all_nodes(n).filter(|y| !pred.contains(*y));
    while Ratio::from_integer(members.len() as i64) < min_size {
        match padding.next() {
            Some(y) => members.push(y),
            None => break,
        }
    }
    members.sort_unstable();
    let size = members.len();
    let fault_param = match mode {
        Mode::NonAuth => size.div_ceil(3),
        Mode::Auth => size.div_ceil(2),
    };
    Ok(ActiveSet { mode, members, fault_param, min_size })
}

enum Inner {
    PhaseKing(PhaseKing),
    DolevStrong(DolevStrong),
}

/// A node running `pred_ba` (without signatures) or `auth_pred_ba` (with).
pub struct PredBaNode {
    n: usize,
    input: Bit,
    active: ActiveSet,
    inner: Option<Inner>,
    inner_rounds: u32,
    decision: Option<Bit>,
}

impl PredBaNode {
    pub fn new(me: NodeId, input: Bit, pred: &Prediction, alpha: TrustParam, n: usize, mode: Mode) -> Result<Self> {
        let active = build_active_set(pred, alpha, n, mode)?;
        let budget = active.inner_budget();
        let inner_rounds = active.schedule().total_rounds;
        let inner = active.contains(me).then(|| match mode {
            Mode::NonAuth => Inner::PhaseKing(PhaseKing::new(me, input, &active.members, n, budget)),
            Mode::Auth => {
                Inner::DolevStrong(DolevStrong::new(me, input, &active.members, &active.members, n, budget))
            }
        });
        Ok(PredBaNode { n, input, active, inner, inner_rounds, decision: None })
    }

    pub fn active_set(&self) -> &ActiveSet {
        &self.active
    }

    /// Round at which every node decides.
    pub fn decision_round(&self) -> u32 {
        self.inner_rounds + 1
    }

    fn inner_output(&self) -> Option<Bit> {
        self.inner.as_ref().map(|inner| match inner {
            Inner::PhaseKing(pk) => pk.output(),
            Inner::DolevStrong(ds) => ds.majority(),
        })
    }

    fn adopt(&self, inbox: &[Message]) -> Bit {
        let mut counts = [0usize; 2];
        let mut last = None;
        for msg in inbox {
            if let Payload::Decision { value } = msg.payload {
                if last != Some(msg.sender) && self.active.contains(msg.sender) {
                    counts[value.index()] += 1;
                    last = Some(msg.sender);
                }
            }
        }
        let need = self.active.passive_threshold();
        [Bit::Zero, Bit::One].into_iter().find(|b| counts[b.index()] >= need).unwrap_or(self.input)
    }
}

impl Node for PredBaNode {
    fn send(&mut self, out: &mut Outbox<'_>) -> Result<()> {
        let r = out.round();
        if r <= self.inner_rounds {
            match self.inner.as_mut() {
                Some(Inner::PhaseKing(pk)) => pk.send(r, out),
                Some(Inner::DolevStrong(ds)) => ds.send(r, out)?,
                None => {}
            }
        } else if r == self.decision_round() {
            if let Some(value) = self.inner_output() {
                for to in all_nodes(self.n) {
                    out.send(to, Payload::Decision { value });
                }
            }
        }
        Ok(())
    }

    fn receive(&mut self, round: u32, inbox: &[Message], ledger: &Ledger) {
        if round <= self.inner_rounds {
            match self.inner.as_mut() {
                Some(Inner::PhaseKing(pk)) => pk.receive(round, inbox),
                Some(Inner::DolevStrong(ds)) => ds.receive(round, inbox, ledger),
                None => {}
            }
        } else if round == self.decision_round() {
            self.decision = Some(match self.inner_output() {
                Some(v) => v,
                None => self.adopt(inbox),
            });
        }
    }

    fn decision(&self) -> Option<Bit> {
        self.decision
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(set: &ActiveSet) -> Vec<u32> {
        set.members.iter().map(|m| m.0).collect()
    }

    #[test]
    fn padding_examples() {
        let a: TrustParam = "0.8".parse().unwrap();
        let set = build_active_set(&Prediction::from_ids([3, 7]), a, 20, Mode::NonAuth).unwrap();
        assert_eq!(ids(&set), vec![1, 2, 3, 4, 7]);
        assert_eq!(set.fault_param, 2);
        let set = build_active_set(&Prediction::from_ids(1..=6), a, 20, Mode::NonAuth).unwrap();
        assert_eq!(ids(&set), (1..=6).collect::<Vec<_>>());
        assert_eq!(set.fault_param, 2);
        let set = build_active_set(&Prediction::default(), "0.75".parse().unwrap(), 16, Mode::Auth).unwrap();
        assert_eq!(ids(&set), (1..=7).collect::<Vec<_>>());
        assert_eq!(set.fault_param, 4);
    }

    #[test]
    fn passive_threshold_is_a_strict_majority() {
        for size in 1..200usize {
            for (mode, t) in [(Mode::NonAuth, size.div_ceil(3)), (Mode::Auth, size.div_ceil(2))] {
                let set = ActiveSet {
                    mode,
                    members: (1..=size as u32).map(NodeId).collect(),
                    fault_param: t,
                    min_size: Ratio::from_integer(0),
                };
                assert!(2 * set.passive_threshold() > size, "{mode} {size}");
            }
        }
    }
}
