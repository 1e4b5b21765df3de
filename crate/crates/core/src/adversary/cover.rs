//! Persona strategies.
//!
//! The adversary simulates a "cover world" with two sides. Every node has a
//! copy on the left side, the right side, or both. A copy on side `s` hears a
//! sender through that sender's copy on `s` when it has one, and through its
//! only copy otherwise. Honest nodes are real copies; every other copy is a
//! protocol instance run by the adversary, and a faulty node forwards to each
//! honest node exactly what its copy heard by that node would send.
//!
//! Because every copy follows the protocol, any honest node's view equals
//! its view in the configuration where the copies it hears are honest, which
//! is the indistinguishability the impossibility arguments rely on. Replay
//! is the special case where every node has one copy; split brain puts the
//! two honest partitions on opposite sides.

use serde::{Deserialize, Serialize};

use super::AdversaryContext;
use crate::error::{Error, Result};
use crate::model::{all_nodes, Bit, Configuration, Mode, NodeId, PredictionInput};
use crate::simnet::{Adversary, AdversaryOutbox, Delivered, Ledger, Message, Node, RoundTraffic};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Left,
    Right,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// Where nodes missing from both side lists get copies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unlisted {
    #[default]
    Both,
    Left,
}

/// Placement of copies in the cover world.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverPlan {
    #[serde(default)]
    pub unlisted: Unlisted,
    #[serde(default)]
    pub left_only: Vec<NodeId>,
    #[serde(default)]
    pub right_only: Vec<NodeId>,
    /// Input of simulated copies on the left side.
    pub left_input: Bit,
    pub right_input: Bit,
    /// Prediction of simulated left copies; defaults to the node's own.
    #[serde(default)]
    pub left_prediction: Option<PredictionInput>,
    #[serde(default)]
    pub right_prediction: Option<PredictionInput>,
    /// Side of honest nodes that have copies on both sides.
    #[serde(default)]
    pub honest_side: Side,
    /// Faulty nodes fall silent after this round.
    #[serde(default)]
    pub stop_after: Option<u32>,
}

impl CoverPlan {
    /// Every faulty node runs one honest instance with `input`.
    pub fn replay(input: Bit, prediction: Option<PredictionInput>) -> Self {
        CoverPlan {
            unlisted: Unlisted::Left,
            left_only: Vec::new(),
            right_only: Vec::new(),
            left_input: input,
            right_input: input,
            left_prediction: prediction.clone(),
            right_prediction: prediction,
            honest_side: Side::Left,
            stop_after: None,
        }
    }

    pub fn split_brain(
        config: &Configuration,
        a: Option<&[NodeId]>,
        b: Option<&[NodeId]>,
        value_to_a: Bit,
        value_to_b: Bit,
    ) -> Self {
        let honest: Vec<NodeId> = config.honest().collect();
        let (mut left, right) = match (a, b) {
            (Some(a), Some(b)) => (a.to_vec(), b.to_vec()),
            (Some(a), None) => (a.to_vec(), honest.iter().copied().filter(|i| !a.contains(i)).collect()),
            (None, Some(b)) => (honest.iter().copied().filter(|i| !b.contains(i)).collect(), b.to_vec()),
            (None, None) => {
                let (zeros, ones): (Vec<NodeId>, Vec<NodeId>) =
                    honest.iter().partition(|i| config.input(**i) == Some(Bit::Zero));
                if zeros.is_empty() || ones.is_empty() {
                    let half = honest.len() / 2;
                    (honest[..half].to_vec(), honest[half..].to_vec())
                } else {
                    (zeros, ones)
                }
            }
        };
        let rest: Vec<NodeId> = honest.iter().copied().filter(|i| !left.contains(i) && !right.contains(i)).collect();
        left.extend(rest);
        CoverPlan {
            unlisted: Unlisted::Both,
            left_only: left,
            right_only: right,
            left_input: value_to_a,
            right_input: value_to_b,
            left_prediction: None,
            right_prediction: None,
            honest_side: Side::Left,
            stop_after: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Real,
    Copy(usize),
}

struct Persona {
    node: NodeId,
    sources: Vec<Source>,
    machine: Box<dyn Node>,
    outbox: Vec<Message>,
}

pub struct CoverAdversary {
    n: usize,
    personas: Vec<Persona>,
    /// (faulty sender, honest receiver, persona whose messages are forwarded)
    routes: Vec<(NodeId, NodeId, usize)>,
    stop_after: Option<u32>,
}

impl CoverAdversary {
    pub fn new(plan: &CoverPlan, ctx: &AdversaryContext<'_>) -> Result<Self> {
        let n = ctx.n();
        let config = ctx.config;
        let reject = |msg: String| Error::StrategyRejected(msg);
        // Bit 0: copy on the left, bit 1: copy on the right.
        let default = match plan.unlisted {
            Unlisted::Both => 0b11u8,
            Unlisted::Left => 0b01,
        };
        let mut sides = vec![default; n + 1];
        let mut listed = vec![false; n + 1];
        for (list, mask) in [(&plan.left_only, 0b01u8), (&plan.right_only, 0b10u8)] {
            for &id in list.iter() {
                if id.0 == 0 || id.index() > n {
                    return Err(Error::NodeOutOfRange(id, n));
                }
                if std::mem::replace(&mut listed[id.index()], true) {
                    return Err(reject(format!("node {id} listed twice")));
                }
                sides[id.index()] = mask;
            }
        }
        let has = |id: NodeId, side: Side| sides[id.index()] & (1 << side.index()) != 0;
        let real_side = |id: NodeId| -> Option<Side> {
            if config.is_faulty(id) {
                None
            } else if sides[id.index()] == 0b11 {
                Some(plan.honest_side)
            } else if has(id, Side::Left) {
                Some(Side::Left)
            } else {
                Some(Side::Right)
            }
        };
        let heard_side = |listener: Side, sender: NodeId| if has(sender, listener) { listener } else { listener.other() };

        // Create the simulated copies.
        let mut slot = vec![[None::<usize>; 2]; n + 1];
        let mut specs = Vec::new();
        for id in all_nodes(n) {
            for side in [Side::Left, Side::Right] {
                if !has(id, side) || real_side(id) == Some(side) {
                    continue;
                }
                if !config.is_faulty(id) && ctx.mode == Mode::Auth {
                    return Err(reject(format!(
                        "simulating honest node {id} would require its signatures in auth mode"
                    )));
                }
                slot[id.index()][side.index()] = Some(specs.len());
                specs.push((id, side));
            }
        }
        let source = |listener: Side, sender: NodeId| -> Source {
            let side = heard_side(listener, sender);
            match slot[sender.index()][side.index()] {
                Some(k) => Source::Copy(k),
                None => Source::Real,
            }
        };
        for i in config.honest() {
            let side = real_side(i).expect("honest");
            if let Some(j) = config.honest().find(|j| source(side, *j) != Source::Real) {
                return Err(reject(format!("honest node {i} would hear a simulated copy of honest node {j}")));
            }
        }
        let mut personas = Vec::with_capacity(specs.len());
        for &(id, side) in &specs {
            let (input, pred) = match side {
                Side::Left => (plan.left_input, &plan.left_prediction),
                Side::Right => (plan.right_input, &plan.right_prediction),
            };
            let prediction = match pred {
                Some(p) => p.for_node(id).clone(),
                None => ctx.predictions.of(id).clone(),
            };
            let mut sources = vec![Source::Real; n + 1];
            for j in all_nodes(n) {
                sources[j.index()] = source(side, j);
            }
            personas.push(Persona {
                node: id,
                sources,
                machine: ctx.protocol.instantiate(id, input, &prediction)?,
                outbox: Vec::new(),
            });
        }
        let mut routes = Vec::new();
        for j in config.faulty.iter().copied() {
            for i in config.honest() {
                if let Source::Copy(k) = source(real_side(i).expect("honest"), j) {
                    routes.push((j, i, k));
                }
            }
        }
        Ok(CoverAdversary { n, personas, routes, stop_after: plan.stop_after })
    }

    fn stopped(&self, round: u32) -> bool {
        self.stop_after.is_some_and(|last| round > last)
    }
}

fn from_sender(inbox: &[Message], sender: NodeId) -> &[Message] {
    let start = inbox.partition_point(|m| m.sender < sender);
    let end = inbox.partition_point(|m| m.sender <= sender);
    &inbox[start..end]
}

/// Stable counting sort, so each receiver still gets its messages in send order.
fn sort_by_receiver(outbox: &mut Vec<Message>, n: usize) {
    if outbox.windows(2).all(|w| w[0].receiver <= w[1].receiver) {
        return;
    }
    let mut next = vec![0usize; n + 2];
    for m in outbox.iter() {
        next[m.receiver.index() + 1] += 1;
    }
    for i in 1..next.len() {
        next[i] += next[i - 1];
    }
    let mut slots: Vec<Option<Message>> = vec![None; outbox.len()];
    for m in outbox.drain(..) {
        let k = &mut next[m.receiver.index()];
        slots[*k] = Some(m);
        *k += 1;
    }
    outbox.extend(slots.into_iter().map(|m| m.expect("every slot filled")));
}

/// Messages of a receiver-sorted outbox addressed to `receiver`.
fn to_receiver(outbox: &[Message], receiver: NodeId) -> &[Message] {
    let start = outbox.partition_point(|m| m.receiver < receiver);
    let end = outbox.partition_point(|m| m.receiver <= receiver);
    &outbox[start..end]
}

impl Adversary for CoverAdversary {
    fn act(&mut self, _: &RoundTraffic<'_>, out: &mut AdversaryOutbox<'_>) -> Result<()> {
        if self.stopped(out.round()) {
            return Ok(());
        }
        for p in &mut self.personas {
            p.outbox.clear();
            let mut o = out.persona(p.node, &mut p.outbox);
            p.machine.send(&mut o)?;
            sort_by_receiver(&mut p.outbox, self.n);
        }
        for &(j, i, k) in &self.routes {
            for msg in to_receiver(&self.personas[k].outbox, i) {
                debug_assert_eq!(msg.sender, j);
                out.emit(msg.clone())?;
            }
        }
        Ok(())
    }

    fn observe(&mut self, round: u32, delivered: &Delivered<'_>, ledger: &Ledger) {
        if self.stopped(round) {
            return;
        }
        let inboxes: Vec<Vec<Message>> = self
            .personas
            .iter()
            .map(|p| {
                let real = delivered.inbox(p.node);
                let mut inbox = Vec::with_capacity(real.len());
                for j in all_nodes(self.n) {
                    match p.sources[j.index()] {
                        Source::Real => inbox.extend_from_slice(from_sender(real, j)),
                        Source::Copy(k) => inbox.extend_from_slice(to_receiver(&self.personas[k].outbox, p.node)),
                    }
                }
                inbox
            })
            .collect();
        for (p, inbox) in self.personas.iter_mut().zip(inboxes) {
            p.machine.receive(round, &inbox, ledger);
        }
    }
}
