//! Deterministic synchronous round engine.
//!
//! Each round has three steps. Honest nodes emit their messages, the
//! adversary sees all of them and then emits the faulty nodes' messages, and
//! finally every message is delivered in the same round. Inboxes are ordered
//! by sender id and, within a sender, by send order.

mod ledger;
mod message;
mod transcript;

use std::collections::BTreeMap;

pub use ledger::{Ledger, Minter};
pub use message::{Digest, Message, Payload, SigChain, Signature, Token};
pub use transcript::{RoundRecord, Transcript};

use crate::error::{Error, Result};
use crate::model::{Bit, NodeId};

/// A protocol state machine, driven once per round.
pub trait Node: Send {
    /// Emits this round's messages.
    fn send(&mut self, out: &mut Outbox<'_>) -> Result<()>;

    /// Consumes the messages delivered this round.
    fn receive(&mut self, round: u32, inbox: &[Message], ledger: &Ledger);

    fn decision(&self) -> Option<Bit>;
}

/// Outgoing channel of one node for one round.
pub struct Outbox<'a> {
    me: NodeId,
    round: u32,
    n: usize,
    buffer: &'a mut Vec<Message>,
    ledger: &'a mut Ledger,
    minter: Minter,
    may_sign: bool,
}

impl<'a> Outbox<'a> {
    /// `may_sign` tells whether the caller owns the key of `me`.
    pub fn new(
        me: NodeId,
        round: u32,
        n: usize,
        buffer: &'a mut Vec<Message>,
        ledger: &'a mut Ledger,
        minter: Minter,
        may_sign: bool,
    ) -> Self {
        Outbox { me, round, n, buffer, ledger, minter, may_sign }
    }

    pub fn me(&self) -> NodeId {
        self.me
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Room for `additional` more messages this round.
    pub fn reserve(&mut self, additional: usize) {
        self.buffer.reserve(additional);
    }

    pub fn send(&mut self, to: NodeId, payload: Payload) {
        self.send_signed(to, payload, SigChain::empty());
    }

    pub fn send_signed(&mut self, to: NodeId, payload: Payload, sig_chain: SigChain) {
        debug_assert!(to.0 >= 1 && to.index() <= self.n, "receiver {to} out of range");
        self.buffer.push(Message { round: self.round, sender: self.me, receiver: to, payload, sig_chain });
    }

    pub fn sign(&mut self, payload: &Payload) -> Result<Signature> {
        self.ledger.mint(self.me, payload.digest(), self.minter, self.may_sign)
    }
}

/// Honest traffic of one round, as seen by the rushing adversary.
pub struct RoundTraffic<'a> {
    by_sender: &'a [Vec<Message>],
}

impl<'a> RoundTraffic<'a> {
    pub fn from(&self, sender: NodeId) -> &'a [Message] {
        self.by_sender.get(sender.index()).map_or(&[], |v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a Message> {
        self.by_sender.iter().flatten()
    }
}

/// Everything delivered in one round, indexed by receiver.
pub struct Delivered<'a> {
    inboxes: &'a [Vec<Message>],
}

impl<'a> Delivered<'a> {
    pub fn inbox(&self, receiver: NodeId) -> &'a [Message] {
        self.inboxes.get(receiver.index()).map_or(&[], |v| v.as_slice())
    }
}

/// Outgoing channel of the adversary for one round.
pub struct AdversaryOutbox<'a> {
    round: u32,
    n: usize,
    faulty: &'a [bool],
    by_sender: &'a mut [Vec<Message>],
    ledger: &'a mut Ledger,
}

impl<'a> AdversaryOutbox<'a> {
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_faulty(&self, id: NodeId) -> bool {
        self.faulty.get(id.index()).copied().unwrap_or(false)
    }

    /// Sends `payload` as faulty node `from`.
    pub fn send(&mut self, from: NodeId, to: NodeId, payload: Payload, sig_chain: SigChain) -> Result<()> {
        self.emit(Message { round: self.round, sender: from, receiver: to, payload, sig_chain })
    }

    /// Sends a prepared message; its round is overwritten with the current one.
    pub fn emit(&mut self, mut msg: Message) -> Result<()> {
        if !self.is_faulty(msg.sender) {
            return Err(Error::Impersonation(msg.sender));
        }
        if msg.receiver.0 == 0 || msg.receiver.index() > self.n {
            return Err(Error::NodeOutOfRange(msg.receiver, self.n));
        }
        msg.round = self.round;
        self.by_sender[msg.sender.index()].push(msg);
        Ok(())
    }

    pub fn mint(&mut self, signer: NodeId, digest: Digest) -> Result<Signature> {
        let owned = self.is_faulty(signer);
        self.ledger.mint(signer, digest, Minter::Adversary, owned)
    }

    /// An outbox that lets a simulated instance of `me` produce messages
    /// into `buffer`. Signing succeeds only for faulty `me`.
    pub fn persona<'b>(&'b mut self, me: NodeId, buffer: &'b mut Vec<Message>) -> Outbox<'b> {
        let owned = self.is_faulty(me);
        Outbox::new(me, self.round, self.n, buffer, self.ledger, Minter::Adversary, owned)
    }
}

/// Controller of the faulty nodes.
pub trait Adversary: Send {
    fn act(&mut self, traffic: &RoundTraffic<'_>, out: &mut AdversaryOutbox<'_>) -> Result<()>;

    /// Called after delivery so simulated instances can process their inboxes.
    fn observe(&mut self, _round: u32, _delivered: &Delivered<'_>, _ledger: &Ledger) {}
}

/// Adversary that never sends anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct Silent;

impl Adversary for Silent {
    fn act(&mut self, _: &RoundTraffic<'_>, _: &mut AdversaryOutbox<'_>) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub round_budget: u32,
    pub record_transcripts: bool,
}

impl RunOptions {
    /// Budget of `4 (n + 2)` rounds, without transcripts.
    pub fn for_n(n: usize) -> Self {
        RunOptions { round_budget: 4 * (n as u32 + 2), record_transcripts: false }
    }

    pub fn with_transcripts(mut self) -> Self {
        self.record_transcripts = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub decisions: BTreeMap<NodeId, Bit>,
    /// Round in which each honest node first reported a decision.
    pub decided_at: BTreeMap<NodeId, u32>,
    pub decided_round: u32,
    pub transcripts: Option<Vec<Transcript>>,
    pub ledger: Ledger,
}

/// Runs honest `nodes` against `adversary` until every honest node decides.
///
/// Nodes absent from `nodes` are faulty. Fails with
/// [`Error::RoundBudgetExceeded`] if some honest node is still undecided
/// after the budget.
pub fn run(
    n: usize,
    mut nodes: BTreeMap<NodeId, Box<dyn Node>>,
    adversary: &mut dyn Adversary,
    options: RunOptions,
) -> Result<SimResult> {
    if let Some(id) = nodes.keys().find(|id| id.0 == 0 || id.index() > n) {
        return Err(Error::NodeOutOfRange(*id, n));
    }
    let mut faulty = vec![false; n + 1];
    for i in 1..=n {
        faulty[i] = !nodes.contains_key(&NodeId(i as u32));
    }
    let mut ledger = Ledger::new();
    let mut transcripts: Option<Vec<Transcript>> = options.record_transcripts.then(|| {
        (1..=n)
            .map(|i| Transcript { node: NodeId(i as u32), faulty: faulty[i], rounds: Vec::new() })
            .collect()
    });
    let mut decided_at = BTreeMap::new();
    let mut round = 0u32;
    let mut note_decisions = |nodes: &BTreeMap<NodeId, Box<dyn Node>>, round: u32| {
        for (id, node) in nodes {
            if node.decision().is_some() {
                decided_at.entry(*id).or_insert(round);
            }
        }
        decided_at.len() == nodes.len()
    };
    let mut done = note_decisions(&nodes, 0);
    while !done {
        if round >= options.round_budget {
            return Err(Error::RoundBudgetExceeded(options.round_budget));
        }
        round += 1;
        let mut honest_out: Vec<Vec<Message>> = vec![Vec::new(); n + 1];
        for (id, node) in nodes.iter_mut() {
            let mut out = Outbox::new(*id, round, n, &mut honest_out[id.index()], &mut ledger, Minter::Owner, true);
            node.send(&mut out)?;
        }
        for (id, msgs) in honest_out.iter().enumerate() {
            if let Some(m) = msgs.iter().find(|m| m.receiver.0 == 0 || m.receiver.index() > n) {
                return Err(Error::NodeOutOfRange(m.receiver, n));
            }
            debug_assert!(msgs.iter().all(|m| m.sender.index() == id));
        }
        let mut faulty_out: Vec<Vec<Message>> = vec![Vec::new(); n + 1];
        {
            let traffic = RoundTraffic { by_sender: &honest_out };
            let mut out = AdversaryOutbox {
                round,
                n,
                faulty: &faulty,
                by_sender: &mut faulty_out,
                ledger: &mut ledger,
            };
            adversary.act(&traffic, &mut out)?;
        }
        let mut sizes = vec![0usize; n + 1];
        for s in 1..=n {
            let sent = if faulty[s] { &faulty_out[s] } else { &honest_out[s] };
            for m in sent {
                sizes[m.receiver.index()] += 1;
            }
        }
        let mut inboxes: Vec<Vec<Message>> = sizes.iter().map(|k| Vec::with_capacity(*k)).collect();
        for s in 1..=n {
            let sent = if faulty[s] { &mut faulty_out[s] } else { &mut honest_out[s] };
            if let Some(ts) = transcripts.as_mut() {
                ts[s - 1].rounds.push(RoundRecord { round, sent: sent.clone(), received: Vec::new() });
            }
            for msg in sent.drain(..) {
                inboxes[msg.receiver.index()].push(msg);
            }
        }
        if let Some(ts) = transcripts.as_mut() {
            for (t, inbox) in ts.iter_mut().zip(&inboxes[1..]) {
                t.rounds.last_mut().expect("round record").received = inbox.clone();
            }
        }
        for (id, node) in nodes.iter_mut() {
            node.receive(round, &inboxes[id.index()], &ledger);
        }
        adversary.observe(round, &Delivered { inboxes: &inboxes }, &ledger);
        done = note_decisions(&nodes, round);
    }
    let decisions = nodes.iter().filter_map(|(id, node)| node.decision().map(|d| (*id, d))).collect();
    let decided_round = decided_at.values().copied().max().unwrap_or(0);
    Ok(SimResult { decisions, decided_at, decided_round, transcripts, ledger })
}
