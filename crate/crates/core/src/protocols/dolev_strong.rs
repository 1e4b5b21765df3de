//! Dolev-Strong broadcast with parallel instances.
//!
//! Instance `s` carries the value of sender `s` as `Relay { instance: s }`
//! payloads. A relay received in protocol round `r` is accepted when its chain
//! holds at least `r` distinct valid participant signatures starting with
//! `s`. A newly accepted value is relayed once in the next round with the
//! receiver's signature appended. With budget `b` the protocol runs `b + 1`
//! rounds; an instance outputs its value if exactly one was accepted, else 0.

use crate::error::Result;
use crate::model::{Bit, NodeId};
use crate::simnet::{Ledger, Message, Node, Outbox, Payload, SigChain};

#[derive(Clone, Debug)]
pub struct DolevStrong {
    me: NodeId,
    members: Vec<NodeId>,
    is_member: Vec<bool>,
    is_instance: Vec<bool>,
    budget: usize,
    own: Option<Bit>,
    accepted: Vec<[bool; 2]>,
    pending: Vec<(NodeId, Bit, SigChain)>,
}

impl DolevStrong {
    /// Runs one instance per id in `instances`; `input` is broadcast when
    /// `me` is one of them.
    pub fn new(me: NodeId, input: Bit, members: &[NodeId], instances: &[NodeId], n: usize, budget: usize) -> Self {
        let mut is_member = vec![false; n + 1];
        members.iter().for_each(|m| is_member[m.index()] = true);
        let mut is_instance = vec![false; n + 1];
        instances.iter().filter(|s| is_member[s.index()]).for_each(|s| is_instance[s.index()] = true);
        let mut accepted = vec![[false; 2]; n + 1];
        let own = (is_instance[me.index()] && is_member[me.index()]).then_some(input);
        if let Some(v) = own {
            accepted[me.index()][v.index()] = true;
        }
        DolevStrong { me, members: members.to_vec(), is_member, is_instance, budget, own, accepted, pending: Vec::new() }
    }

    /// `b + 1` rounds, or none without participants.
    pub fn rounds(participants: usize, budget: usize) -> u32 {
        if participants == 0 {
            0
        } else {
            budget as u32 + 1
        }
    }

    pub fn output(&self, instance: NodeId) -> Bit {
        match self.accepted.get(instance.index()) {
            Some([false, true]) => Bit::One,
            _ => Bit::Zero,
        }
    }

    /// Majority of the instance outputs, ties to 0.
    pub fn majority(&self) -> Bit {
        let ones = self.members.iter().filter(|s| self.is_instance[s.index()] && self.output(**s) == Bit::One).count();
        let total = self.members.iter().filter(|s| self.is_instance[s.index()]).count();
        Bit::from(2 * ones > total)
    }

    pub fn send(&mut self, round: u32, out: &mut Outbox<'_>) -> Result<()> {
        if round == 1 {
            if let Some(value) = self.own {
                let payload = Payload::Relay { instance: self.me, value };
                let chain = SigChain::single(out.sign(&payload)?);
                for &m in &self.members {
                    out.send_signed(m, payload, chain.clone());
                }
            }
            return Ok(());
        }
        out.reserve(self.pending.len() * self.members.len());
        for (instance, value, chain) in std::mem::take(&mut self.pending) {
            let payload = Payload::Relay { instance, value };
            let chain = chain.extended(out.sign(&payload)?);
            for &m in &self.members {
                out.send_signed(m, payload, chain.clone());
            }
        }
        Ok(())
    }

    fn chain_ok(&self, msg: &Message, instance: NodeId, round: u32, ledger: &Ledger) -> bool {
        let chain = msg.sig_chain.as_slice();
        if chain.len() < round as usize || chain.first().map(|s| s.signer) != Some(instance) {
            return false;
        }
        let digest = msg.payload.digest();
        chain.iter().enumerate().all(|(k, sig)| {
            self.is_member.get(sig.signer.index()).copied().unwrap_or(false)
                && chain[..k].iter().all(|earlier| earlier.signer != sig.signer)
                && ledger.verify(sig, digest)
        })
    }

    pub fn receive(&mut self, round: u32, inbox: &[Message], ledger: &Ledger) {
        for msg in inbox {
            let Payload::Relay { instance, value } = msg.payload else { continue };
            if !self.is_member.get(msg.sender.index()).copied().unwrap_or(false)
                || !self.is_instance.get(instance.index()).copied().unwrap_or(false)
                || self.accepted[instance.index()][value.index()]
            {
                continue;
            }
            if self.chain_ok(msg, instance, round, ledger) {
                self.accepted[instance.index()][value.index()] = true;
                if (round as usize) <= self.budget {
                    self.pending.push((instance, value, msg.sig_chain.clone()));
                }
            }
        }
    }
}

/// Node that runs parallel broadcast among `members` and decides the majority.
pub struct DolevStrongBaNode {
    core: Option<DolevStrong>,
    input: Bit,
    rounds: u32,
    decision: Option<Bit>,
}

impl DolevStrongBaNode {
    pub fn new(me: NodeId, input: Bit, members: &[NodeId], n: usize, budget: usize) -> Self {
        let member = members.contains(&me);
        DolevStrongBaNode {
            core: member.then(|| DolevStrong::new(me, input, members, members, n, budget)),
            input,
            rounds: DolevStrong::rounds(members.len(), budget),
            decision: None,
        }
    }
}

impl Node for DolevStrongBaNode {
    fn send(&mut self, out: &mut Outbox<'_>) -> Result<()> {
        let r = out.round();
        match self.core.as_mut() {
            Some(core) if r <= self.rounds => core.send(r, out),
            _ => Ok(()),
        }
    }

    fn receive(&mut self, round: u32, inbox: &[Message], ledger: &Ledger) {
        if round > self.rounds {
            return;
        }
        if let Some(core) = self.core.as_mut() {
            core.receive(round, inbox, ledger);
        }
        if round == self.rounds {
            self.decision = Some(self.core.as_ref().map_or(self.input, DolevStrong::majority));
        }
    }

    fn decision(&self) -> Option<Bit> {
        self.decision
    }
}

/// Node taking part in a single broadcast from `sender`; decides the output of that instance.
pub struct BroadcastNode {
    core: DolevStrong,
    sender: NodeId,
    rounds: u32,
    decision: Option<Bit>,
}

impl BroadcastNode {
    pub fn new(me: NodeId, input: Bit, sender: NodeId, members: &[NodeId], n: usize, budget: usize) -> Self {
        BroadcastNode {
            core: DolevStrong::new(me, input, members, &[sender], n, budget),
            sender,
            rounds: DolevStrong::rounds(members.len(), budget),
            decision: None,
        }
    }
}

impl Node for BroadcastNode {
    fn send(&mut self, out: &mut Outbox<'_>) -> Result<()> {
        let r = out.round();
        if r <= self.rounds {
            self.core.send(r, out)?;
        }
        Ok(())
    }

    fn receive(&mut self, round: u32, inbox: &[Message], ledger: &Ledger) {
        if round > self.rounds {
            return;
        }
        self.core.receive(round, inbox, ledger);
        if round == self.rounds {
            self.decision = Some(self.core.output(self.sender));
        }
    }

    fn decision(&self) -> Option<Bit> {
        self.decision
    }
}
