use crate::error::Result;
use crate::model::{all_nodes, Bit, NodeId};
use crate::simnet::{Ledger, Message, Node, Outbox, Payload};

/// One-round smoke-test protocol: everyone broadcasts its input and decides
/// the majority of what it heard, ties to 0.
pub struct EchoNode {
    input: Bit,
    decision: Option<Bit>,
}

impl EchoNode {
    pub fn new(_me: NodeId, input: Bit) -> Self {
        EchoNode { input, decision: None }
    }
}

impl Node for EchoNode {
    fn send(&mut self, out: &mut Outbox<'_>) -> Result<()> {
        if out.round() == 1 {
            for to in all_nodes(out.n()) {
                out.send(to, Payload::Echo { value: self.input });
            }
        }
        Ok(())
    }

    fn receive(&mut self, round: u32, inbox: &[Message], _: &Ledger) {
        if round != 1 {
            return;
        }
        let mut counts = [0usize; 2];
        let mut last = None;
        for msg in inbox {
            if let Payload::Echo { value } = msg.payload {
                if last != Some(msg.sender) {
                    counts[value.index()] += 1;
                    last = Some(msg.sender);
                }
            }
        }
        self.decision = Some(Bit::from(counts[1] > counts[0]));
    }

    fn decision(&self) -> Option<Bit> {
        self.decision
    }
}
