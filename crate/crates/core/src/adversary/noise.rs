use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AdversaryContext;
use crate::error::Result;
use crate::model::{all_nodes, Bit, Mode, NodeId};
use crate::simnet::{Adversary, AdversaryOutbox, Payload, RoundTraffic, SigChain};

/// Every faulty node sends one random well-formed payload to every node in
/// every round. In auth mode relays carry chains signed by faulty nodes only.
pub struct RandomNoise {
    rng: ChaCha8Rng,
    n: usize,
    mode: Mode,
    faulty: Vec<NodeId>,
    max_phase: u32,
}

impl RandomNoise {
    pub fn new(ctx: &AdversaryContext<'_>) -> Self {
        let n = ctx.n();
        RandomNoise {
            rng: ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x6e6f_6973_65),
            n,
            mode: ctx.mode,
            faulty: ctx.config.faulty.iter().copied().collect(),
            max_phase: n as u32 / 3 + 1,
        }
    }

    fn payload(&mut self) -> Payload {
        let value = Bit::from(self.rng.gen::<bool>());
        let phase = self.rng.gen_range(0..=self.max_phase);
        match self.rng.gen_range(0..6) {
            0 => Payload::Echo { value },
            1 => Payload::Vote { phase, value },
            2 => Payload::Propose { phase, value },
            3 => Payload::King { phase, value },
            4 => Payload::Relay { instance: NodeId(self.rng.gen_range(1..=self.n as u32)), value },
            _ => Payload::Decision { value },
        }
    }
}

impl Adversary for RandomNoise {
    fn act(&mut self, _: &RoundTraffic<'_>, out: &mut AdversaryOutbox<'_>) -> Result<()> {
        for j in self.faulty.clone() {
            for to in all_nodes(self.n) {
                let payload = self.payload();
                let mut chain = SigChain::empty();
                if let (Mode::Auth, Payload::Relay { instance, .. }) = (self.mode, payload) {
                    let len = self.rng.gen_range(1..=self.faulty.len().min(3));
                    let mut signers: Vec<NodeId> = self.faulty.choose_multiple(&mut self.rng, len).copied().collect();
                    if self.faulty.contains(&instance) {
                        signers.retain(|s| *s != instance);
                        signers.insert(0, instance);
                        signers.truncate(len);
                    }
                    let digest = payload.digest();
                    chain = signers.iter().map(|s| out.mint(*s, digest)).collect::<Result<SigChain>>()?;
                }
                out.send(j, to, payload, chain)?;
            }
        }
        Ok(())
    }
}
