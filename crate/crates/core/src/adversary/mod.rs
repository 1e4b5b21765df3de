//! Byzantine strategies.
//!
//! Strategies that "behave like an honest node" do so by literally running
//! protocol instances (personas) inside the adversary; see [`CoverPlan`].
//! Crafted strategies ([`random_noise`](AdversarySpec::RandomNoise),
//! [`equivocate`](AdversarySpec::Equivocate)) build messages directly.

mod cover;
mod equivocate;
mod noise;
pub mod scenarios;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

pub use cover::{CoverAdversary, CoverPlan, Side, Unlisted};
pub use equivocate::Equivocate;
pub use noise::RandomNoise;

use crate::error::Result;
use crate::model::{Bit, Configuration, LocalPrediction, Mode, NodeId, PredictionInput};
use crate::protocols::{ProtocolFactory, ScheduleHint};
use crate::simnet::{Adversary, Silent};

/// Everything an omniscient adversary knows before the run starts.
pub struct AdversaryContext<'a> {
    pub mode: Mode,
    pub config: &'a Configuration,
    /// Prediction of every node (faulty nodes included).
    pub predictions: &'a LocalPrediction,
    pub protocol: &'a dyn ProtocolFactory,
    pub hint: ScheduleHint,
    pub seed: u64,
}

impl AdversaryContext<'_> {
    pub fn n(&self) -> usize {
        self.config.n
    }

    /// Most common honest input, ties to 0.
    pub fn honest_majority(&self) -> Bit {
        let ones = self.config.inputs.values().filter(|b| **b == Bit::One).count();
        Bit::from(2 * ones > self.config.inputs.len())
    }
}

/// Named, parameterized strategy as it appears in scenario files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum AdversarySpec {
    Silent,
    /// Honest behaviour (with `input`, default the complement of the honest
    /// majority) through round `round`, silence afterwards.
    CrashAfter {
        round: u32,
        #[serde(default)]
        input: Option<Bit>,
    },
    RandomNoise,
    /// Personas with `value_to_a` face `a`, personas with `value_to_b` face
    /// `b`. Without explicit sets, honest nodes are split by input, or into
    /// halves by id when the inputs are unanimous.
    SplitBrain {
        #[serde(default)]
        a: Option<Vec<NodeId>>,
        #[serde(default)]
        b: Option<Vec<NodeId>>,
        #[serde(default = "zero")]
        value_to_a: Bit,
        #[serde(default = "one")]
        value_to_b: Bit,
    },
    /// Faulty nodes run the protocol honestly with a spoofed input
    /// (default: complement of the honest majority) and prediction
    /// (default: their own).
    ReplayHonest {
        #[serde(default)]
        spoof_input: Option<Bit>,
        #[serde(default)]
        spoof_prediction: Option<PredictionInput>,
    },
    /// Rushing equivocation: every faulty participant sends opposite values
    /// to the two halves of the honest nodes in every step of the inner
    /// protocol and the decision broadcast.
    Equivocate,
    Cover(CoverPlan),
}

fn zero() -> Bit {
    Bit::Zero
}

fn one() -> Bit {
    Bit::One
}

impl AdversarySpec {
    pub fn name(&self) -> &'static str {
        match self {
            AdversarySpec::Silent => "silent",
            AdversarySpec::CrashAfter { .. } => "crash_after",
            AdversarySpec::RandomNoise => "random_noise",
            AdversarySpec::SplitBrain { .. } => "split_brain",
            AdversarySpec::ReplayHonest { .. } => "replay_honest",
            AdversarySpec::Equivocate => "equivocate",
            AdversarySpec::Cover(_) => "cover",
        }
    }

    /// Looks up a library strategy by name with default parameters.
    pub fn by_name(name: &str) -> Option<AdversarySpec> {
        library().into_iter().find(|s| s.name() == name)
    }

    pub fn build(&self, ctx: &AdversaryContext<'_>) -> Result<Box<dyn Adversary>> {
        let majority = ctx.honest_majority();
        Ok(match self {
            AdversarySpec::Silent => Box::new(Silent),
            AdversarySpec::CrashAfter { round, input } => {
                let mut plan = CoverPlan::replay(input.unwrap_or(majority.flip()), None);
                plan.stop_after = Some(*round);
                Box::new(CoverAdversary::new(&plan, ctx)?)
            }
            AdversarySpec::RandomNoise => Box::new(RandomNoise::new(ctx)),
            AdversarySpec::SplitBrain { a, b, value_to_a, value_to_b } => {
                let plan = CoverPlan::split_brain(ctx.config, a.as_deref(), b.as_deref(), *value_to_a, *value_to_b);
                Box::new(CoverAdversary::new(&plan, ctx)?)
            }
            AdversarySpec::ReplayHonest { spoof_input, spoof_prediction } => {
                let plan = CoverPlan::replay(spoof_input.unwrap_or(majority.flip()), spoof_prediction.clone());
                Box::new(CoverAdversary::new(&plan, ctx)?)
            }
            AdversarySpec::Equivocate => Box::new(Equivocate::new(ctx)),
            AdversarySpec::Cover(plan) => Box::new(CoverAdversary::new(plan, ctx)?),
        })
    }
}

/// The strategies every sweep and suite runs against.
pub fn library() -> Vec<AdversarySpec> {
    vec![
        AdversarySpec::Silent,
        AdversarySpec::CrashAfter { round: 2, input: None },
        AdversarySpec::RandomNoise,
        AdversarySpec::SplitBrain { a: None, b: None, value_to_a: Bit::Zero, value_to_b: Bit::One },
        AdversarySpec::ReplayHonest { spoof_input: None, spoof_prediction: None },
        AdversarySpec::Equivocate,
    ]
}

/// Short hex fingerprint of a strategy list, recorded next to sweep results.
pub fn adversary_set_hash(set: &[AdversarySpec]) -> String {
    let json = serde_json::to_string(set).expect("strategies serialize");
    let digest = Sha256::digest(json.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
