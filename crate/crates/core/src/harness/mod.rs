//! Scenarios, correctness checking, sweeps and the verification suites.

pub mod sampling;
pub mod suites;
pub mod sweep;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::adversary::{AdversaryContext, AdversarySpec};
use crate::error::{Error, Result};
use crate::model::{Bit, Configuration, LocalPrediction, Mode, NodeId, Prediction, PredictionInput, TrustParam};
use crate::protocols::{Protocol, ProtocolFactory, ProtocolKind};
use crate::simnet::{self, Adversary, Ledger, Node, RunOptions, SimResult, Transcript};

/// Version of the scenario, outcome and transcript file formats.
pub const SCHEMA_VERSION: u32 = 1;

/// Complete description of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub protocol: ProtocolKind,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<TrustParam>,
    pub config: Configuration,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<PredictionInput>,
    #[serde(default = "silent")]
    pub adversary: AdversarySpec,
    #[serde(default)]
    pub seed: u64,
    /// Tolerated faults of a prediction-free protocol; defaults to its maximum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_budget: Option<usize>,
    /// Defaults to `4 (n + 2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_budget: Option<u32>,
}

fn silent() -> AdversarySpec {
    AdversarySpec::Silent
}

impl Scenario {
    /// A run of the mode's wrapper with a global prediction.
    pub fn wrapper(
        mode: Mode,
        alpha: TrustParam,
        config: Configuration,
        prediction: Prediction,
        adversary: AdversarySpec,
        seed: u64,
    ) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            protocol: ProtocolKind::wrapper(mode),
            mode,
            alpha: Some(alpha),
            config,
            prediction: Some(PredictionInput::Global(prediction)),
            adversary,
            seed,
            fault_budget: None,
            round_budget: None,
        }
    }

    /// A run of a prediction-free protocol.
    pub fn baseline(protocol: ProtocolKind, mode: Mode, config: Configuration, adversary: AdversarySpec, seed: u64) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            protocol,
            mode,
            alpha: None,
            config,
            prediction: None,
            adversary,
            seed,
            fault_budget: None,
            round_budget: None,
        }
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidScenario(m));
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!("schema_version {} is not supported", self.schema_version));
        }
        self.config.validate()?;
        if let Some(mode) = self.protocol.mode() {
            if mode != self.mode {
                return invalid(format!("{} runs in {mode} mode, scenario says {}", self.protocol.name(), self.mode));
            }
        }
        if let Some(p) = &self.prediction {
            p.validate(self.n())?;
        }
        if self.protocol.uses_prediction() {
            if self.prediction.is_none() {
                return invalid(format!("{} needs a prediction", self.protocol.name()));
            }
            match self.alpha {
                Some(a) => {
                    a.check(self.mode)?;
                }
                None => return invalid(format!("{} needs alpha", self.protocol.name())),
            }
        }
        self.protocol_factory().map(|_| ())
    }

    pub fn protocol_factory(&self) -> Result<Protocol> {
        Protocol::new(self.protocol, self.n(), self.alpha, self.fault_budget)
    }

    /// Prediction of every node; empty sets when the scenario has none.
    pub fn predictions(&self) -> LocalPrediction {
        match &self.prediction {
            Some(p) => p.expand(self.n()),
            None => LocalPrediction::constant(&Prediction::default(), self.n()),
        }
    }

    pub fn options(&self) -> RunOptions {
        let mut options = RunOptions::for_n(self.n());
        if let Some(b) = self.round_budget {
            options.round_budget = b;
        }
        options
    }
}

/// Decisions of the honest nodes plus the three correctness flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub decisions: BTreeMap<NodeId, Bit>,
    pub decided_round: u32,
    pub agreement: bool,
    pub validity: bool,
    pub termination: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub agreement: bool,
    pub validity: bool,
    pub termination: bool,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.agreement && self.validity && self.termination
    }
}

/// Termination, agreement and validity of `outcome`, judged from its decisions alone.
pub fn check_outcome(scenario: &Scenario, outcome: &Outcome) -> Verdict {
    let honest_inputs: BTreeSet<Bit> = scenario.config.inputs.values().copied().collect();
    let decided: Vec<Bit> = scenario.config.honest().filter_map(|i| outcome.decisions.get(&i).copied()).collect();
    Verdict {
        termination: decided.len() == scenario.n() - scenario.config.f(),
        agreement: decided.windows(2).all(|w| w[0] == w[1]),
        validity: decided.iter().all(|d| honest_inputs.contains(d)),
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    /// Round in which each honest node decided.
    pub decided_at: BTreeMap<NodeId, u32>,
    pub transcripts: Option<Vec<Transcript>>,
    pub ledger: Ledger,
}

/// Drives the simulator with honest nodes from `protocol` and the given adversary.
pub fn run_simulation(
    scenario: &Scenario,
    protocol: &dyn ProtocolFactory,
    adversary: &mut dyn Adversary,
    options: RunOptions,
) -> Result<SimResult> {
    let predictions = scenario.predictions();
    let mut nodes: BTreeMap<NodeId, Box<dyn Node>> = BTreeMap::new();
    for (&id, &input) in &scenario.config.inputs {
        nodes.insert(id, protocol.instantiate(id, input, predictions.of(id))?);
    }
    simnet::run(scenario.n(), nodes, adversary, options)
}

/// Builds the scenario's adversary.
pub fn build_adversary(scenario: &Scenario, protocol: &dyn ProtocolFactory) -> Result<Box<dyn Adversary>> {
    let predictions = scenario.predictions();
    let viewpoint = scenario.config.honest().next().unwrap_or(NodeId(1));
    let hint = if scenario.n() == 0 {
        crate::protocols::ScheduleHint { inner: None, decision_round: None }
    } else {
        protocol.schedule_hint(predictions.of(viewpoint))?
    };
    let ctx = AdversaryContext {
        mode: scenario.mode,
        config: &scenario.config,
        predictions: &predictions,
        protocol,
        hint,
        seed: scenario.seed,
    };
    scenario.adversary.build(&ctx)
}

/// Validates and runs a scenario. Exceeding the round budget yields an
/// outcome without termination rather than an error.
pub fn run_scenario(scenario: &Scenario, record_transcripts: bool) -> Result<RunReport> {
    scenario.validate()?;
    let protocol = scenario.protocol_factory()?;
    let mut adversary = build_adversary(scenario, &protocol)?;
    let mut options = scenario.options();
    options.record_transcripts = record_transcripts;
    match run_simulation(scenario, &protocol, adversary.as_mut(), options) {
        Ok(sim) => {
            let mut outcome = Outcome {
                decisions: sim.decisions,
                decided_round: sim.decided_round,
                agreement: false,
                validity: false,
                termination: false,
            };
            let v = check_outcome(scenario, &outcome);
            (outcome.agreement, outcome.validity, outcome.termination) = (v.agreement, v.validity, v.termination);
            Ok(RunReport { outcome, decided_at: sim.decided_at, transcripts: sim.transcripts, ledger: sim.ledger })
        }
        Err(Error::RoundBudgetExceeded(budget)) => Ok(RunReport {
            outcome: Outcome {
                decisions: BTreeMap::new(),
                decided_round: budget,
                agreement: true,
                validity: true,
                termination: false,
            },
            decided_at: BTreeMap::new(),
            transcripts: None,
            ledger: Ledger::new(),
        }),
        Err(e) => Err(e),
    }
}

/// Runs the scenario and returns only its verdict.
pub fn verdict(scenario: &Scenario) -> Result<Verdict> {
    let report = run_scenario(scenario, false)?;
    Ok(check_outcome(scenario, &report.outcome))
}
