//! Prediction-free agreement protocols and the protocol catalogue used by scenarios.

mod dolev_strong;
mod echo;
mod phase_king;

pub use dolev_strong::{BroadcastNode, DolevStrong, DolevStrongBaNode};
pub use echo::EchoNode;
pub use phase_king::{PhaseKing, PhaseKingNode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{all_nodes, Bit, Mode, NodeId, Prediction, TrustParam};
use crate::predba::{build_active_set, PredBaNode};
use crate::simnet::Node;

/// Inner agreement protocol of a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerProtocol {
    PhaseKing,
    DolevStrongBa,
}

/// Round plan of an inner protocol. `fault_budget` is the tolerated count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub protocol: InnerProtocol,
    pub participants: Vec<NodeId>,
    pub fault_budget: usize,
    pub total_rounds: u32,
}

impl ProtocolSchedule {
    pub fn new(protocol: InnerProtocol, participants: Vec<NodeId>, fault_budget: usize) -> Self {
        let total_rounds = match protocol {
            InnerProtocol::PhaseKing => PhaseKing::rounds(participants.len(), fault_budget),
            InnerProtocol::DolevStrongBa => DolevStrong::rounds(participants.len(), fault_budget),
        };
        ProtocolSchedule { protocol, participants, fault_budget, total_rounds }
    }
}

/// What an omniscient adversary can work out about the honest round plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleHint {
    pub inner: Option<ProtocolSchedule>,
    /// Round of the wrappers' decision broadcast.
    pub decision_round: Option<u32>,
}

/// Protocols a scenario can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    PredBa,
    AuthPredBa,
    PhaseKing,
    DolevStrongBa,
    /// Single Dolev-Strong broadcast from `sender` to every node.
    DolevStrongBroadcast { sender: NodeId },
    /// One-round majority echo, for engine tests.
    Echo,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::PredBa => "pred_ba",
            ProtocolKind::AuthPredBa => "auth_pred_ba",
            ProtocolKind::PhaseKing => "phase_king",
            ProtocolKind::DolevStrongBa => "dolev_strong_ba",
            ProtocolKind::DolevStrongBroadcast { .. } => "dolev_strong_broadcast",
            ProtocolKind::Echo => "echo",
        }
    }

    /// Channel model the protocol is built for; `None` runs in either.
    pub fn mode(&self) -> Option<Mode> {
        match self {
            ProtocolKind::PredBa | ProtocolKind::PhaseKing => Some(Mode::NonAuth),
            ProtocolKind::AuthPredBa | ProtocolKind::DolevStrongBa | ProtocolKind::DolevStrongBroadcast { .. } => {
                Some(Mode::Auth)
            }
            ProtocolKind::Echo => None,
        }
    }

    pub fn uses_prediction(&self) -> bool {
        matches!(self, ProtocolKind::PredBa | ProtocolKind::AuthPredBa)
    }

    /// The wrapper protocol of a channel model.
    pub fn wrapper(mode: Mode) -> Self {
        match mode {
            Mode::NonAuth => ProtocolKind::PredBa,
            Mode::Auth => ProtocolKind::AuthPredBa,
        }
    }
}

/// Creates node state machines for one run.
pub trait ProtocolFactory: Send + Sync {
    fn instantiate(&self, id: NodeId, input: Bit, prediction: &Prediction) -> Result<Box<dyn Node>>;

    /// Round plan as derived from `prediction`.
    fn schedule_hint(&self, prediction: &Prediction) -> Result<ScheduleHint>;
}

/// A [`ProtocolKind`] bound to the run parameters.
#[derive(Clone, Debug)]
pub struct Protocol {
    pub kind: ProtocolKind,
    pub n: usize,
    pub alpha: Option<TrustParam>,
    /// Tolerated faults of the prediction-free protocols; defaults to their maximum.
    pub fault_budget: Option<usize>,
}

impl Protocol {
    pub fn new(kind: ProtocolKind, n: usize, alpha: Option<TrustParam>, fault_budget: Option<usize>) -> Result<Self> {
        if let (Some(mode), true) = (kind.mode(), kind.uses_prediction()) {
            match alpha {
                Some(a) => {
                    a.check(mode)?;
                }
                None => return Err(Error::InvalidScenario(format!("{} needs alpha", kind.name()))),
            }
        }
        if let ProtocolKind::DolevStrongBroadcast { sender } = kind {
            if sender.0 == 0 || sender.index() > n {
                return Err(Error::NodeOutOfRange(sender, n));
            }
        }
        let protocol = Protocol { kind, n, alpha, fault_budget };
        if let Some(b) = fault_budget {
            if b >= n.max(1) {
                return Err(Error::InvalidScenario(format!("fault budget {b} must be below n = {n}")));
            }
        }
        Ok(protocol)
    }

    /// Default budget of a stand-alone protocol over all `n` nodes.
    pub fn budget(&self) -> usize {
        let n = self.n;
        self.fault_budget.unwrap_or(match self.kind {
            ProtocolKind::PhaseKing => n.div_ceil(3).saturating_sub(1),
            ProtocolKind::DolevStrongBa => n.div_ceil(2).saturating_sub(1),
            _ => n.saturating_sub(1),
        })
    }

    fn everyone(&self) -> Vec<NodeId> {
        all_nodes(self.n).collect()
    }
}

impl ProtocolFactory for Protocol {
    fn instantiate(&self, id: NodeId, input: Bit, prediction: &Prediction) -> Result<Box<dyn Node>> {
        let n = self.n;
        Ok(match self.kind {
            ProtocolKind::PredBa | ProtocolKind::AuthPredBa => {
                let mode = self.kind.mode().expect("wrappers have a mode");
                let alpha = self.alpha.expect("checked in Protocol::new");
                Box::new(PredBaNode::new(id, input, prediction, alpha, n, mode)?)
            }
            ProtocolKind::PhaseKing => Box::new(PhaseKingNode::new(id, input, &self.everyone(), n, self.budget())),
            ProtocolKind::DolevStrongBa => {
                Box::new(DolevStrongBaNode::new(id, input, &self.everyone(), n, self.budget()))
            }
            ProtocolKind::DolevStrongBroadcast { sender } => {
                Box::new(BroadcastNode::new(id, input, sender, &self.everyone(), n, self.budget()))
            }
            ProtocolKind::Echo => Box::new(EchoNode::new(id, input)),
        })
    }

    fn schedule_hint(&self, prediction: &Prediction) -> Result<ScheduleHint> {
        Ok(match self.kind {
            ProtocolKind::PredBa | ProtocolKind::AuthPredBa => {
                let mode = self.kind.mode().expect("wrappers have a mode");
                let alpha = self.alpha.expect("checked in Protocol::new");
                let set = build_active_set(prediction, alpha, self.n, mode)?;
                let inner = set.schedule();
                let decision_round = Some(inner.total_rounds + 1);
                ScheduleHint { inner: Some(inner), decision_round }
            }
            ProtocolKind::PhaseKing => ScheduleHint {
                inner: Some(ProtocolSchedule::new(InnerProtocol::PhaseKing, self.everyone(), self.budget())),
                decision_round: None,
            },
            ProtocolKind::DolevStrongBa | ProtocolKind::DolevStrongBroadcast { .. } => ScheduleHint {
                inner: Some(ProtocolSchedule::new(InnerProtocol::DolevStrongBa, self.everyone(), self.budget())),
                decision_round: None,
            },
            ProtocolKind::Echo => ScheduleHint { inner: None, decision_round: Some(1) },
        })
    }
}
