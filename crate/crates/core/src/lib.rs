//! Byzantine agreement with predictions about which nodes are faulty.
//!
//! The crate contains a synchronous lock-step network simulator with an
//! idealized signature ledger, the Phase King and Dolev-Strong baselines, the
//! prediction wrappers that shrink agreement to a predicted active set, an
//! adversary library, prediction generators, the closed-form resilience
//! curves and the sweep and verification harness built on top of them.

pub mod adversary;
pub mod curves;
pub mod error;
pub mod harness;
pub mod model;
pub mod predba;
pub mod predgen;
pub mod protocols;
pub mod simnet;

pub use adversary::{library, AdversarySpec};
pub use curves::{
    consistency_bound, robustness_bound, theoretical_impossibility, theoretical_smoothness, CurveKind, CurvePoint,
    Impossibility, ResilienceCurve,
};
pub use error::{Error, Result};
pub use harness::{check_outcome, run_scenario, Outcome, Scenario, Verdict, SCHEMA_VERSION};
pub use model::{
    compute_error, compute_local_error, Bit, Configuration, ErrorBreakdown, LocalPrediction, Mode, NodeId, Prediction,
    PredictionInput, TrustParam,
};
pub use predba::{build_active_set, ActiveSet, PredBaNode};
pub use protocols::{Protocol, ProtocolKind};
