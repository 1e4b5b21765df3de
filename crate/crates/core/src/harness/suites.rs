//! Verification suites.
//!
//! Every suite runs a batch of scenarios and reports named assertions. The
//! adversary library plus the sampled seeds is the whole test universe, so a
//! passing suite is evidence, not proof.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{derive_seed, sample_config, InputPattern, Placement};
use super::sweep::{check_cell, sweep, SweepParams};
use super::{run_scenario, RunReport, Scenario, Verdict};
use crate::adversary::scenarios::{build_impossibility_scenarios, Family, Theorem};
use crate::adversary::{library, AdversarySpec};
use crate::curves::{consistency_bound, robustness_bound, theoretical_smoothness};
use crate::error::{Error, Result};
use crate::model::{Bit, Configuration, Mode, NodeId, Prediction, PredictionInput, TrustParam};
use crate::predgen::{perfect, random_subset};
use crate::protocols::ProtocolKind;
use crate::simnet::{Ledger, Minter, Transcript};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub runs: usize,
    pub assertions: Vec<Assertion>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport { suite: suite.into(), runs: 0, assertions: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.runs += other.runs;
        self.assertions.extend(other.assertions);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Consistency,
    Robustness,
    Smoothness,
    Impossibility,
    Local,
    Protocols,
    Replay,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Consistency,
        Suite::Robustness,
        Suite::Smoothness,
        Suite::Impossibility,
        Suite::Local,
        Suite::Protocols,
        Suite::Replay,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("suite names serialize");
        f.write_str(s.as_str().expect("unit variants serialize as strings"))
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown suite {s:?}")))
    }
}

/// Result of one run as the suites see it.
struct Checked {
    verdict: Verdict,
    forged: bool,
}

/// True when the ledger holds a signature of an honest node that the adversary asked for.
pub fn honest_forgery(ledger: &Ledger, config: &Configuration) -> bool {
    ledger.entries().any(|(signer, _, minter)| minter == Minter::Adversary && !config.is_faulty(signer))
}

fn execute(scenario: &Scenario) -> Result<Checked> {
    match run_scenario(scenario, false) {
        Ok(report) => Ok(Checked {
            verdict: Verdict {
                agreement: report.outcome.agreement,
                validity: report.outcome.validity,
                termination: report.outcome.termination,
            },
            forged: honest_forgery(&report.ledger, &scenario.config),
        }),
        Err(Error::Forgery(_)) => Ok(Checked {
            verdict: Verdict { agreement: true, validity: true, termination: true },
            forged: true,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Default)]
struct Tally {
    runs: usize,
    violations: usize,
    forgeries: usize,
    first: Option<String>,
}

impl Tally {
    fn detail(&self) -> String {
        let mut s = format!("{} runs, {} violations", self.runs, self.violations);
        if self.forgeries > 0 {
            s.push_str(&format!(", {} forgeries", self.forgeries));
        }
        if let Some(first) = &self.first {
            s.push_str(&format!("; first: {first}"));
        }
        s
    }
}

fn describe(scenario: &Scenario, v: &Verdict) -> String {
    let faulty: Vec<u32> = scenario.config.faulty.iter().map(|i| i.0).collect();
    format!(
        "{} seed={} faulty={faulty:?} agreement={} validity={} termination={}",
        scenario.adversary.name(),
        scenario.seed,
        v.agreement,
        v.validity,
        v.termination
    )
}

/// Runs the batch; `judge` decides whether a run counts as a violation.
fn tally(scenarios: &[Scenario], judge: &(dyn Fn(&Scenario, &Verdict) -> bool + Sync)) -> Result<Tally> {
    let results: Vec<(usize, Checked)> = scenarios
        .par_iter()
        .enumerate()
        .map(|(k, s)| execute(s).map(|c| (k, c)))
        .collect::<Result<_>>()?;
    let mut t = Tally { runs: scenarios.len(), ..Tally::default() };
    for (k, c) in results {
        let bad = !judge(&scenarios[k], &c.verdict);
        if bad {
            t.violations += 1;
            if t.first.is_none() {
                t.first = Some(describe(&scenarios[k], &c.verdict));
            }
        }
        if c.forged {
            t.forgeries += 1;
        }
    }
    Ok(t)
}

fn all_ok(_: &Scenario, v: &Verdict) -> bool {
    v.ok()
}

/// Scenarios over every input pattern and `trials` seeds; placements cycle with the trial index.
fn trial_matrix(
    p: &SweepParams,
    tag: u64,
    f: usize,
    adversary_index: usize,
    make: &dyn Fn(Configuration, u64) -> Result<Scenario>,
) -> Result<Vec<Scenario>> {
    let mut out = Vec::with_capacity(InputPattern::ALL.len() * p.trials);
    for (pi, pattern) in InputPattern::ALL.into_iter().enumerate() {
        for trial in 0..p.trials {
            let seed = derive_seed(p.seed, &[tag, f as u64, pi as u64, adversary_index as u64, trial as u64]);
            let config = sample_config(p.n, f, Placement::for_trial(trial), pattern, seed)?;
            out.push(make(config, seed)?);
        }
    }
    Ok(out)
}

/// Perfect predictions at `f` equal to the consistency bound.
pub fn consistency_suite(p: &SweepParams) -> Result<SuiteReport> {
    let f = consistency_bound(p.mode, p.alpha, p.n)?;
    let mut report = SuiteReport::new("consistency");
    for (ai, adv) in p.adversaries.iter().enumerate() {
        let batch = trial_matrix(p, 1, f, ai, &|config, seed| {
            let pred = perfect(&config);
            Ok(Scenario::wrapper(p.mode, p.alpha, config, pred, adv.clone(), seed))
        })?;
        let t = tally(&batch, &all_ok)?;
        report.runs += t.runs;
        report.check(
            format!("consistency {} alpha={} n={} f={f} {}", p.mode, p.alpha, p.n, adv.name()),
            t.violations == 0 && t.forgeries == 0,
            t.detail(),
        );
    }
    Ok(report)
}

/// Adversarial and uninformative predictions used by the robustness suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessPrediction {
    Faulty,
    Empty,
    Everyone,
    Random,
}

impl RobustnessPrediction {
    pub const ALL: [RobustnessPrediction; 4] = [
        RobustnessPrediction::Faulty,
        RobustnessPrediction::Empty,
        RobustnessPrediction::Everyone,
        RobustnessPrediction::Random,
    ];

    pub fn build(self, config: &Configuration, seed: u64) -> Prediction {
        match self {
            RobustnessPrediction::Faulty => Prediction::new(config.faulty.iter().copied()),
            RobustnessPrediction::Empty => Prediction::default(),
            RobustnessPrediction::Everyone => Prediction::new((1..=config.n as u32).map(NodeId)),
            RobustnessPrediction::Random => random_subset(config.n, seed),
        }
    }
}

pub fn robustness_suite(p: &SweepParams) -> Result<SuiteReport> {
    let f = robustness_bound(p.mode, p.alpha, p.n)?;
    let mut report = SuiteReport::new("robustness");
    for (ki, kind) in RobustnessPrediction::ALL.into_iter().enumerate() {
        for (ai, adv) in p.adversaries.iter().enumerate() {
            let batch = trial_matrix(p, 2 + ki as u64 * 16, f, ai, &|config, seed| {
                let pred = kind.build(&config, seed);
                Ok(Scenario::wrapper(p.mode, p.alpha, config, pred, adv.clone(), seed))
            })?;
            let t = tally(&batch, &all_ok)?;
            report.runs += t.runs;
            report.check(
                format!("robustness {} alpha={} n={} f={f} prediction={kind:?} {}", p.mode, p.alpha, p.n, adv.name()),
                t.violations == 0 && t.forgeries == 0,
                t.detail(),
            );
        }
    }
    Ok(report)
}

/// Zero violations at `f = s(eta)` for every `eta`, then, when
/// `sweep_trials` is given, an empirical sweep that must stay on or above
/// the guaranteed curve.
pub fn smoothness_suite(p: &SweepParams, sweep_trials: Option<usize>) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("smoothness");
    let etas: Vec<usize> = (0..=p.n).collect();
    let cells: Vec<(usize, usize, Option<super::sweep::FailureWitness>)> = etas
        .par_iter()
        .map(|&eta| {
            let f = theoretical_smoothness(p.mode, p.alpha, p.n, eta)?;
            Ok((eta, f, check_cell(p, eta, f)?))
        })
        .collect::<Result<_>>()?;
    let per_cell = 3 * p.adversaries.len() * p.trials;
    for (eta, f, witness) in cells {
        report.runs += per_cell;
        let detail = match &witness {
            None => format!("up to {per_cell} runs, 0 violations"),
            Some(w) => format!(
                "violation: {} split={:?} trial={} placement={:?} pattern={:?} seed={} {:?}",
                w.adversary, w.split, w.trial, w.placement, w.pattern, w.seed, w.verdict
            ),
        };
        report.check(format!("smoothness {} alpha={} n={} eta={eta} f={f}", p.mode, p.alpha, p.n), witness.is_none(), detail);
    }
    if let Some(trials) = sweep_trials {
        let params = SweepParams { trials, ..p.clone() };
        let result = sweep(&params, &etas)?;
        let below: Vec<String> =
            result.below_theory().iter().map(|r| format!("eta={} empirical={} s={}", r.eta, r.empirical_f, r.theory_s)).collect();
        report.check(
            format!("empirical curve >= s {} alpha={} n={} trials={trials}", p.mode, p.alpha, p.n),
            below.is_empty(),
            if below.is_empty() { "pointwise at or above".to_string() } else { below.join("; ") },
        );
    }
    Ok(report)
}

/// One configuration of an impossibility family after running it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub label: String,
    pub eta: usize,
    pub f: usize,
    /// Guaranteed resilience at `eta`; absent for local predictions.
    pub theory_s: Option<usize>,
    pub verdict: Verdict,
}

impl ConfigResult {
    pub fn within_curve(&self) -> Option<bool> {
        self.theory_s.map(|s| self.f <= s)
    }
}

pub fn run_family(family: &Family) -> Result<Vec<ConfigResult>> {
    family
        .members
        .iter()
        .map(|m| {
            let c = execute(&m.scenario)?;
            let theory_s = match (&m.scenario.prediction, m.scenario.protocol.uses_prediction()) {
                (Some(PredictionInput::Global(_)), true) => {
                    Some(theoretical_smoothness(m.scenario.mode, family.alpha, family.n, m.eta)?)
                }
                _ => None,
            };
            Ok(ConfigResult { label: m.label.clone(), eta: m.eta, f: m.f, theory_s, verdict: c.verdict })
        })
        .collect()
}

fn failure_text(r: &ConfigResult) -> String {
    let mut broken = Vec::new();
    if !r.verdict.agreement {
        broken.push("agreement");
    }
    if !r.verdict.validity {
        broken.push("validity");
    }
    if !r.verdict.termination {
        broken.push("termination");
    }
    format!("{} (eta={}, f={}) violates {}", r.label, r.eta, r.f, broken.join("+"))
}

/// Runs a family and asserts that some configuration fails while every
/// configuration inside the guaranteed curve succeeds.
pub fn check_family(family: &Family, report: &mut SuiteReport) -> Result<Vec<ConfigResult>> {
    let results = run_family(family)?;
    report.runs += results.len();
    let protocol = family.members.first().map(|m| m.scenario.protocol.name()).unwrap_or("-");
    let tag = format!("{} {protocol} alpha={} n={}", family.theorem, family.alpha, family.n);
    let failing: Vec<String> = results.iter().filter(|r| !r.verdict.ok()).map(failure_text).collect();
    report.check(
        format!("{tag}: some configuration fails"),
        !failing.is_empty(),
        if failing.is_empty() { "all configurations succeeded".to_string() } else { failing.join("; ") },
    );
    let inside: Vec<&ConfigResult> = results.iter().filter(|r| r.within_curve() == Some(true)).collect();
    if !inside.is_empty() {
        let broken: Vec<String> = inside.iter().filter(|r| !r.verdict.ok()).map(|r| failure_text(r)).collect();
        report.check(
            format!("{tag}: configurations within the curve succeed"),
            broken.is_empty(),
            if broken.is_empty() {
                inside.iter().map(|r| format!("{} (eta={}, f={} <= {})", r.label, r.eta, r.f, r.theory_s.unwrap_or(0))).collect::<Vec<_>>().join("; ")
            } else {
                broken.join("; ")
            },
        );
    }
    Ok(results)
}

/// One impossibility family to run: theorem, alpha, n and optional error parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyPoint {
    pub theorem: Theorem,
    pub alpha: (i64, i64),
    pub n: usize,
    pub eta: Option<usize>,
}

impl FamilyPoint {
    pub fn alpha(&self) -> TrustParam {
        TrustParam::from_fraction(self.alpha.0, self.alpha.1).expect("default points use valid alphas")
    }
}

/// Feasible grid points at which every family is exercised by default.
pub fn default_family_points() -> Vec<FamilyPoint> {
    let p = |theorem, alpha, n, eta| FamilyPoint { theorem, alpha, n, eta };
    vec![
        p(Theorem::T41, (4, 5), 20, None),
        p(Theorem::T42p1, (4, 5), 25, Some(2)),
        p(Theorem::T42p2, (4, 5), 15, Some(5)),
        p(Theorem::T42p3, (4, 5), 40, None),
        p(Theorem::TC3, (3, 4), 16, None),
        p(Theorem::TC4p1, (3, 4), 16, Some(2)),
        p(Theorem::TC4p2, (3, 4), 16, Some(10)),
        p(Theorem::T52, (1, 2), 8, None),
    ]
}

pub fn impossibility_suite(theorem: Theorem, alpha: TrustParam, n: usize, eta: Option<usize>) -> Result<SuiteReport> {
    let family = build_impossibility_scenarios(theorem, alpha, n, eta)?;
    let mut report = SuiteReport::new("impossibility");
    check_family(&family, &mut report)?;
    Ok(report)
}

/// Every protocol the simulator implements.
pub fn all_protocols() -> Vec<ProtocolKind> {
    vec![
        ProtocolKind::PredBa,
        ProtocolKind::AuthPredBa,
        ProtocolKind::PhaseKing,
        ProtocolKind::DolevStrongBa,
        ProtocolKind::DolevStrongBroadcast { sender: NodeId(1) },
        ProtocolKind::Echo,
    ]
}

/// Local predictions: both wrappers fail on some configuration of the
/// family, and every protocol sees identical views across it.
pub fn local_suite(n: usize) -> Result<SuiteReport> {
    let alpha = TrustParam::from_fraction(1, 2)?;
    let family = build_impossibility_scenarios(Theorem::T52, alpha, n, None)?;
    let mut report = SuiteReport::new("local");
    for protocol in [ProtocolKind::PredBa, ProtocolKind::AuthPredBa] {
        check_family(&family.clone().with_protocol(protocol), &mut report)?;
    }
    for protocol in all_protocols() {
        local_indistinguishability(&family, protocol, &mut report)?;
    }
    Ok(report)
}

fn record(scenario: &Scenario) -> Result<RunReport> {
    run_scenario(scenario, true)
}

/// The rounds node `id` received, up to `last`.
fn view(t: &Transcript, last: usize) -> String {
    let rounds: Vec<_> = t.rounds.iter().take(last).map(|r| &r.received).collect();
    serde_json::to_string(&rounds).expect("transcripts serialize")
}

/// Compares what each node of `group` received in two runs. Views are
/// compared over the rounds both runs executed, which must cover the
/// decision of the node in both.
pub fn compare_views(first: &RunReport, second: &RunReport, group: &[NodeId]) -> std::result::Result<usize, String> {
    let by_node = |r: &RunReport| -> BTreeMap<NodeId, Transcript> {
        r.transcripts.iter().flatten().map(|t| (t.node, t.clone())).collect()
    };
    let (a, b) = (by_node(first), by_node(second));
    let mut bytes = 0;
    for id in group {
        let (Some(ta), Some(tb)) = (a.get(id), b.get(id)) else {
            return Err(format!("no transcript for node {id}"));
        };
        let common = ta.rounds.len().min(tb.rounds.len());
        let decided = first.decided_at.get(id).max(second.decided_at.get(id)).copied().unwrap_or(0) as usize;
        if decided == 0 || common < decided {
            return Err(format!("node {id}: runs end before its decision"));
        }
        let (va, vb) = (view(ta, common), view(tb, common));
        if va != vb {
            let round = ta.rounds.iter().zip(&tb.rounds).position(|(x, y)| x.received != y.received).map_or(0, |k| k + 1);
            return Err(format!("node {id} first differs in round {round}"));
        }
        bytes += va.len();
    }
    Ok(bytes)
}

fn compare_members(family: &Family, x: &str, y: &str, group: &str, protocol: ProtocolKind, report: &mut SuiteReport) -> Result<()> {
    let (Some(mx), Some(my)) = (family.member(x), family.member(y)) else {
        return Err(Error::InvalidScenario(format!("family {} lacks {x} or {y}", family.theorem)));
    };
    let (rx, ry) = (record(&mx.scenario)?, record(&my.scenario)?);
    report.runs += 2;
    let result = compare_views(&rx, &ry, &mx.groups[group]);
    report.check(
        format!("{} {}: {group} cannot tell {x} from {y}", family.theorem, protocol.name()),
        result.is_ok(),
        match result {
            Ok(bytes) => format!("{bytes} bytes identical"),
            Err(e) => e,
        },
    );
    Ok(())
}

fn local_indistinguishability(family: &Family, protocol: ProtocolKind, report: &mut SuiteReport) -> Result<()> {
    let family = family.clone().with_protocol(protocol);
    compare_members(&family, "config 1", "config 3", "A", protocol, report)?;
    compare_members(&family, "config 2", "config 3", "B", protocol, report)
}

/// Honest-side views coincide across the configurations of the local and
/// the robustness families, and a truthful replay is invisible.
pub fn replay_suite(alpha: TrustParam, n: usize, local_n: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("replay");
    let local = build_impossibility_scenarios(Theorem::T52, TrustParam::from_fraction(1, 2)?, local_n, None)?;
    let split = build_impossibility_scenarios(Theorem::T41, alpha, n, None)?;
    for protocol in all_protocols() {
        local_indistinguishability(&local, protocol, &mut report)?;
        if protocol.mode() != Some(Mode::Auth) && !matches!(protocol, ProtocolKind::DolevStrongBroadcast { .. }) {
            let family = split.clone().with_protocol(protocol);
            compare_members(&family, "config 1", "config 2", "A", protocol, &mut report)?;
            compare_members(&family, "config 1", "config 3", "B", protocol, &mut report)?;
        }
        truthful_replay(protocol, alpha, n, seed, &mut report)?;
    }
    Ok(report)
}

fn protocol_mode(protocol: ProtocolKind) -> Mode {
    match protocol {
        ProtocolKind::DolevStrongBa | ProtocolKind::DolevStrongBroadcast { .. } => Mode::Auth,
        p => p.mode().unwrap_or(Mode::NonAuth),
    }
}

/// Faulty nodes replaying their true input leave every honest view unchanged.
fn truthful_replay(protocol: ProtocolKind, alpha: TrustParam, n: usize, seed: u64, report: &mut SuiteReport) -> Result<()> {
    let mode = protocol_mode(protocol);
    let f = n / 4;
    let faulty: Vec<NodeId> = (n - f + 1..=n).map(|i| NodeId(i as u32)).collect();
    let input = |i: NodeId| Bit::from(i.index() > n / 2);
    let honest_run = Configuration::with_inputs(n, [], input)?;
    let replay_run = Configuration::with_inputs(n, faulty.iter().copied(), input)?;
    let prediction = Prediction::new((1..=n as u32).map(NodeId));
    let make = |config: Configuration, adversary: AdversarySpec| {
        let mut s = if protocol.uses_prediction() {
            Scenario::wrapper(mode, alpha, config, prediction.clone(), adversary, seed)
        } else {
            Scenario::baseline(protocol, mode, config, adversary, seed)
        };
        s.protocol = protocol;
        s
    };
    let a = record(&make(honest_run.clone(), AdversarySpec::Silent))?;
    let b = record(&make(replay_run.clone(), AdversarySpec::ReplayHonest { spoof_input: Some(Bit::One), spoof_prediction: None }))?;
    report.runs += 2;
    let honest: Vec<NodeId> = replay_run.honest().collect();
    let result = compare_views(&a, &b, &honest);
    report.check(
        format!("truthful replay {} n={n} f={f}: honest views unchanged", protocol.name()),
        result.is_ok(),
        match result {
            Ok(bytes) => format!("{bytes} bytes identical"),
            Err(e) => e,
        },
    );
    Ok(())
}

/// Stand-alone baselines inside their fault bounds, plus signature hygiene.
pub fn protocols_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("protocols");
    let lib = library();

    // Phase King, four nodes, one fault: every faulty position and honest input vector.
    let mut batch = Vec::new();
    for bad in 1..=4u32 {
        for vector in 0..8u32 {
            let config = Configuration::with_inputs(4, [NodeId(bad)], |i| {
                let k = if i.0 < bad { i.0 - 1 } else { i.0 - 2 };
                Bit::from(vector >> k & 1 == 1)
            })?;
            for (ai, adv) in lib.iter().enumerate() {
                for trial in 0..trials {
                    let s = derive_seed(seed, &[10, bad as u64, vector as u64, ai as u64, trial as u64]);
                    let mut sc = Scenario::baseline(ProtocolKind::PhaseKing, Mode::NonAuth, config.clone(), adv.clone(), s);
                    sc.fault_budget = Some(1);
                    batch.push(sc);
                }
            }
        }
    }
    let t = tally(&batch, &all_ok)?;
    report.runs += t.runs;
    report.check("phase king m=4 t=1 exhaustive inputs", t.violations == 0, t.detail());

    let mut forgeries = 0;
    for (protocol, mode, m, budget) in [
        (ProtocolKind::PhaseKing, Mode::NonAuth, 7, 2),
        (ProtocolKind::DolevStrongBa, Mode::Auth, 4, 1),
        (ProtocolKind::DolevStrongBa, Mode::Auth, 7, 3),
    ] {
        let batch = baseline_batch(protocol, mode, m, budget, None, &lib, trials, seed)?;
        let t = tally(&batch, &all_ok)?;
        report.runs += t.runs;
        forgeries += t.forgeries;
        report.check(format!("{} m={m} t={budget}", protocol.name()), t.violations == 0, t.detail());
    }

    // Broadcast: any t <= m - 2, faulty sender or not.
    let sender = NodeId(1);
    for m in [4usize, 7] {
        for budget in 1..=m - 2 {
            for sender_faulty in [true, false] {
                let faulty: Vec<NodeId> = if sender_faulty {
                    (1..=budget as u32).map(NodeId).collect()
                } else {
                    (2..=budget as u32 + 1).map(NodeId).collect()
                };
                let protocol = ProtocolKind::DolevStrongBroadcast { sender };
                let batch = baseline_batch(protocol, Mode::Auth, m, budget, Some(&faulty), &lib, trials, seed)?;
                let t = broadcast_tally(&batch)?;
                report.runs += t.runs;
                forgeries += t.forgeries;
                report.check(
                    format!("dolev_strong_broadcast m={m} t={budget} sender {}", if sender_faulty { "faulty" } else { "honest" }),
                    t.violations == 0,
                    t.detail(),
                );
            }
        }
    }
    report.check("no honest signature minted by the adversary", forgeries == 0, format!("{forgeries} forged runs"));

    let mut probe = Ledger::new();
    let attempt = probe.mint(NodeId(1), crate::simnet::Digest(7), Minter::Adversary, false);
    report.check(
        "ledger refuses adversary signatures for honest nodes",
        matches!(attempt, Err(Error::Forgery(_))) && probe.is_empty(),
        format!("{attempt:?}"),
    );
    Ok(report)
}

/// Agreement and termination, plus: with an honest sender every honest node decides its input.
/// Validity in the agreement sense does not apply to broadcast.
fn broadcast_tally(scenarios: &[Scenario]) -> Result<Tally> {
    let sender = NodeId(1);
    let results: Vec<(usize, Verdict, bool, bool)> = scenarios
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let report = run_scenario(s, false)?;
            let v = Verdict {
                agreement: report.outcome.agreement,
                validity: report.outcome.validity,
                termination: report.outcome.termination,
            };
            let delivered = match s.config.input(sender) {
                Some(b) => report.outcome.decisions.values().all(|d| *d == b),
                None => true,
            };
            Ok((k, v, delivered, honest_forgery(&report.ledger, &s.config)))
        })
        .collect::<Result<_>>()?;
    let mut t = Tally { runs: scenarios.len(), ..Tally::default() };
    for (k, v, delivered, forged) in results {
        if !(v.agreement && v.termination && delivered) {
            t.violations += 1;
            if t.first.is_none() {
                t.first = Some(format!("{} delivered={delivered}", describe(&scenarios[k], &v)));
            }
        }
        if forged {
            t.forgeries += 1;
        }
    }
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
fn baseline_batch(
    protocol: ProtocolKind,
    mode: Mode,
    m: usize,
    budget: usize,
    faulty: Option<&[NodeId]>,
    adversaries: &[AdversarySpec],
    trials: usize,
    seed: u64,
) -> Result<Vec<Scenario>> {
    let mut batch = Vec::new();
    for (ai, adv) in adversaries.iter().enumerate() {
        for trial in 0..trials {
            let s = derive_seed(seed, &[20, m as u64, budget as u64, ai as u64, trial as u64]);
            let pattern = InputPattern::for_trial(trial);
            let config = match faulty {
                Some(set) => {
                    let honest: Vec<NodeId> = (1..=m as u32).map(NodeId).filter(|i| !set.contains(i)).collect();
                    Configuration::new(m, set.iter().copied(), super::sampling::inputs(&honest, pattern, s))?
                }
                None => sample_config(m, budget, Placement::for_trial(trial), pattern, s)?,
            };
            let mut sc = Scenario::baseline(protocol, mode, config, adv.clone(), s);
            sc.fault_budget = Some(budget);
            batch.push(sc);
        }
    }
    Ok(batch)
}
