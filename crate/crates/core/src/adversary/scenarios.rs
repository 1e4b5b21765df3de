//! Configuration families of the impossibility arguments.
//!
//! Node ids are handed out to the groups in the order listed, so group `A`
//! always starts at id 1. Honest nodes on the left side of the cover world
//! hold input 0 and honest nodes on the right side hold input 1; the faulty
//! nodes are driven by a [`CoverPlan`] over the same sides, so within every
//! family each honest group sees the same messages in every configuration in
//! which it is honest on the same side.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{AdversarySpec, CoverPlan, Side, Unlisted};
use crate::error::{Error, Result};
use crate::harness::{Scenario, SCHEMA_VERSION};
use crate::model::{
    compute_error, compute_local_error, Bit, Configuration, LocalPrediction, Mode, NodeId, Prediction,
    PredictionInput, TrustParam,
};
use crate::protocols::ProtocolKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    /// Robustness cap without signatures.
    T41,
    /// Impossibility curve without signatures, first piece.
    T42p1,
    T42p2,
    /// Conditional third piece.
    T42p3,
    /// Robustness cap with signatures.
    TC3,
    /// Impossibility curve with signatures, first piece.
    TC4p1,
    TC4p2,
    /// Local predictions.
    T52,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::T41,
        Theorem::T42p1,
        Theorem::T42p2,
        Theorem::T42p3,
        Theorem::TC3,
        Theorem::TC4p1,
        Theorem::TC4p2,
        Theorem::T52,
    ];

    pub fn mode(self) -> Mode {
        match self {
            Theorem::TC3 | Theorem::TC4p1 | Theorem::TC4p2 => Mode::Auth,
            _ => Mode::NonAuth,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::T41 => "T4.1",
            Theorem::T42p1 => "T4.2p1",
            Theorem::T42p2 => "T4.2p2",
            Theorem::T42p3 => "T4.2p3",
            Theorem::TC3 => "TC.3",
            Theorem::TC4p1 => "TC.4p1",
            Theorem::TC4p2 => "TC.4p2",
            Theorem::T52 => "T5.2",
        })
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '.').collect::<String>().to_ascii_lowercase();
        Theorem::ALL
            .into_iter()
            .find(|t| t.to_string().replace('.', "").to_ascii_lowercase() == key)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown theorem {s:?}")))
    }
}

/// One configuration of a family.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub label: String,
    pub scenario: Scenario,
    /// Node ids of every named group.
    pub groups: BTreeMap<String, Vec<NodeId>>,
    /// Prediction error of the configuration (summed over honest nodes for local predictions).
    pub eta: usize,
    pub f: usize,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub theorem: Theorem,
    pub alpha: TrustParam,
    pub n: usize,
    pub members: Vec<FamilyMember>,
}

impl Family {
    /// Runs the same configurations under another protocol.
    pub fn with_protocol(mut self, protocol: ProtocolKind) -> Self {
        for m in &mut self.members {
            m.scenario.protocol = protocol;
            if let Some(mode) = protocol.mode() {
                m.scenario.mode = mode;
            }
        }
        self
    }

    pub fn member(&self, label: &str) -> Option<&FamilyMember> {
        self.members.iter().find(|m| m.label == label)
    }
}

fn integral(what: &str, v: Ratio<i64>, alpha: TrustParam, n: usize) -> Result<usize> {
    if !v.is_integer() || v < Ratio::from_integer(0) {
        return Err(Error::Infeasible(format!("{what} = {v} is not a non-negative integer at alpha = {alpha}, n = {n}")));
    }
    Ok(v.to_integer() as usize)
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Infeasible(msg()))
    }
}

/// Ceil and floor of a real range as integers.
fn bounds(low: Ratio<i64>, high: Ratio<i64>) -> (i64, i64) {
    (low.ceil().to_integer(), high.floor().to_integer())
}

struct Plan {
    label: &'static str,
    faulty: &'static [&'static str],
    left: &'static [&'static str],
    right: &'static [&'static str],
    honest_side: Side,
}

struct Builder {
    theorem: Theorem,
    alpha: TrustParam,
    n: usize,
    groups: BTreeMap<String, Vec<NodeId>>,
    prediction: PredictionInput,
}

impl Builder {
    fn new(theorem: Theorem, alpha: TrustParam, sizes: &[(&str, usize)]) -> Self {
        let mut next = 1u32;
        let mut groups = BTreeMap::new();
        for (name, size) in sizes {
            groups.insert(name.to_string(), (next..next + *size as u32).map(NodeId).collect());
            next += *size as u32;
        }
        Builder {
            theorem,
            alpha,
            n: (next - 1) as usize,
            groups,
            prediction: PredictionInput::Global(Prediction::default()),
        }
    }

    fn ids(&self, names: &[&str]) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = names.iter().flat_map(|g| self.groups[*g].iter().copied()).collect();
        v.sort_unstable();
        v
    }

    fn predict(mut self, names: &[&str]) -> Self {
        self.prediction = PredictionInput::Global(Prediction::new(self.ids(names)));
        self
    }

    fn member(&self, plan: &Plan) -> Result<FamilyMember> {
        let faulty = self.ids(plan.faulty);
        let left = self.ids(plan.left);
        let right = self.ids(plan.right);
        let config = Configuration::with_inputs(self.n, faulty.iter().copied(), |i| {
            if left.contains(&i) {
                Bit::Zero
            } else if right.contains(&i) {
                Bit::One
            } else {
                Bit::from(plan.honest_side == Side::Right)
            }
        })?;
        let adversary = if faulty.is_empty() {
            AdversarySpec::Silent
        } else {
            AdversarySpec::Cover(CoverPlan {
                unlisted: Unlisted::Both,
                left_only: left,
                right_only: right,
                left_input: Bit::Zero,
                right_input: Bit::One,
                left_prediction: None,
                right_prediction: None,
                honest_side: plan.honest_side,
                stop_after: None,
            })
        };
        let eta = match &self.prediction {
            PredictionInput::Global(p) => compute_error(&config, p).eta,
            PredictionInput::Local(l) => compute_local_error(&config, l),
        };
        let f = config.f();
        let mode = self.theorem.mode();
        Ok(FamilyMember {
            label: plan.label.to_string(),
            scenario: Scenario {
                schema_version: SCHEMA_VERSION,
                protocol: ProtocolKind::wrapper(mode),
                mode,
                alpha: Some(self.alpha),
                config,
                prediction: Some(self.prediction.clone()),
                adversary,
                seed: 0,
                fault_budget: None,
                round_budget: None,
            },
            groups: self.groups.clone(),
            eta,
            f,
        })
    }

    fn family(self, plans: &[Plan]) -> Result<Family> {
        let members = plans.iter().map(|p| self.member(p)).collect::<Result<_>>()?;
        Ok(Family { theorem: self.theorem, alpha: self.alpha, n: self.n, members })
    }
}

const L: Side = Side::Left;
const R: Side = Side::Right;

/// Builds the configurations of `theorem` at `(alpha, n)`.
///
/// `eta` picks a member of the families that are parameterized by the
/// prediction error (the smallest feasible value when absent):
///
/// * `T4.2p1`, `TC.4p1`: error of the first configuration,
/// * `T4.2p2`: size of the three equal groups,
/// * `T4.2p3`, `TC.4p2`: error of the second and third configurations.
///
/// Partition sizes must come out integral; otherwise the point is rejected.
pub fn build_impossibility_scenarios(theorem: Theorem, alpha: TrustParam, n: usize, eta: Option<usize>) -> Result<Family> {
    let mode = theorem.mode();
    let a = alpha.check(mode)?.value();
    let one = Ratio::from_integer(1);
    let nq = Ratio::from_integer(n as i64);
    let an = integral("alpha n", a * nq, alpha, n);
    let pick = |low: i64, high: i64, ok: &dyn Fn(i64) -> bool| -> Result<usize> {
        match eta {
            Some(e) => {
                let e = e as i64;
                need(low <= e && e <= high, || format!("eta = {e} outside [{low}, {high}] for {theorem}"))?;
                need(ok(e), || format!("eta = {e} gives non-integral groups for {theorem} at n = {n}"))?;
                Ok(e as usize)
            }
            None => (low.max(0)..=high)
                .find(|e| ok(*e))
                .map(|e| e as usize)
                .ok_or_else(|| Error::Infeasible(format!("no feasible eta for {theorem} at alpha = {alpha}, n = {n}"))),
        }
    };
    match theorem {
        Theorem::T41 => {
            let side = integral("(1 - alpha) n / 2", (one - a) * nq / Ratio::from_integer(2), alpha, n)?;
            need(side >= 1, || "groups A and B would be empty".into())?;
            let c = an?;
            Builder::new(theorem, alpha, &[("A", side), ("B", side), ("C", c)]).predict(&["A", "B"]).family(&[
                Plan { label: "config 1", faulty: &["C"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "config 2", faulty: &["B"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "config 3", faulty: &["A"], left: &["A"], right: &["B"], honest_side: R },
            ])
        }
        Theorem::T42p1 => {
            let an = an?;
            let side = integral("((1 - alpha) n - 1) / 2", ((one - a) * nq - one) / Ratio::from_integer(2), alpha, n)?;
            need(side >= 1, || "groups A and B would be empty".into())?;
            let (low, high) = bounds(Ratio::from_integer(1), (one - a) / Ratio::from_integer(2) * nq);
            let e = pick(low, high.min(an as i64), &|e| e >= 1)?;
            let d = e - 1;
            let c = an - d;
            Builder::new(theorem, alpha, &[("A", side), ("B", side), ("C", c), ("D", d), ("x", 1)])
                .predict(&["A", "B", "D", "x"])
                .family(&[
                    Plan { label: "a", faulty: &["C", "D", "x"], left: &["A"], right: &["B"], honest_side: L },
                    Plan { label: "b", faulty: &["B"], left: &["A"], right: &["B"], honest_side: L },
                    Plan { label: "c", faulty: &["A"], left: &["A"], right: &["B"], honest_side: R },
                ])
        }
        Theorem::T42p2 => {
            let (low, high) = bounds((one - a) / Ratio::from_integer(2) * nq, nq / Ratio::from_integer(3));
            let e = pick(low.max(1), high, &|e| 3 * e <= n as i64)?;
            Builder::new(theorem, alpha, &[("A", e), ("B", e), ("C", e), ("D", n - 3 * e)])
                .predict(&["A", "B", "C"])
                .family(&[
                    Plan { label: "a", faulty: &["C", "D"], left: &["A"], right: &["B"], honest_side: L },
                    Plan { label: "b", faulty: &["B", "D"], left: &["A"], right: &["B"], honest_side: L },
                    Plan { label: "c", faulty: &["A", "D"], left: &["A"], right: &["B"], honest_side: R },
                ])
        }
        Theorem::T42p3 => {
            let (low, high) = bounds(nq / Ratio::from_integer(3), a * nq);
            let n_i = n as i64;
            let sizes = |e: i64| -> Option<(usize, usize)> {
                let twice_d = 3 * e - n_i - 3;
                if twice_d < 0 || twice_d % 2 != 0 {
                    return None;
                }
                let d = twice_d / 2;
                ((n_i - d) % 3 == 0 && (n_i - d) / 3 >= 2).then_some((((n_i - d) / 3) as usize, d as usize))
            };
            let e = pick(low, high, &|e| sizes(e).is_some())?;
            let (k, d) = sizes(e as i64).expect("checked by pick");
            Builder::new(theorem, alpha, &[("A'", k + 1), ("B'", k + 1), ("C'", k - 2), ("D", d)])
                .predict(&["A'", "B'", "C'"])
                .family(&[
                    Plan { label: "a", faulty: &["C'", "D"], left: &["A'"], right: &["B'"], honest_side: L },
                    Plan { label: "b", faulty: &["B'"], left: &["A'"], right: &["B'"], honest_side: L },
                    Plan { label: "c", faulty: &["A'"], left: &["A'"], right: &["B'"], honest_side: R },
                ])
        }
        Theorem::TC3 => {
            let an = an?;
            need(an < n, || "group B would be empty".into())?;
            Builder::new(theorem, alpha, &[("A", an), ("B", n - an)]).predict(&["A"]).family(&[
                Plan { label: "config 1", faulty: &["B"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "config 2", faulty: &["A"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "config 3", faulty: &[], left: &["A"], right: &["B"], honest_side: L },
            ])
        }
        Theorem::TC4p1 => {
            let an = an?;
            let a_size = integral("(1 - alpha) n - 1", (one - a) * nq - one, alpha, n)?;
            need(a_size >= 1, || "group A would be empty".into())?;
            let (low, high) = bounds(one, (one - a) * nq);
            let e = pick(low, high.min(an as i64), &|e| e >= 1)?;
            let c = e - 1;
            Builder::new(theorem, alpha, &[("A", a_size), ("B", an - c), ("C", c), ("x", 1)])
                .predict(&["A", "C", "x"])
                .family(&[
                    Plan { label: "a", faulty: &["B", "C", "x"], left: &["A"], right: &["B", "C", "x"], honest_side: L },
                    Plan { label: "b", faulty: &["A"], left: &["A"], right: &["B", "C", "x"], honest_side: L },
                    Plan { label: "c", faulty: &[], left: &["A"], right: &["B", "C", "x"], honest_side: L },
                ])
        }
        Theorem::TC4p2 => {
            let (low, high) = bounds((one - a) * nq, a * nq);
            let e = pick(low.max((n as i64 + 1) / 2), high.min(n as i64 - 1), &|e| 2 * e >= n as i64)?;
            let c = 2 * e - n;
            let side = n - e;
            Builder::new(theorem, alpha, &[("A", side), ("B", side), ("C", c)]).predict(&["A", "B"]).family(&[
                Plan { label: "a", faulty: &["C"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "b", faulty: &["B"], left: &["A", "C"], right: &["B"], honest_side: L },
                Plan { label: "c", faulty: &["A"], left: &["A"], right: &["B", "C"], honest_side: R },
            ])
        }
        Theorem::T52 => {
            need(n >= 2 && n % 2 == 0, || format!("n = {n} must be even"))?;
            let half = n / 2;
            let mut b = Builder::new(theorem, alpha, &[("A", half), ("B", half)]);
            let p0 = Prediction::new(b.ids(&["A"]));
            let p1 = Prediction::new(b.ids(&["B"]));
            let per_node = (1..=n).map(|i| if i <= half { p0.clone() } else { p1.clone() }).collect();
            b.prediction = PredictionInput::Local(LocalPrediction { per_node });
            b.family(&[
                Plan { label: "config 1", faulty: &["B"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "config 2", faulty: &["A"], left: &["A"], right: &["B"], honest_side: L },
                Plan { label: "config 3", faulty: &[], left: &["A"], right: &["B"], honest_side: L },
            ])
        }
    }
}
