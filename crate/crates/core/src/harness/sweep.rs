//! Empirical resilience curves.
//!
//! For a fixed prediction error the search walks `f = 0, 1, 2, ...` and stops
//! at the first fault count for which some sampled run fails; the empirical
//! resilience is the last count before it. Walking upwards reports the same
//! value as checking every `f' <= f` from the top down, and touches far fewer
//! cells. Grid cells run in parallel; every run seeds itself from the master
//! seed through [`derive_seed`].

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{derive_seed, sample_config, InputPattern, Placement};
use super::{verdict, Scenario, Verdict};
use crate::adversary::{adversary_set_hash, AdversarySpec};
use crate::curves::{theoretical_impossibility, theoretical_smoothness, CurveKind, CurvePoint, ResilienceCurve};
use crate::error::{Error, Result};
use crate::model::{Mode, TrustParam};
use crate::predgen::{with_split, Split};

#[derive(Clone, Debug)]
pub struct SweepParams {
    pub mode: Mode,
    pub alpha: TrustParam,
    pub n: usize,
    pub adversaries: Vec<AdversarySpec>,
    /// Sampled configurations per (f, split, adversary).
    pub trials: usize,
    pub seed: u64,
}

/// The first failing run found for a fault count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub f: usize,
    pub split: Split,
    pub adversary: String,
    pub trial: usize,
    pub placement: Placement,
    pub pattern: InputPattern,
    pub seed: u64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResiliencePoint {
    pub eta: usize,
    pub empirical_f: usize,
    pub first_failure: Option<FailureWitness>,
}

/// Runs every split, adversary and trial at `(eta, f)` and returns the first failure.
pub fn check_cell(params: &SweepParams, eta: usize, f: usize) -> Result<Option<FailureWitness>> {
    for (si, split) in Split::ALL.into_iter().enumerate() {
        for (ai, adversary) in params.adversaries.iter().enumerate() {
            for trial in 0..params.trials {
                let seed = derive_seed(params.seed, &[eta as u64, f as u64, si as u64, ai as u64, trial as u64]);
                let placement = Placement::for_trial(trial);
                let pattern = InputPattern::for_trial(trial);
                let config = sample_config(params.n, f, placement, pattern, seed)?;
                let prediction = with_split(&config, eta, split, seed)?;
                let scenario = Scenario::wrapper(params.mode, params.alpha, config, prediction, adversary.clone(), seed);
                let v = verdict(&scenario)?;
                if !v.ok() {
                    return Ok(Some(FailureWitness {
                        f,
                        split,
                        adversary: adversary.name().to_string(),
                        trial,
                        placement,
                        pattern,
                        seed,
                        verdict: v,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Largest `f` such that every sampled run with at most `f` faults and error `eta` succeeds.
pub fn empirical_resilience(params: &SweepParams, eta: usize) -> Result<ResiliencePoint> {
    if eta > params.n {
        return Err(Error::InvalidConfig(format!("eta = {eta} exceeds n = {}", params.n)));
    }
    for f in 0..=params.n {
        if let Some(w) = check_cell(params, eta, f)? {
            return Ok(ResiliencePoint { eta, empirical_f: f.saturating_sub(1), first_failure: Some(w) });
        }
    }
    Ok(ResiliencePoint { eta, empirical_f: params.n, first_failure: None })
}

/// One line of the sweep CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mode: Mode,
    pub alpha: TrustParam,
    pub n: usize,
    pub eta: usize,
    pub theory_s: usize,
    pub theory_sbar: Option<usize>,
    pub sbar_flag: bool,
    pub empirical_f: usize,
    pub trials: usize,
    pub adversary_set_hash: String,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub points: Vec<ResiliencePoint>,
}

impl SweepResult {
    pub fn empirical_curve(&self, params: &SweepParams) -> ResilienceCurve {
        ResilienceCurve {
            mode: params.mode,
            kind: CurveKind::Empirical,
            alpha: params.alpha,
            n: params.n,
            points: self
                .points
                .iter()
                .map(|p| CurvePoint { eta: p.eta, value: Some(p.empirical_f), conditional: false, trials: Some(params.trials) })
                .collect(),
        }
    }

    /// Grid points where the empirical value falls below the guaranteed curve.
    pub fn below_theory(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.empirical_f < r.theory_s).collect()
    }
}

/// Empirical and theoretical resilience at every `eta` of the grid, in grid order.
pub fn sweep(params: &SweepParams, etas: &[usize]) -> Result<SweepResult> {
    params.alpha.check(params.mode)?;
    let hash = adversary_set_hash(&params.adversaries);
    let points: Vec<ResiliencePoint> =
        etas.par_iter().map(|&eta| empirical_resilience(params, eta)).collect::<Result<_>>()?;
    let rows = points
        .iter()
        .map(|p| {
            let sbar = theoretical_impossibility(params.mode, params.alpha, params.n, p.eta)?;
            Ok(SweepRow {
                mode: params.mode,
                alpha: params.alpha,
                n: params.n,
                eta: p.eta,
                theory_s: theoretical_smoothness(params.mode, params.alpha, params.n, p.eta)?,
                theory_sbar: sbar.map(|s| s.value),
                sbar_flag: sbar.is_some_and(|s| s.conditional),
                empirical_f: p.empirical_f,
                trials: params.trials,
                adversary_set_hash: hash.clone(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { rows, points })
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}
