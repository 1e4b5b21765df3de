//! Theoretical resilience curves and the fault bounds of both wrappers.
//!
//! Every threshold is evaluated in exact rational arithmetic. A real range
//! `[a, b]` contains the integer `eta` when `ceil(a) <= eta <= floor(b)`.

use std::io::Write;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Mode, TrustParam};

type Q = Ratio<i64>;

fn q(v: i64) -> Q {
    Q::from_integer(v)
}

fn frac(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

fn in_range(eta: usize, low: Q, high: Q) -> bool {
    let eta = eta as i64;
    low.ceil().to_integer() <= eta && eta <= high.floor().to_integer()
}

fn floor_nonneg(v: Q) -> usize {
    v.floor().to_integer().max(0) as usize
}

/// Largest tolerated fault count with the perfect prediction: `floor(alpha * n)`.
pub fn consistency_bound(mode: Mode, alpha: TrustParam, n: usize) -> Result<usize> {
    let alpha = alpha.check(mode)?;
    Ok(floor_nonneg(alpha.times(n)))
}

/// Fault count tolerated under every prediction, clamped at zero.
pub fn robustness_bound(mode: Mode, alpha: TrustParam, n: usize) -> Result<usize> {
    let a = alpha.check(mode)?.value();
    let n = q(n as i64);
    let share = match mode {
        Mode::NonAuth => (q(1) - a) / q(2) * n,
        Mode::Auth => (q(1) - a) * n,
    };
    Ok(share.floor().to_integer().saturating_sub(1).max(0) as usize)
}

/// Guaranteed smoothness `s(eta)`.
///
/// Where two pieces both apply the larger value wins; the result is never
/// below the robustness bound, which holds for every prediction.
pub fn theoretical_smoothness(mode: Mode, alpha: TrustParam, n: usize, eta: usize) -> Result<usize> {
    let robust = robustness_bound(mode, alpha, n)?;
    let a = alpha.value();
    let nq = q(n as i64);
    let e = q(eta as i64);
    let pieces: [(Q, Q, Q); 3] = match mode {
        Mode::NonAuth => [
            (a * nq - e, q(0), (q(1) - a) * nq - q(1)),
            (nq - q(2) * e - q(1), (q(1) - a) * nq - q(1), (q(1) + a) / q(4) * nq + q(1)),
            ((q(1) - a) / q(2) * nq - q(1), (q(1) + a) / q(4) * nq + q(1), nq),
        ],
        Mode::Auth => [
            (a * nq - e / q(2), q(0), q(2) * (q(1) - a) * nq),
            (nq - frac(3, 2) * e - q(1), q(2) * (q(1) - a) * nq, frac(2, 3) * a * nq),
            ((q(1) - a) * nq - q(1), frac(2, 3) * a * nq, nq),
        ],
    };
    // A perfect prediction is covered by consistency even where the first
    // piece's range is empty (alpha = 1).
    let consistent = (eta == 0).then(|| a * nq);
    let best = pieces
        .iter()
        .filter(|(_, lo, hi)| in_range(eta, *lo, *hi))
        .map(|(v, _, _)| *v)
        .chain(consistent)
        .max();
    Ok(best.map(floor_nonneg).unwrap_or(0).max(robust))
}

/// Lower end of the impossible region at a given error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Impossibility {
    /// Smallest fault count that no algorithm with the matching consistency
    /// and robustness can tolerate at this error.
    pub value: usize,
    /// Set when the bound only holds for algorithms whose smoothness matches
    /// the middle piece of the non-authenticated curve.
    pub conditional: bool,
}

/// Impossibility curve `sbar(eta)`, absent outside the proven ranges.
///
/// The unconditional pieces state that smoothness is strictly below the
/// formula, so the first impossible count is its ceiling; overlapping pieces
/// combine by minimum. The conditional non-authenticated piece caps smoothness
/// at the formula, so the first impossible count is its floor plus one.
pub fn theoretical_impossibility(mode: Mode, alpha: TrustParam, n: usize, eta: usize) -> Result<Option<Impossibility>> {
    let a = alpha.check(mode)?.value();
    let nq = q(n as i64);
    let e = q(eta as i64);
    let strict: Vec<(Q, Q, Q)> = match mode {
        Mode::NonAuth => vec![
            (a * nq + q(1), q(0), (q(1) - a) / q(2) * nq),
            (nq - q(2) * e, (q(1) - a) / q(2) * nq, nq / q(3)),
        ],
        Mode::Auth => vec![(a * nq + q(1), q(0), (q(1) - a) * nq), (nq - e, (q(1) - a) * nq, a * nq)],
    };
    let unconditional = strict
        .iter()
        .filter(|(_, lo, hi)| in_range(eta, *lo, *hi))
        .map(|(v, _, _)| v.ceil().to_integer().max(0) as usize)
        .min();
    if let Some(value) = unconditional {
        return Ok(Some(Impossibility { value, conditional: false }));
    }
    if mode == Mode::NonAuth && in_range(eta, nq / q(3), a * nq) {
        let cap = nq / q(2) - e / q(2) - q(2);
        let value = (cap.floor().to_integer() + 1).max(0) as usize;
        return Ok(Some(Impossibility { value, conditional: true }));
    }
    Ok(None)
}

/// Which curve a [`ResilienceCurve`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    TheoreticalS,
    TheoreticalSbar,
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub eta: usize,
    pub value: Option<usize>,
    pub conditional: bool,
    /// Trials per configuration cell; only set on empirical curves.
    pub trials: Option<usize>,
}

/// Mapping from prediction error to a resilience value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResilienceCurve {
    pub mode: Mode,
    pub kind: CurveKind,
    pub alpha: TrustParam,
    pub n: usize,
    pub points: Vec<CurvePoint>,
}

impl ResilienceCurve {
    pub fn smoothness(mode: Mode, alpha: TrustParam, n: usize) -> Result<Self> {
        let points = (0..=n)
            .map(|eta| {
                Ok(CurvePoint {
                    eta,
                    value: Some(theoretical_smoothness(mode, alpha, n, eta)?),
                    conditional: false,
                    trials: None,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ResilienceCurve { mode, kind: CurveKind::TheoreticalS, alpha, n, points })
    }

    pub fn impossibility(mode: Mode, alpha: TrustParam, n: usize) -> Result<Self> {
        let points = (0..=n)
            .map(|eta| {
                let sbar = theoretical_impossibility(mode, alpha, n, eta)?;
                Ok(CurvePoint {
                    eta,
                    value: sbar.map(|s| s.value),
                    conditional: sbar.is_some_and(|s| s.conditional),
                    trials: None,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ResilienceCurve { mode, kind: CurveKind::TheoreticalSbar, alpha, n, points })
    }

    pub fn value_at(&self, eta: usize) -> Option<usize> {
        self.points.iter().find(|p| p.eta == eta).and_then(|p| p.value)
    }
}

/// One row of the theoretical curve table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRow {
    pub mode: Mode,
    pub alpha: TrustParam,
    pub n: usize,
    pub eta: usize,
    pub s: usize,
    pub sbar: Option<usize>,
    pub sbar_conditional_flag: bool,
}

pub fn curve_table(mode: Mode, alpha: TrustParam, n: usize) -> Result<Vec<CurveRow>> {
    (0..=n)
        .map(|eta| {
            let sbar = theoretical_impossibility(mode, alpha, n, eta)?;
            Ok(CurveRow {
                mode,
                alpha,
                n,
                eta,
                s: theoretical_smoothness(mode, alpha, n, eta)?,
                sbar: sbar.map(|s| s.value),
                sbar_conditional_flag: sbar.is_some_and(|s| s.conditional),
            })
        })
        .collect()
}

/// Writes rows as CSV with a header line. Absent `sbar` values are empty cells.
pub fn write_curve_csv<W: Write>(out: W, rows: &[CurveRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(s: &str) -> TrustParam {
        s.parse().unwrap()
    }

    #[test]
    fn ceil_floor_range() {
        assert!(in_range(4, frac(7, 2), frac(9, 2)));
        assert!(!in_range(3, frac(7, 2), frac(9, 2)));
        assert!(!in_range(5, frac(7, 2), frac(9, 2)));
        assert_eq!(floor_nonneg(frac(-3, 2)), 0);
        assert_eq!(floor_nonneg(frac(7, 2)), 3);
    }

    #[test]
    fn nonauth_piece_examples() {
        let a = alpha("0.8");
        assert_eq!(theoretical_smoothness(Mode::NonAuth, a, 40, 4).unwrap(), 28);
        assert_eq!(theoretical_smoothness(Mode::NonAuth, a, 40, 0).unwrap(), 32);
        assert_eq!(theoretical_smoothness(Mode::NonAuth, a, 40, 30).unwrap(), 3);
    }

    #[test]
    fn auth_piece_examples() {
        assert_eq!(theoretical_smoothness(Mode::Auth, alpha("0.8"), 30, 14).unwrap(), 8);
    }

    #[test]
    fn impossibility_examples() {
        let a = alpha("0.8");
        let v = |m, n, e| theoretical_impossibility(m, a, n, e).unwrap().unwrap();
        assert_eq!(v(Mode::NonAuth, 40, 2), Impossibility { value: 33, conditional: false });
        assert_eq!(v(Mode::NonAuth, 40, 10), Impossibility { value: 20, conditional: false });
        assert_eq!(v(Mode::Auth, 30, 10), Impossibility { value: 20, conditional: false });
        assert!(v(Mode::NonAuth, 40, 20).conditional);
        assert_eq!(theoretical_impossibility(Mode::Auth, a, 30, 25).unwrap(), None);
    }

    #[test]
    fn bound_examples() {
        let a = alpha("0.8");
        assert_eq!(consistency_bound(Mode::NonAuth, a, 40).unwrap(), 32);
        assert_eq!(robustness_bound(Mode::NonAuth, a, 40).unwrap(), 3);
        assert_eq!(consistency_bound(Mode::Auth, a, 30).unwrap(), 24);
        assert_eq!(robustness_bound(Mode::Auth, a, 30).unwrap(), 5);
        assert_eq!(robustness_bound(Mode::NonAuth, alpha("1"), 17).unwrap(), 0);
    }

    #[test]
    fn alpha_range_checked() {
        assert!(theoretical_smoothness(Mode::Auth, alpha("0.4"), 10, 0).is_err());
        assert!(theoretical_smoothness(Mode::NonAuth, alpha("0.3"), 10, 0).is_err());
        assert!(theoretical_smoothness(Mode::NonAuth, alpha("1/3"), 10, 0).is_ok());
    }
}
