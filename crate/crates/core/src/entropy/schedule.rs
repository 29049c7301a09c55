use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EntropyError;

/// A sequence ε_k > 0 of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Schedule {
    Constant { eps: f64 },
    /// ε·k^(−p)
    Power { eps: f64, p: f64 },
    /// ε·2^(−ηk)
    Exponential { eps: f64, eta: f64 },
    Explicit { values: BTreeMap<u32, f64> },
}

/// Outcome of the subexponentiality test and the rule that decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubexpCertificate {
    pub subexponential: bool,
    pub rule: String,
    /// Fitted asymptotic rate of log⁺ε_k / k, for explicit lists.
    pub fitted_rate: Option<f64>,
}

/// Explicit lists pass when the fitted asymptotic rate is below this.
pub const SUBEXP_RATE_TOLERANCE: f64 = 0.01;

impl Schedule {
    pub fn constant(eps: f64) -> Self {
        Schedule::Constant { eps }
    }

    pub fn power(eps: f64, p: f64) -> Self {
        Schedule::Power { eps, p }
    }

    pub fn exponential(eps: f64, eta: f64) -> Self {
        Schedule::Exponential { eps, eta }
    }

    pub fn explicit(values: impl IntoIterator<Item = (u32, f64)>) -> Self {
        Schedule::Explicit {
            values: values.into_iter().collect(),
        }
    }

    pub fn validate(&self) -> Result<(), EntropyError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        match self {
            Schedule::Constant { eps } if ok(*eps) => Ok(()),
            Schedule::Power { eps, p } if ok(*eps) && p.is_finite() => Ok(()),
            Schedule::Exponential { eps, eta } if ok(*eps) && eta.is_finite() => Ok(()),
            Schedule::Explicit { values } => {
                if values.is_empty() {
                    Err(EntropyError::EmptySchedule)
                } else if values.iter().all(|(&k, &v)| k > 0 && ok(v)) {
                    Ok(())
                } else {
                    Err(EntropyError::InvalidSchedule(
                        "explicit values must be positive at positive k".into(),
                    ))
                }
            }
            other => Err(EntropyError::InvalidSchedule(format!("{other:?}"))),
        }
    }

    /// ε_k, or `None` where an explicit list has no entry.
    pub fn at(&self, k: u32) -> Option<f64> {
        let kf = k as f64;
        match self {
            Schedule::Constant { eps } => Some(*eps),
            Schedule::Power { eps, p } => Some(eps * kf.powf(-p)),
            Schedule::Exponential { eps, eta } => Some(eps * (-eta * kf).exp2()),
            Schedule::Explicit { values } => values.get(&k).copied(),
        }
    }

    /// ε′ ⪯ ε pointwise over `ks`.
    pub fn is_below(&self, other: &Schedule, ks: impl IntoIterator<Item = u32>) -> bool {
        ks.into_iter()
            .all(|k| match (self.at(k), other.at(k)) {
                (Some(a), Some(b)) => a <= b,
                _ => false,
            })
    }

    pub fn label(&self) -> String {
        match self {
            Schedule::Constant { eps } => format!("const({eps})"),
            Schedule::Power { eps, p } => format!("{eps}*k^-{p}"),
            Schedule::Exponential { eps, eta } => format!("{eps}*2^-{eta}k"),
            Schedule::Explicit { values } => format!("explicit[{}]", values.len()),
        }
    }
}

/// Decides whether log⁺ε_k / k → 0.
///
/// Closed forms are decided exactly. An explicit list is fitted over its
/// last two thirds with log⁺ε_k / k ≈ a + b·log₂k / k + c / k, which absorbs
/// constant and polynomial factors, and passes when |a| is below
/// [`SUBEXP_RATE_TOLERANCE`].
pub fn is_subexponential(schedule: &Schedule) -> Result<SubexpCertificate, EntropyError> {
    schedule.validate()?;
    Ok(match schedule {
        Schedule::Constant { .. } => SubexpCertificate {
            subexponential: true,
            rule: "constant: log⁺ε/k = O(1/k)".into(),
            fitted_rate: Some(0.0),
        },
        Schedule::Power { p, .. } => SubexpCertificate {
            subexponential: true,
            rule: format!("power k^-{p}: log⁺ε_k/k = O(log k / k)"),
            fitted_rate: Some(0.0),
        },
        Schedule::Exponential { eta, .. } => SubexpCertificate {
            subexponential: *eta == 0.0,
            rule: format!("exponential: log⁺ε_k/k → {}", -eta),
            fitted_rate: Some(-eta),
        },
        Schedule::Explicit { values } => {
            let pts: Vec<(f64, f64)> = values
                .iter()
                .map(|(&k, &v)| (k as f64, super::log_plus(v) / k as f64))
                .collect();
            let tail = &pts[pts.len() / 3..];
            let rate = if tail.len() >= 4 {
                tail_rate(tail)
            } else {
                // Too few points to separate the terms; use the last value.
                tail.last().map(|p| p.1).unwrap_or(0.0)
            };
            SubexpCertificate {
                subexponential: rate.abs() < SUBEXP_RATE_TOLERANCE,
                rule: format!(
                    "explicit: fitted tail rate {rate:.4} vs tolerance {SUBEXP_RATE_TOLERANCE}"
                ),
                fitted_rate: Some(rate),
            }
        }
    })
}

/// Intercept `a` of the least-squares fit y ≈ a + b·log₂k/k + c/k.
fn tail_rate(pts: &[(f64, f64)]) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let rows = pts.len();
    let a = DMatrix::from_fn(rows, 3, |i, j| {
        let k = pts[i].0;
        match j {
            0 => 1.0,
            1 => k.log2() / k,
            _ => 1.0 / k,
        }
    });
    let y = DVector::from_iterator(rows, pts.iter().map(|p| p.1));
    match a.svd(true, true).solve(&y, 1e-12) {
        Ok(coef) => coef[0],
        Err(_) => pts.last().map(|p| p.1).unwrap_or(0.0),
    }
}
