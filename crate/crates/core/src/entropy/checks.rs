use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sequence::{log_plus, log_plus_count, BarcodeSequence};
use super::EntropyError;

/// Deficits whose fitted linear rate stays below this get a sublinear
/// allowance.
pub const SUBLINEAR_RATE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtopRow {
    pub k: u32,
    pub log_p: f64,
    pub entropy_term: f64,
    pub shortest_bar_term: f64,
    pub slack: f64,
    pub allowance: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtopCheck {
    pub rows: Vec<HtopRow>,
    /// Fitted linear rate of the deficit, bits per iteration.
    pub deficit_rate: f64,
    pub allowance_granted: bool,
    pub satisfied: bool,
}

/// Checks k·h + d·|log⁺β_k| ≥ log⁺p(k) + o(k).
///
/// The slack is the left side minus log⁺p(k). Where it is negative, the
/// deficit D_k may be absorbed by an envelope a + b√k, but only when the
/// least-squares slope of D_k against k is within
/// [`SUBLINEAR_RATE_TOLERANCE`].
pub fn htop_bound_check(
    p_series: &BTreeMap<u32, u128>,
    beta_min_series: &BTreeMap<u32, f64>,
    d: u32,
    htop_estimate: f64,
) -> Result<HtopCheck, EntropyError> {
    if d == 0 {
        return Err(EntropyError::InvalidParameter("d must be at least 1".into()));
    }
    if p_series.keys().ne(beta_min_series.keys()) || p_series.is_empty() {
        return Err(EntropyError::RangeMismatch);
    }
    let mut rows: Vec<HtopRow> = p_series
        .iter()
        .map(|(&k, &p)| {
            let log_p = log_plus_count(p);
            let entropy_term = k as f64 * htop_estimate;
            let shortest_bar_term = d as f64 * log_plus(beta_min_series[&k]).abs();
            HtopRow {
                k,
                log_p,
                entropy_term,
                shortest_bar_term,
                slack: entropy_term + shortest_bar_term - log_p,
                allowance: 0.0,
                satisfied: false,
            }
        })
        .collect();

    let deficits: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.k as f64, (-r.slack).max(0.0)))
        .collect();
    let deficit_rate = linear_rate(&deficits);
    let allowance_granted = deficit_rate <= SUBLINEAR_RATE_TOLERANCE;
    if allowance_granted {
        let (a, b) = sqrt_envelope(&deficits);
        for r in &mut rows {
            r.allowance = a + b * (r.k as f64).sqrt();
        }
    }
    for r in &mut rows {
        r.satisfied = r.slack + r.allowance >= -1e-9;
    }
    let satisfied = rows.iter().all(|r| r.satisfied);
    Ok(HtopCheck {
        rows,
        deficit_rate,
        allowance_granted,
        satisfied,
    })
}

/// Least-squares slope of D_k against k: the linear part of the deficit.
fn linear_rate(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return pts.first().map(|p| p.1 / p.0).unwrap_or(0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Smallest envelope a + b√k ≥ D_k with b from a nonnegative least-squares
/// slope and a raised to cover every point.
fn sqrt_envelope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.sqrt()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(pts).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let b = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    let a = pts
        .iter()
        .zip(&xs)
        .map(|(p, x)| p.1 - b * x)
        .fold(0.0, f64::max);
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapClassification {
    pub max_gap: u64,
    /// Gaps in the second half never exceed those in the first half.
    pub bounded: bool,
    /// Smallest α with k_{i+1} − k_i ≤ α·k_i over the second half.
    pub alpha: f64,
}

pub fn quasi_arithmetic_gaps(k_list: &[u64]) -> Result<GapClassification, EntropyError> {
    if k_list.len() < 3 {
        return Err(EntropyError::TooShort(k_list.len()));
    }
    if k_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EntropyError::NotIncreasing);
    }
    let gaps: Vec<(u64, u64)> = k_list.windows(2).map(|w| (w[0], w[1] - w[0])).collect();
    let half = gaps.len() / 2;
    let (head, tail) = gaps.split_at(half.max(1));
    let head_max = head.iter().map(|g| g.1).max().unwrap_or(0);
    let tail_max = tail.iter().map(|g| g.1).max().unwrap_or(0);
    let alpha = tail
        .iter()
        .filter(|g| g.0 > 0)
        .map(|g| g.1 as f64 / g.0 as f64)
        .fold(0.0, f64::max);
    Ok(GapClassification {
        max_gap: gaps.iter().map(|g| g.1).max().unwrap_or(0),
        bounded: tail_max <= head_max,
        alpha,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApVerdict {
    pub gap: u64,
    /// max over 0 ≤ ℓ ≤ N of b_{ε/2}(ℓ).
    pub bound: u128,
    /// (k, b_ε(k)) for every k checked.
    pub checked: Vec<(u32, u128)>,
    pub violations: Vec<(u32, u128)>,
    pub satisfied: bool,
}

/// Checks b_ε(k) ≤ max_{0≤ℓ≤N} b_{ε/2}(ℓ) for every k = k_i + ℓ present in
/// the sequence. The k = 0 barcode must be attached as the sequence base.
pub fn ap_bound_check(
    seq: &BarcodeSequence,
    k_list: &[u64],
    eps: f64,
) -> Result<ApVerdict, EntropyError> {
    let gaps = quasi_arithmetic_gaps(k_list)?;
    if !gaps.bounded {
        return Err(EntropyError::UnboundedGaps);
    }
    let n = gaps.max_gap as u32;
    let mut bound = 0u128;
    for l in 0..=n {
        let b = seq.get(l).ok_or(EntropyError::CoverageGap(l))?;
        bound = bound.max(b.b_eps(eps / 2.0)?);
    }
    let first = k_list[0] as u32;
    let last = *k_list.last().unwrap() as u32 + n;
    let mut checked = Vec::new();
    for (&k, b) in seq.entries().range(first..=last) {
        checked.push((k, b.b_eps(eps)?));
    }
    if checked.is_empty() {
        return Err(EntropyError::CoverageGap(first));
    }
    let violations: Vec<(u32, u128)> = checked.iter().copied().filter(|c| c.1 > bound).collect();
    Ok(ApVerdict {
        gap: gaps.max_gap,
        bound,
        satisfied: violations.is_empty(),
        checked,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AiOutcome {
    /// Inequality holds and the profile vanishes: ħ = 0 is consistent.
    Consistent,
    /// Inequality holds with a positive profile, which forces ħ_ε → ∞.
    Divergent,
    /// The inequality itself fails somewhere on the grid.
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AiVerdict {
    pub outcome: AiOutcome,
    /// (ε, ħ_ε, ħ_{ε/2}) where ħ_ε > α·ħ_{ε/2} + tol.
    pub violations: Vec<(f64, f64, f64)>,
}

/// Checks ħ_ε ≤ α·ħ_{ε/2} + tol along a dyadic grid ε₀, ε₀/2, ε₀/4, …
pub fn ai_iteration_check(
    profile: &[(f64, f64)],
    alpha: f64,
    tol: f64,
) -> Result<AiVerdict, EntropyError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EntropyError::InvalidParameter(format!("alpha {alpha} not in (0,1)")));
    }
    if profile.len() < 2 {
        return Err(EntropyError::NonDyadicGrid);
    }
    for w in profile.windows(2) {
        if ((w[0].0 / w[1].0) - 2.0).abs() > 1e-9 {
            return Err(EntropyError::NonDyadicGrid);
        }
    }
    let violations: Vec<(f64, f64, f64)> = profile
        .windows(2)
        .filter(|w| w[0].1 > alpha * w[1].1 + tol)
        .map(|w| (w[0].0, w[0].1, w[1].1))
        .collect();
    let outcome = if !violations.is_empty() {
        AiOutcome::Violated
    } else if profile.iter().all(|p| p.1 <= tol) {
        AiOutcome::Consistent
    } else {
        AiOutcome::Divergent
    };
    Ok(AiVerdict {
        outcome,
        violations,
    })
}
