use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::schedule::{is_subexponential, Schedule, SubexpCertificate};
use super::sequence::{log_plus_count, BarcodeSequence};
use super::EntropyError;

/// Inclusive k-range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: u32,
    pub hi: u32,
}

impl Window {
    pub fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi }
    }

    pub fn all() -> Self {
        Self { lo: 1, hi: u32::MAX }
    }

    pub fn contains(&self, k: u32) -> bool {
        (self.lo..=self.hi).contains(&k)
    }
}

/// Growth-rate fit of log₂ b against k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Clamped slope in bits per iteration.
    pub value: f64,
    /// Unclamped least-squares slope, 0 when no fit was possible.
    pub raw_slope: f64,
    pub intercept: f64,
    /// Root mean square residual of the fit.
    pub residual: f64,
    /// Secondary estimator: max of log⁺b / k over the window.
    pub max_rate: f64,
    pub window: Window,
    /// (k, b) pairs that entered the window.
    pub points: Vec<(u32, u128)>,
}

/// Fits the slope of log₂ b over the points with b > 0.
pub(crate) fn fit_counts(points: Vec<(u32, u128)>, window: Window) -> SlopeFit {
    let max_rate = points
        .iter()
        .map(|&(k, b)| log_plus_count(b) / k as f64)
        .fold(0.0, f64::max);
    let positive: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0)
        .map(|&(k, b)| (k as f64, (b as f64).log2()))
        .collect();
    let constant = positive.windows(2).all(|w| w[0].1 == w[1].1);
    let mut fit = SlopeFit {
        value: 0.0,
        raw_slope: 0.0,
        intercept: positive.first().map(|p| p.1).unwrap_or(0.0),
        residual: 0.0,
        max_rate,
        window,
        points,
    };
    if positive.len() < 2 || constant {
        return fit;
    }
    let n = positive.len() as f64;
    let mx = positive.iter().map(|p| p.0).sum::<f64>() / n;
    let my = positive.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = positive.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = positive.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = positive
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    fit.raw_slope = slope;
    fit.intercept = intercept;
    fit.residual = (sse / n).sqrt();
    fit.value = slope.max(0.0);
    fit
}

fn window_ks(seq: &BarcodeSequence, window: Window) -> Result<Vec<u32>, EntropyError> {
    let ks: Vec<u32> = seq.ks().filter(|&k| window.contains(k)).collect();
    if ks.len() < 3 {
        return Err(EntropyError::WindowTooSmall {
            found: ks.len(),
            window,
        });
    }
    Ok(ks)
}

/// Slope estimate of ħ_ε: growth of log₂ b_ε(k) over the window.
pub fn epsilon_entropy(
    seq: &BarcodeSequence,
    eps: f64,
    window: Window,
) -> Result<SlopeFit, EntropyError> {
    let ks = window_ks(seq, window)?;
    let mut points = Vec::with_capacity(ks.len());
    for k in ks {
        points.push((k, seq.entries()[&k].b_eps(eps)?));
    }
    Ok(fit_counts(points, window))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    /// Max of the per-ε estimates.
    pub value: f64,
    pub profile: Vec<(f64, SlopeFit)>,
}

/// Max of [`epsilon_entropy`] over a strictly decreasing ε-grid.
pub fn barcode_entropy(
    seq: &BarcodeSequence,
    eps_grid: &[f64],
    window: Window,
) -> Result<EntropyProfile, EntropyError> {
    if eps_grid.is_empty() {
        return Err(EntropyError::EmptyGrid);
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) || eps_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(EntropyError::BadGrid);
    }
    let mut profile = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        profile.push((eps, epsilon_entropy(seq, eps, window)?));
    }
    let value = profile.iter().map(|p| p.1.value).fold(0.0, f64::max);
    Ok(EntropyProfile { value, profile })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialEstimate {
    pub schedule: Schedule,
    pub fit: SlopeFit,
    pub certificate: SubexpCertificate,
    /// Set when the schedule is not subexponential.
    pub tag: Option<String>,
}

/// Slope estimate of ĥ for a schedule: growth of log₂ b_{ε_k}(k).
pub fn sequential_entropy(
    seq: &BarcodeSequence,
    schedule: &Schedule,
    window: Window,
) -> Result<SequentialEstimate, EntropyError> {
    let certificate = is_subexponential(schedule)?;
    let ks = window_ks(seq, window)?;
    let mut points = Vec::with_capacity(ks.len());
    for k in ks {
        let eps = schedule
            .at(k)
            .ok_or(EntropyError::ScheduleRangeMismatch(k))?;
        points.push((k, seq.entries()[&k].b_eps(eps)?));
    }
    let tag = (!certificate.subexponential)
        .then(|| "non-subexponential, growth theorem inapplicable".to_string());
    Ok(SequentialEstimate {
        schedule: schedule.clone(),
        fit: fit_counts(points, window),
        certificate,
        tag,
    })
}

/// Ordering verdict between two schedules with ε′ ⪯ ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub smaller: usize,
    pub larger: usize,
    pub smaller_estimate: f64,
    pub larger_estimate: f64,
    pub holds: bool,
}

/// For every pair with pointwise-smaller schedule, checks
/// estimate(smaller) ≥ estimate(larger) − tol.
pub fn order_verdicts(
    estimates: &[SequentialEstimate],
    ks: &[u32],
    tol: f64,
) -> Vec<OrderVerdict> {
    let mut out = Vec::new();
    for (i, a) in estimates.iter().enumerate() {
        for (j, b) in estimates.iter().enumerate() {
            if i != j && a.schedule.is_below(&b.schedule, ks.iter().copied()) && a.schedule != b.schedule {
                out.push(OrderVerdict {
                    smaller: i,
                    larger: j,
                    smaller_estimate: a.fit.value,
                    larger_estimate: b.fit.value,
                    holds: a.fit.value >= b.fit.value - tol,
                });
            }
        }
    }
    out
}

/// Per-k shortest finite bar; barcodes without finite bars are omitted.
pub fn shortest_bar_series(seq: &BarcodeSequence) -> BTreeMap<u32, f64> {
    seq.entries()
        .iter()
        .filter_map(|(&k, b)| b.shortest_bar().map(|s| (k, s)))
        .collect()
}
