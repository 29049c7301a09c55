//! Crofton bench: intersection counts of iterated curves against a family
//! of vertical translates, and the length lower bound they imply.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{is_subexponential, log_plus, EntropyError, Schedule, SubexpCertificate};
use crate::twist::{
    count_intersections, iterate_curve, CurveError, PhaseSpace, Polyline, RefineOptions,
    TwistMapSpec,
};

pub const MIN_QUADRATURE: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CroftonError {
    #[error("quadrature needs at least {MIN_QUADRATURE} nodes, got {0}")]
    TooFewNodes(usize),
    #[error("counts jump by {max_jump} between neighbouring nodes (bound {bound}); try quadrature_n ≥ {suggested_n}")]
    QuadratureUnstable {
        max_jump: usize,
        bound: f64,
        suggested_n: usize,
    },
    #[error("curve iteration stopped at k = {0} on the vertex budget")]
    BudgetExhausted(usize),
    #[error("empty k range")]
    EmptyRange,
    #[error("schedule has no value at k = {0}")]
    ScheduleGap(u32),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Schedule(#[from] EntropyError),
}

/// Translates L_s = L + (0, s) of a closed curve on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographFamily {
    pub base: Polyline,
    /// Radius of the parameter ball.
    pub radius: f64,
    /// Displacement area per unit of s.
    pub c_h: f64,
    pub c_cr: f64,
    /// Dimension of the parameter space.
    pub d: usize,
}

impl TomographFamily {
    pub fn translates(base: Polyline) -> Self {
        let c_h = horizontal_extent(&base);
        Self {
            base,
            radius: 0.5,
            c_h,
            c_cr: 1.0,
            d: 1,
        }
    }

    /// Translates of the circle y = 0.
    pub fn zero_section(vertices: usize) -> Self {
        Self::translates(Polyline::horizontal_circle(0.0, vertices))
    }

    pub fn member(&self, s: f64) -> Polyline {
        let v: Vec<[f64; 2]> = self.base.vertices().iter().map(|p| [p[0], p[1] + s]).collect();
        let mut curve = Polyline::new(v, self.base.closure()).expect("translate of a valid curve");
        curve.budget = self.base.budget;
        curve
    }

    /// Area swept between L_0 and L_s.
    pub fn displacement_area(&self, s: f64) -> f64 {
        s.abs() * horizontal_extent(&self.base)
    }

    /// Height of the base when it is a horizontal curve.
    fn level(&self) -> Option<f64> {
        let y0 = self.base.vertices()[0][1];
        let flat = self.base.vertices().iter().all(|p| p[1] == y0)
            && self.base.closure().is_some_and(|c| c[1] == 0.0);
        flat.then_some(y0)
    }
}

/// Width of the x-projection of a curve, at most one period.
pub fn horizontal_extent(curve: &Polyline) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (a, b) in curve.segments() {
        for p in [a, b] {
            lo = lo.min(p[0]);
            hi = hi.max(p[0]);
        }
    }
    (hi - lo).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CroftonEstimate {
    pub k: usize,
    pub quadrature_n: usize,
    /// Midpoint rule for ∫ N(s) ds over one period of translates.
    pub integral: f64,
    pub length: f64,
    pub ratio: f64,
    /// Total variation of y along the curve, which equals the integral.
    pub y_variation: f64,
    /// Allowed gap between integral and y-variation, 2·length/quadrature_n.
    pub identity_tolerance: f64,
    pub counts: Vec<usize>,
}

impl CroftonEstimate {
    pub fn identity_holds(&self) -> bool {
        (self.integral - self.y_variation).abs() <= self.identity_tolerance
    }
}

/// Crofton integral of φ^k(L) against the translates of L.
pub fn crofton_integral(
    spec: &TwistMapSpec,
    k: usize,
    family: &TomographFamily,
    quadrature_n: usize,
) -> Result<CroftonEstimate, CroftonError> {
    if quadrature_n < MIN_QUADRATURE {
        return Err(CroftonError::TooFewNodes(quadrature_n));
    }
    let it = iterate_curve(spec, &family.base, k, RefineOptions::default())?;
    if it.budget_exhausted {
        return Err(CroftonError::BudgetExhausted(it.lengths.len() - 1));
    }
    crofton_on_curve(&it.curves[0], family, quadrature_n, k)
}

/// Crofton integral of a given curve against the translates.
pub fn crofton_on_curve(
    curve: &Polyline,
    family: &TomographFamily,
    quadrature_n: usize,
    k: usize,
) -> Result<CroftonEstimate, CroftonError> {
    if quadrature_n < MIN_QUADRATURE {
        return Err(CroftonError::TooFewNodes(quadrature_n));
    }
    let h = 1.0 / quadrature_n as f64;
    let counts: Vec<usize> = (0..quadrature_n)
        .map(|j| {
            let s = (j as f64 + 0.5) * h;
            count_intersections(&family.member(s), curve, PhaseSpace::Torus)
        })
        .collect();
    let total: usize = counts.iter().sum();
    let mean = total as f64 / quadrature_n as f64;
    let max_jump = counts
        .iter()
        .zip(counts.iter().cycle().skip(1))
        .map(|(a, b)| a.abs_diff(*b))
        .max()
        .unwrap_or(0);
    let bound = JUMP_FLOOR.max(JUMP_FRACTION * mean);
    if max_jump as f64 > bound {
        let factor = (max_jump as f64 / bound).ceil() as usize;
        return Err(CroftonError::QuadratureUnstable {
            max_jump,
            bound,
            suggested_n: quadrature_n * 2 * factor,
        });
    }
    let length = curve.length();
    let integral = total as f64 * h;
    Ok(CroftonEstimate {
        k,
        quadrature_n,
        integral,
        length,
        ratio: integral / length,
        y_variation: curve.y_variation(),
        identity_tolerance: 2.0 * length / quadrature_n as f64,
        counts,
    })
}

/// Neighbouring nodes may differ by this many crossings, or by this fraction
/// of the mean count, whichever is larger.
pub const JUMP_FLOOR: f64 = 4.0;
pub const JUMP_FRACTION: f64 = 0.5;

/// Piecewise constant N(s) for a horizontal family over the window
/// [level − δ, level + δ): (min, integral).
fn ball_profile(curve: &Polyline, level: f64, delta: f64) -> (usize, f64) {
    let lo_w = level - delta;
    let width = 2.0 * delta;
    let mut events: Vec<(f64, i64)> = Vec::new();
    for (a, b) in curve.segments() {
        if a[1] == b[1] {
            continue;
        }
        let (lo, hi) = (a[1].min(b[1]), a[1].max(b[1]));
        // translates of the window meeting [lo, hi)
        let j0 = (lo - lo_w - width).floor() as i64;
        let j1 = (hi - lo_w).ceil() as i64;
        for j in j0..=j1 {
            let start = lo_w + j as f64;
            let s = (lo - start).max(0.0);
            let e = (hi - start).min(width);
            if s < e {
                events.push((s, 1));
                events.push((e, -1));
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut n: i64 = 0;
    let mut t = 0.0;
    let mut min = i64::MAX;
    let mut integral = 0.0;
    let mut i = 0;
    while i < events.len() {
        let at = events[i].0;
        if at > t {
            min = min.min(n);
            integral += n as f64 * (at - t);
            t = at;
        }
        while i < events.len() && events[i].0 == at {
            n += events[i].1;
            i += 1;
        }
    }
    if t < width {
        min = min.min(n);
        integral += n as f64 * (width - t);
    }
    (min.max(0) as usize, integral)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolbRow {
    pub k: u32,
    pub eps: f64,
    /// Ball radius δ_k = ε_k / 4C_H.
    pub delta: f64,
    pub vol_ball: f64,
    /// Minimum of N_k over the ball, standing in for b_{ε_k}.
    pub b_hat: usize,
    /// Mean of N_k over the ball.
    pub ball_mean: f64,
    pub length: f64,
    /// vol(B_k)·b̂ / C_Cr
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    /// log⁺ length / k
    pub length_rate: f64,
    /// log⁺ b̂ / k
    pub count_rate: f64,
    /// d·log₂ε_k / k
    pub slope_term: f64,
    /// Set when the minimum and mean were computed exactly.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolbReport {
    pub rows: Vec<VolbRow>,
    pub schedule: Schedule,
    pub certificate: SubexpCertificate,
    pub warning: Option<String>,
    /// What stands in for b_{ε_k}.
    pub surrogate: String,
    pub d: usize,
    pub c_h: f64,
    pub c_cr: f64,
}

impl VolbReport {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }
}

const SAMPLED_BALL_NODES: usize = 256;

/// Checks length(φ^k L) ≥ vol(B_k)·b̂_k / C_Cr along a schedule.
pub fn volb_chain_check(
    spec: &TwistMapSpec,
    k_range: RangeInclusive<u32>,
    schedule: &Schedule,
    family: &TomographFamily,
) -> Result<VolbReport, CroftonError> {
    if k_range.is_empty() {
        return Err(CroftonError::EmptyRange);
    }
    schedule.validate()?;
    let certificate = is_subexponential(schedule)?;
    let warning = (!certificate.subexponential).then(|| {
        "schedule is not subexponential: the slope term does not vanish and bounds only hold with the shortest-bar correction".to_string()
    });
    let k_max = *k_range.end() as usize;
    let opts = RefineOptions {
        keep_curves: true,
        ..RefineOptions::default()
    };
    let it = iterate_curve(spec, &family.base, k_max, opts)?;
    if it.budget_exhausted {
        return Err(CroftonError::BudgetExhausted(it.lengths.len() - 1));
    }
    let d = family.d as f64;
    let mut rows = Vec::new();
    for k in k_range {
        let eps = schedule.at(k).ok_or(CroftonError::ScheduleGap(k))?;
        let delta = (eps / (4.0 * family.c_h)).min(family.radius);
        let vol_ball = 2.0 * delta;
        let curve = &it.curves[k as usize];
        let (b_hat, ball_mean, exact) = match family.level() {
            Some(y0) => {
                let (min, integral) = ball_profile(curve, y0, delta);
                (min, integral / vol_ball, true)
            }
            None => {
                let counts: Vec<usize> = (0..SAMPLED_BALL_NODES)
                    .map(|j| {
                        let s = -delta + (j as f64 + 0.5) * vol_ball / SAMPLED_BALL_NODES as f64;
                        count_intersections(&family.member(s), curve, PhaseSpace::Torus)
                    })
                    .collect();
                let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
                (counts.into_iter().min().unwrap_or(0), mean, false)
            }
        };
        let length = curve.length();
        let rhs = vol_ball * b_hat as f64 / family.c_cr;
        let kf = k.max(1) as f64;
        rows.push(VolbRow {
            k,
            eps,
            delta,
            vol_ball,
            b_hat,
            ball_mean,
            length,
            rhs,
            slack: length - rhs,
            satisfied: length >= rhs,
            length_rate: log_plus(length) / kf,
            count_rate: log_plus(b_hat as f64) / kf,
            slope_term: d * eps.log2() / kf,
            exact,
        });
    }
    Ok(VolbReport {
        rows,
        schedule: schedule.clone(),
        certificate,
        warning,
        surrogate: "minimum intersection count over the parameter ball".into(),
        d: family.d,
        c_h: family.c_h,
        c_cr: family.c_cr,
    })
}

/// Writes the verdict table of a vol-b check as CSV.
pub fn write_volb_csv<W: std::io::Write>(report: &VolbReport, writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "k_iterations",
        "eps_action_units",
        "delta_translation_units",
        "vol_ball_translation_units",
        "b_hat_bars",
        "ball_mean_crossings",
        "length_phase_units",
        "rhs_phase_units",
        "slack_phase_units",
        "satisfied_bool",
        "length_rate_bits_per_iteration",
        "count_rate_bits_per_iteration",
        "slope_term_bits_per_iteration",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.k.to_string(),
            r.eps.to_string(),
            r.delta.to_string(),
            r.vol_ball.to_string(),
            r.b_hat.to_string(),
            r.ball_mean.to_string(),
            r.length.to_string(),
            r.rhs.to_string(),
            r.slack.to_string(),
            r.satisfied.to_string(),
            r.length_rate.to_string(),
            r.count_rate.to_string(),
            r.slope_term.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
