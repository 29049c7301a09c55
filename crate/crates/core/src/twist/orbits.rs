use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::map::{mat_mul, Mat2, TwistMapSpec};

pub const NONDEGENERACY_THRESHOLD: f64 = 1e-8;
pub const DEDUP_TOLERANCE: f64 = 1e-6;
const GRADIENT_TOLERANCE: f64 = 1e-11;

/// One k-periodic orbit of rotation class m as a critical point of W_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub k: usize,
    pub m: i64,
    /// Lifted configuration x_0 … x_{k−1}, with x_k = x_0 + m.
    pub points: Vec<f64>,
    pub action: f64,
    pub morse_index: usize,
    pub residue: f64,
    pub hyperbolic: bool,
    pub nondegenerate: bool,
    /// Trace of the k-step tangent map.
    pub trace: f64,
    pub hessian_det: f64,
    /// Number of distinct phase points on the orbit.
    pub minimal_period: usize,
}

impl OrbitRecord {
    /// Phase point (x_0, y_0) with y_0 = x_1 − x_0 + f(x_0).
    pub fn phase_point(&self, spec: &TwistMapSpec) -> [f64; 2] {
        let x = &self.points;
        let x1 = if self.k > 1 { x[1] } else { x[0] + self.m as f64 };
        [x[0], x1 - x[0] + spec.force(x[0])]
    }
}

/// Discrete action W_k = Σ h(x_i, x_{i+1}) with x_k = x_0 + m.
pub fn action(spec: &TwistMapSpec, x: &[f64], m: i64) -> f64 {
    let k = x.len();
    (0..k)
        .map(|i| {
            let next = if i + 1 < k { x[i + 1] } else { x[0] + m as f64 };
            spec.generating(x[i], next)
        })
        .sum()
}

/// ∇W_k: 2x_i − x_{i−1} − x_{i+1} + V′(x_i), with V′ = −f.
pub fn gradient(spec: &TwistMapSpec, x: &[f64], m: i64) -> Vec<f64> {
    let k = x.len();
    let mf = m as f64;
    (0..k)
        .map(|i| {
            let prev = if i == 0 { x[k - 1] - mf } else { x[i - 1] };
            let next = if i + 1 == k { x[0] + mf } else { x[i + 1] };
            2.0 * x[i] - prev - next - spec.force(x[i])
        })
        .collect()
}

/// Hessian of W_k: 2 + V″ on the diagonal, −1 to each cyclic neighbour.
pub fn hessian(spec: &TwistMapSpec, x: &[f64]) -> DMatrix<f64> {
    let k = x.len();
    let mut h = DMatrix::zeros(k, k);
    for i in 0..k {
        h[(i, i)] += 2.0 + spec.potential_second(x[i]);
        h[(i, (i + 1) % k)] -= 1.0;
        h[(i, (i + k - 1) % k)] -= 1.0;
    }
    h
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Newton iteration on ∇W_k with backtracking. `None` on divergence.
pub fn newton(spec: &TwistMapSpec, seed: &[f64], m: i64) -> Option<Vec<f64>> {
    let k = seed.len();
    let mut x = seed.to_vec();
    let mut g = gradient(spec, &x, m);
    let mut gn = sup_norm(&g);
    for _ in 0..100 {
        if gn <= GRADIENT_TOLERANCE {
            return Some(x);
        }
        let h = hessian(spec, &x);
        let rhs = DVector::from_iterator(k, g.iter().map(|v| -v));
        let step = match h.clone().lu().solve(&rhs) {
            Some(s) if s.iter().all(|v| v.is_finite()) && s.amax() < 1e6 => s,
            _ => h.svd(true, true).solve(&rhs, 1e-10).ok()?,
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let tg = gradient(spec, &trial, m);
            let tn = sup_norm(&tg);
            if tn < gn || tn <= GRADIENT_TOLERANCE {
                x = trial;
                g = tg;
                gn = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    (gn <= GRADIENT_TOLERANCE).then_some(x)
}

/// Cyclic shift by j in the lift, translated so that the first entry lies
/// in [0, 1).
fn shifted(x: &[f64], m: i64, j: usize) -> Vec<f64> {
    let k = x.len();
    let mut y: Vec<f64> = (0..k)
        .map(|i| {
            let s = i + j;
            if s < k {
                x[s]
            } else {
                x[s - k] + m as f64
            }
        })
        .collect();
    let t = y[0].floor();
    for v in &mut y {
        *v -= t;
    }
    y
}

/// Lexicographically minimal normalized cyclic shift.
pub fn canonical(x: &[f64], m: i64) -> Vec<f64> {
    (0..x.len())
        .map(|j| shifted(x, m, j))
        .min_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("k ≥ 1")
}

/// Same orbit up to cyclic shift and integer translation.
pub fn same_orbit(a: &[f64], b: &[f64], m: i64) -> bool {
    (0..a.len()).any(|j| {
        let s = shifted(a, m, j);
        let t = (s[0] - b[0]).round();
        s.iter().zip(b).all(|(p, q)| (p - q - t).abs() < DEDUP_TOLERANCE)
    })
}

fn minimal_period(x: &[f64], m: i64) -> usize {
    let k = x.len();
    (1..=k)
        .filter(|q| k % q == 0)
        .find(|&q| {
            // shift by q must act as an integer translation
            let s: Vec<f64> = (0..k)
                .map(|i| if i + q < k { x[i + q] } else { x[i + q - k] + m as f64 })
                .collect();
            let t = (s[0] - x[0]).round();
            s.iter()
                .zip(x)
                .all(|(p, v)| (p - v - t).abs() < DEDUP_TOLERANCE)
        })
        .unwrap_or(k)
}

/// Product of tangent maps along the orbit, last step leftmost.
pub fn monodromy(spec: &TwistMapSpec, x: &[f64]) -> Mat2 {
    x.iter().fold([[1.0, 0.0], [0.0, 1.0]], |acc, &xi| {
        mat_mul(&spec.tangent(xi), &acc)
    })
}

pub fn make_record(spec: &TwistMapSpec, x: &[f64], m: i64) -> OrbitRecord {
    let points = canonical(x, m);
    let k = points.len();
    let h = hessian(spec, &points);
    let eig = h.clone().symmetric_eigen();
    let morse_index = eig.eigenvalues.iter().filter(|&&v| v < 0.0).count();
    let hessian_det = h.determinant();
    let mono = monodromy(spec, &points);
    let trace = mono[0][0] + mono[1][1];
    let residue = (2.0 - trace) / 4.0;
    OrbitRecord {
        k,
        m,
        action: action(spec, &points, m),
        morse_index,
        residue,
        hyperbolic: trace.abs() > 2.0,
        nondegenerate: hessian_det.abs() > NONDEGENERACY_THRESHOLD,
        trace,
        hessian_det,
        minimal_period: minimal_period(&points, m),
        points,
    }
}

/// Seed families for the Newton search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeding {
    /// Half-integer configurations with bounded second differences.
    pub symbolic: bool,
    pub random: usize,
    pub seed: u64,
    /// Cap on symbolic seeds per class; larger families are subsampled.
    pub max_symbolic: usize,
    /// Extra half-units allowed in the second differences of symbolic seeds.
    pub slack: i64,
}

impl Default for Seeding {
    fn default() -> Self {
        Self {
            symbolic: true,
            random: 0,
            seed: 0,
            max_symbolic: 200_000,
            slack: 2,
        }
    }
}

/// Half-integer seeds x_i = s_i/2 of class m with |Δ²s| ≤ ⌊K/π⌋.
///
/// These are the anti-integrable configurations: |Δ²x| ≤ K/2π is forced by
/// the orbit equation, and the kick's critical points sit at half-integers.
/// Only one rotation of each second-difference pattern is kept.
pub fn symbolic_seeds(
    spec: &TwistMapSpec,
    k: usize,
    m: i64,
    slack: i64,
    cap: usize,
) -> Vec<Vec<f64>> {
    let base = (spec.kick / std::f64::consts::PI).floor() as i64;
    let mut e_max = base + slack;
    // keep the raw enumeration tractable
    while e_max > base && ((2 * e_max + 1) as f64).powi(k as i32 - 1) > MAX_ENUMERATION {
        e_max -= 1;
    }
    let mut out = Vec::new();
    let mut e = vec![-e_max; k];
    loop {
        // e[0] closes the period: Σ e = 0
        let rest: i64 = e[1..].iter().sum();
        let e0 = -rest;
        if e0.abs() <= e_max {
            let mut pattern = e.clone();
            pattern[0] = e0;
            if is_min_rotation(&pattern) {
                // S = Σ_{i=1}^{k−1} Σ_{j=1}^{i} e_j
                let mut s_sum = 0i64;
                let mut run = 0i64;
                for &ej in &pattern[1..] {
                    run += ej;
                    s_sum += run;
                }
                let num = 2 * m - s_sum;
                if num.rem_euclid(k as i64) == 0 {
                    let d0 = num / k as i64;
                    for s0 in 0..2 {
                        out.push(rebuild(&pattern, d0, s0, k));
                    }
                }
            }
        }
        // advance e[1..] as a base-(2E+1) counter
        let mut i = 1;
        while i < k {
            if e[i] < e_max {
                e[i] += 1;
                break;
            }
            e[i] = -e_max;
            i += 1;
        }
        if i >= k {
            break;
        }
    }
    if cap > 0 && out.len() > cap {
        let stride = out.len().div_ceil(cap);
        out = out.into_iter().step_by(stride).collect();
    }
    out
}

const MAX_ENUMERATION: f64 = 5e7;

/// s_0 = s0, s_{i+1} = s_i + D_i with D_0 = d0 and D_i = D_{i−1} + e_i.
fn rebuild(pattern: &[i64], d0: i64, s0: i64, k: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(k);
    let mut s = s0;
    let mut d = d0;
    for i in 0..k {
        x.push(s as f64 / 2.0);
        s += d;
        if i + 1 < k {
            d += pattern[i + 1];
        }
    }
    x
}

fn is_min_rotation(p: &[i64]) -> bool {
    let k = p.len();
    (1..k).all(|j| {
        let rot = p[j..].iter().chain(&p[..j]);
        p.iter().cmp(rot) != std::cmp::Ordering::Greater
    })
}

/// A priori bound on |x_i − x_0 − i·m/k| at critical points.
pub fn deviation_bound(spec: &TwistMapSpec, k: usize) -> f64 {
    spec.amplitude() * ((k * k) as f64 / 8.0).ceil()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSet {
    pub k: usize,
    pub orbits: Vec<OrbitRecord>,
    pub seeds_tried: usize,
    /// Seeds whose Newton iteration failed.
    pub divergences: usize,
}

impl OrbitSet {
    /// Periodic points over nondegenerate orbits of class m.
    pub fn p_of_class(&self, m: i64) -> usize {
        self.orbits
            .iter()
            .filter(|o| o.m == m && o.nondegenerate)
            .map(|o| o.minimal_period)
            .sum()
    }

    /// Periodic points over all nondegenerate orbits.
    pub fn p_total(&self) -> usize {
        self.orbits
            .iter()
            .filter(|o| o.nondegenerate)
            .map(|o| o.minimal_period)
            .sum()
    }

    pub fn of_class(&self, m: i64) -> impl Iterator<Item = &OrbitRecord> {
        self.orbits.iter().filter(move |o| o.m == m)
    }
}

/// Finds k-periodic orbits by Newton's method on ∇W_k for each class in
/// `m_range`, deduplicated under cyclic shift and integer translation.
pub fn periodic_orbits(
    spec: &TwistMapSpec,
    k: usize,
    m_range: &[i64],
    seeding: &Seeding,
) -> OrbitSet {
    assert!(k >= 1, "period must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seeding.seed);
    let mut orbits: Vec<OrbitRecord> = Vec::new();
    let mut seeds_tried = 0;
    let mut divergences = 0;
    for &m in m_range {
        let mut seeds = Vec::new();
        if seeding.symbolic {
            seeds.extend(symbolic_seeds(spec, k, m, seeding.slack, seeding.max_symbolic));
        }
        let r = deviation_bound(spec, k) + 0.5;
        for _ in 0..seeding.random {
            let x0: f64 = rng.random_range(0.0..1.0);
            let x: Vec<f64> = (0..k)
                .map(|i| {
                    let drift = x0 + i as f64 * m as f64 / k as f64;
                    if i == 0 {
                        drift
                    } else {
                        drift + rng.random_range(-r..=r)
                    }
                })
                .collect();
            seeds.push(x);
        }
        // buckets keyed by rounded action
        let mut buckets: HashMap<i64, Vec<usize>> = HashMap::new();
        let key = |a: f64| (a / 1e-5).round() as i64;
        for seed in seeds {
            seeds_tried += 1;
            let Some(x) = newton(spec, &seed, m) else {
                divergences += 1;
                continue;
            };
            let a = action(spec, &x, m);
            let kk = key(a);
            let dup = (kk - 1..=kk + 1).any(|b| {
                buckets
                    .get(&b)
                    .is_some_and(|ids| ids.iter().any(|&i| same_orbit(&x, &orbits[i].points, m)))
            });
            if !dup {
                buckets.entry(kk).or_default().push(orbits.len());
                orbits.push(make_record(spec, &x, m));
            }
        }
    }
    orbits.sort_by(|a, b| {
        a.m.cmp(&b.m)
            .then(a.action.total_cmp(&b.action))
            .then_with(|| {
                a.points
                    .iter()
                    .zip(&b.points)
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    OrbitSet {
        k,
        orbits,
        seeds_tried,
        divergences,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Census {
    pub total: usize,
    pub hyperbolic: usize,
    pub elliptic: usize,
    pub degenerate: usize,
}

/// Counts orbits by type; degenerate orbits are counted only as degenerate.
pub fn orbit_census<'a>(orbits: impl IntoIterator<Item = &'a OrbitRecord>) -> Census {
    let mut c = Census::default();
    for o in orbits {
        c.total += 1;
        if !o.nondegenerate {
            c.degenerate += 1;
        } else if o.hyperbolic {
            c.hyperbolic += 1;
        } else {
            c.elliptic += 1;
        }
    }
    c
}
