use crate::twist::{gradient, TwistMapSpec};

pub(crate) const MAX_K: usize = 8;

/// Vertex grid on S¹ × [−R, R]^{k−1}.
///
/// Axis 0 samples x_0 mod 1 periodically; axis i ≥ 1 samples
/// u_i = x_i − x_0 − i·m/k at n points including both ends of [−R, R].
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub k: usize,
    pub n: usize,
    pub m: i64,
    pub radius: f64,
    strides: [usize; MAX_K],
}

impl Grid {
    pub fn new(k: usize, n: usize, m: i64, radius: f64) -> Self {
        let mut strides = [0; MAX_K];
        let mut s = 1;
        for st in strides.iter_mut().take(k) {
            *st = s;
            s *= n;
        }
        Self {
            k,
            n,
            m,
            radius,
            strides,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    pub fn spacing(&self) -> f64 {
        if self.n > 1 {
            2.0 * self.radius / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    /// Diameter of a top cell in (x_0, u) coordinates.
    pub fn cell_diameter(&self) -> f64 {
        let h = self.spacing();
        ((1.0 / self.n as f64).powi(2) + (self.k - 1) as f64 * h * h).sqrt()
    }

    pub fn coord(&self, v: usize, axis: usize) -> usize {
        (v / self.strides[axis]) % self.n
    }

    /// Neighbour along an axis; the circle axis wraps, box axes stop.
    pub fn step(&self, v: usize, axis: usize, dir: i8) -> Option<usize> {
        let c = self.coord(v, axis);
        let s = self.strides[axis];
        match (axis, dir > 0) {
            (0, true) if c + 1 == self.n => Some(v + 1 - self.n),
            (0, false) if c == 0 => Some(v + self.n - 1),
            (_, true) if c + 1 < self.n => Some(v + s),
            (_, false) if c > 0 => Some(v - s),
            _ => None,
        }
    }

    /// Lifted configuration x_0 … x_{k−1} of a vertex.
    pub fn config(&self, v: usize) -> Vec<f64> {
        let x0 = self.coord(v, 0) as f64 / self.n as f64;
        let h = self.spacing();
        (0..self.k)
            .map(|i| {
                if i == 0 {
                    x0
                } else {
                    let u = -self.radius + self.coord(v, i) as f64 * h;
                    x0 + i as f64 * self.m as f64 / self.k as f64 + u
                }
            })
            .collect()
    }
}

/// Upper bound for W_k at critical points of class m.
///
/// At a critical point the steps D_i = x_{i+1} − x_i change by −f(x_i),
/// with |f| ≤ A = K/2π and mean m/k, so the kinetic part is at most
/// m²/2k + ½·A²·max Σδ_i² over mean-free δ whose cyclic increments lie in
/// [−1, 1]. That maximum is convex, hence attained at increments in
/// {−1, 0, 1}, which are enumerated.
pub(crate) fn critical_value_bound(spec: &TwistMapSpec, k: usize, m: i64) -> f64 {
    let kf = k as f64;
    let mut best: f64 = 0.0;
    let mut s = vec![-1i8; k];
    loop {
        if s.iter().map(|&v| v as i32).sum::<i32>() == 0 {
            let mut run = 0.0;
            let walk: Vec<f64> = s
                .iter()
                .map(|&v| {
                    run += v as f64;
                    run
                })
                .collect();
            let mean = walk.iter().sum::<f64>() / kf;
            best = best.max(walk.iter().map(|w| (w - mean).powi(2)).sum());
        }
        let mut i = 0;
        while i < k && s[i] == 1 {
            s[i] = -1;
            i += 1;
        }
        if i == k {
            break;
        }
        s[i] += 1;
    }
    let a = spec.amplitude();
    (m * m) as f64 / (2.0 * kf) + 0.5 * a * a * best + potential_sup(spec, k)
}

fn potential_sup(spec: &TwistMapSpec, k: usize) -> f64 {
    spec.kick.abs() * k as f64 / (4.0 * std::f64::consts::PI.powi(2))
}

/// Level above every critical value at which the sublevel set is cut.
pub(crate) const LEVEL_MARGIN: f64 = 0.25;

/// Smallest box half-width whose faces lie above `level`.
pub(crate) fn radius_for_level(spec: &TwistMapSpec, k: usize, m: i64, level: f64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let kf = k as f64;
    let need = level + potential_sup(spec, k) - (m * m) as f64 / (2.0 * kf);
    (kf * need.max(0.0) / 2.0).sqrt()
}

/// Lower bound for W_k on the faces |u_i| = R of the box, and outside it.
///
/// Along the configuration the displacement sums to i·m/k + u_i over the
/// first i steps and to the rest over the others; Cauchy–Schwarz on each
/// arc gives kinetic energy ≥ m²/2k + 2u²/k.
pub(crate) fn boundary_floor(spec: &TwistMapSpec, k: usize, m: i64, radius: f64) -> f64 {
    if k == 1 {
        return f64::INFINITY;
    }
    let kf = k as f64;
    (m * m) as f64 / (2.0 * kf) + 2.0 * radius * radius / kf - potential_sup(spec, k)
}

/// Gradient norm of W in (x_0, u) coordinates.
pub(crate) fn chart_gradient_norm(spec: &TwistMapSpec, x: &[f64], m: i64) -> f64 {
    let g = gradient(spec, x, m);
    let along: f64 = g.iter().sum();
    (along * along + g[1..].iter().map(|v| v * v).sum::<f64>()).sqrt()
}
