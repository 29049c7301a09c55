use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSpace {
    Cylinder,
    Torus,
}

/// Standard map x′ = x + y − (K/2π) sin 2πx, y′ = y − (K/2π) sin 2πx,
/// generated by h(x, x′) = (x′ − x)²/2 + (K/4π²) cos 2πx.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistMapSpec {
    #[serde(rename = "K")]
    pub kick: f64,
    pub phase_space: PhaseSpace,
    /// Description of the lift used for unwrapped coordinates.
    pub lift: String,
}

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Operator 2-norm of a 2×2 matrix.
pub fn op_norm(a: &Mat2) -> f64 {
    let s = a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2);
    let d = det(a);
    ((s + (s * s - 4.0 * d * d).max(0.0).sqrt()) / 2.0).sqrt()
}

impl TwistMapSpec {
    pub fn new(kick: f64, phase_space: PhaseSpace) -> Self {
        Self {
            kick,
            phase_space,
            lift: "x in R covers x mod 1; y in R covers y mod 1 on the torus".into(),
        }
    }

    pub fn torus(kick: f64) -> Self {
        Self::new(kick, PhaseSpace::Torus)
    }

    /// Kick amplitude K/2π.
    pub fn amplitude(&self) -> f64 {
        self.kick / (2.0 * PI)
    }

    /// Force f(x) = (K/2π) sin 2πx, so y′ = y − f(x).
    pub fn force(&self, x: f64) -> f64 {
        self.amplitude() * (2.0 * PI * x).sin()
    }

    /// Potential V(x) = (K/4π²) cos 2πx.
    pub fn potential(&self, x: f64) -> f64 {
        self.kick / (4.0 * PI * PI) * (2.0 * PI * x).cos()
    }

    /// V″(x) = −K cos 2πx.
    pub fn potential_second(&self, x: f64) -> f64 {
        -self.kick * (2.0 * PI * x).cos()
    }

    pub fn generating(&self, x: f64, x_next: f64) -> f64 {
        0.5 * (x_next - x).powi(2) + self.potential(x)
    }

    pub fn tangent(&self, x: f64) -> Mat2 {
        let kc = self.kick * (2.0 * PI * x).cos();
        [[1.0 - kc, 1.0], [-kc, 1.0]]
    }

    /// One step in the lift ℝ², no wrapping.
    pub fn lift_apply(&self, p: [f64; 2]) -> [f64; 2] {
        let y = p[1] - self.force(p[0]);
        [p[0] + y, y]
    }

    /// Inverse step in the lift.
    pub fn lift_inverse(&self, p: [f64; 2]) -> [f64; 2] {
        let x = p[0] - p[1];
        [x, p[1] + self.force(x)]
    }

    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        match self.phase_space {
            PhaseSpace::Cylinder => [p[0].rem_euclid(1.0), p[1]],
            PhaseSpace::Torus => [p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)],
        }
    }

    /// Sup over the phase space of the operator norm of the tangent map.
    pub fn lipschitz(&self) -> f64 {
        // The norm depends on cos 2πx only and is convex in it.
        let at = |c: f64| op_norm(&[[1.0 - self.kick * c, 1.0], [-self.kick * c, 1.0]]);
        at(1.0).max(at(-1.0))
    }
}

/// Image point, wrapped into the phase space, and the tangent map.
pub fn map_apply(spec: &TwistMapSpec, point: [f64; 2]) -> ([f64; 2], Mat2) {
    (spec.wrap(spec.lift_apply(point)), spec.tangent(point[0]))
}

/// k steps with the composed tangent map.
pub fn map_iterate(spec: &TwistMapSpec, point: [f64; 2], k: usize) -> ([f64; 2], Mat2) {
    let mut p = point;
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for _ in 0..k {
        m = mat_mul(&spec.tangent(p[0]), &m);
        p = spec.lift_apply(p);
    }
    (spec.wrap(p), m)
}
