use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::map::TwistMapSpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve needs at least two vertices")]
    TooFewVertices,
    #[error("consecutive vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("curve must be closed")]
    NotClosed,
}

/// Polyline in lift coordinates.
///
/// A closed curve carries the lattice translation that takes its first
/// vertex to the point following its last one, so a closed loop on the
/// torus is one period of a translation-invariant curve in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    vertices: Vec<[f64; 2]>,
    closure: Option<[f64; 2]>,
    length: f64,
    /// Vertex budget for refinement.
    pub budget: usize,
}

pub const DEFAULT_BUDGET: usize = 4_000_000;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

impl Polyline {
    pub fn new(vertices: Vec<[f64; 2]>, closure: Option<[f64; 2]>) -> Result<Self, CurveError> {
        if vertices.len() < 2 {
            return Err(CurveError::TooFewVertices);
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(CurveError::RepeatedVertex(i, i + 1));
            }
        }
        let mut p = Self {
            vertices,
            closure,
            length: 0.0,
            budget: DEFAULT_BUDGET,
        };
        p.length = p.compute_length();
        Ok(p)
    }

    /// y = y0 on the torus, traversed once in x.
    pub fn horizontal_circle(y0: f64, n: usize) -> Self {
        let v = (0..n.max(2)).map(|i| [i as f64 / n.max(2) as f64, y0]).collect();
        Self::new(v, Some([1.0, 0.0])).expect("distinct vertices")
    }

    /// x = x0 on the torus, traversed once in y.
    pub fn vertical_circle(x0: f64, n: usize) -> Self {
        let v = (0..n.max(2)).map(|i| [x0, i as f64 / n.max(2) as f64]).collect();
        Self::new(v, Some([0.0, 1.0])).expect("distinct vertices")
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn closure(&self) -> Option<[f64; 2]> {
        self.closure
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn compute_length(&self) -> f64 {
        let mut l: f64 = self.vertices.windows(2).map(|w| dist(w[0], w[1])).sum();
        if let Some(c) = self.closure {
            l += dist(*self.vertices.last().unwrap(), add(self.vertices[0], c));
        }
        l
    }

    /// Segments as endpoint pairs, the closing segment included.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let closing = self
            .closure
            .map(|c| (*self.vertices.last().unwrap(), add(self.vertices[0], c)));
        self.vertices
            .windows(2)
            .map(|w| (w[0], w[1]))
            .chain(closing)
    }

    /// Total variation of y along the curve.
    pub fn y_variation(&self) -> f64 {
        self.segments().map(|(a, b)| (b[1] - a[1]).abs()).sum()
    }

    /// Point at parameter t ∈ [0, n) by linear interpolation.
    fn at(&self, t: f64) -> [f64; 2] {
        let n = self.vertices.len();
        let i = (t.floor() as usize).min(n - 1);
        let f = t - i as f64;
        let a = self.vertices[i];
        let b = if i + 1 < n {
            self.vertices[i + 1]
        } else {
            add(self.vertices[0], self.closure.expect("closed"))
        };
        [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    /// Maximal distance between adjacent image vertices.
    pub tolerance: f64,
    pub keep_curves: bool,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.01,
            keep_curves: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzStep {
    pub k: usize,
    /// Length of the previous polyline's vertices mapped once, unrefined.
    pub mapped_length: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveIteration {
    /// Lengths of L^0, L^1, … in phase-space units.
    pub lengths: Vec<f64>,
    pub vertex_counts: Vec<usize>,
    /// All iterates when requested, otherwise only the last one.
    pub curves: Vec<Polyline>,
    pub lipschitz: f64,
    pub lipschitz_steps: Vec<LipschitzStep>,
    /// Set when the vertex budget stopped the iteration early.
    pub budget_exhausted: bool,
}

impl CurveIteration {
    /// Slope of log₂ length against k over `lo..=hi`, bits per iteration.
    pub fn growth_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .lengths
            .iter()
            .enumerate()
            .filter(|(k, _)| (lo..=hi).contains(k))
            .map(|(k, l)| (k as f64, l.log2()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        Some(sxy / sxx)
    }
}

/// Lattice translation of the k-th image: F(p + (a, b)) = F(p) + (a + b, b).
fn image_closure(c: [f64; 2], k: usize) -> [f64; 2] {
    [c[0] + k as f64 * c[1], c[1]]
}

fn apply_n(spec: &TwistMapSpec, mut p: [f64; 2], k: usize) -> [f64; 2] {
    for _ in 0..k {
        p = spec.lift_apply(p);
    }
    p
}

/// Iterates a closed curve k times, refining so that adjacent image
/// vertices stay within the tolerance.
///
/// New vertices are images of new parameter values on the original curve.
/// On budget exhaustion the iterates computed so far are returned with the
/// flag set.
pub fn iterate_curve(
    spec: &TwistMapSpec,
    initial: &Polyline,
    k: usize,
    opts: RefineOptions,
) -> Result<CurveIteration, CurveError> {
    let closure = initial.closure.ok_or(CurveError::NotClosed)?;
    let lip = spec.lipschitz();
    let mut params: Vec<f64> = (0..initial.vertices.len()).map(|i| i as f64).collect();
    let mut images: Vec<[f64; 2]> = initial.vertices.clone();
    let mut out = CurveIteration {
        lengths: vec![initial.length],
        vertex_counts: vec![images.len()],
        curves: vec![initial.clone()],
        lipschitz: lip,
        lipschitz_steps: Vec::new(),
        budget_exhausted: false,
    };
    let n0 = initial.vertices.len() as f64;

    for j in 1..=k {
        let prev_len = *out.lengths.last().unwrap();
        for p in images.iter_mut() {
            *p = spec.lift_apply(*p);
        }
        let c = image_closure(closure, j);
        let mapped_length = polyline_length(&images, c);
        out.lipschitz_steps.push(LipschitzStep {
            k: j,
            mapped_length,
            lower: prev_len / lip,
            upper: prev_len * lip,
            within: mapped_length >= prev_len / lip * (1.0 - 1e-12)
                && mapped_length <= prev_len * lip * (1.0 + 1e-12),
        });

        let mut new_params = Vec::with_capacity(params.len() * 2);
        let mut new_images = Vec::with_capacity(images.len() * 2);
        let count = params.len();
        for i in 0..count {
            let (t0, p0) = (params[i], images[i]);
            let (t1, p1) = if i + 1 < count {
                (params[i + 1], images[i + 1])
            } else {
                (n0, add(images[0], c))
            };
            new_params.push(t0);
            new_images.push(p0);
            // refine (t0, t1) depth first, keeping order
            let mut stack = vec![(t0, p0, t1, p1, 0u32)];
            let mut pending: Vec<(f64, [f64; 2])> = Vec::new();
            while let Some((a, pa, b, pb, depth)) = stack.pop() {
                if dist(pa, pb) <= opts.tolerance || depth >= 48 || b - a < 1e-13 {
                    if a != t0 {
                        pending.push((a, pa));
                    }
                    continue;
                }
                let mid = 0.5 * (a + b);
                let pm = apply_n(spec, initial.at(mid), j);
                // right half first so the left half pops first
                stack.push((mid, pm, b, pb, depth + 1));
                stack.push((a, pa, mid, pm, depth + 1));
            }
            for (t, p) in pending {
                new_params.push(t);
                new_images.push(p);
            }
            if new_images.len() > initial.budget {
                out.budget_exhausted = true;
                return Ok(out);
            }
        }
        params = new_params;
        images = new_images;
        let len = polyline_length(&images, c);
        out.lengths.push(len);
        out.vertex_counts.push(images.len());
        let curve = Polyline {
            vertices: images.clone(),
            closure: Some(c),
            length: len,
            budget: initial.budget,
        };
        if opts.keep_curves {
            out.curves.push(curve);
        } else {
            out.curves = vec![curve];
        }
    }
    Ok(out)
}

fn polyline_length(v: &[[f64; 2]], closure: [f64; 2]) -> f64 {
    let l: f64 = v.windows(2).map(|w| dist(w[0], w[1])).sum();
    l + dist(*v.last().unwrap(), add(v[0], closure))
}
