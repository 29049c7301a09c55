//! Transversal crossings between closed polylines on the torus or cylinder.

use super::curve::Polyline;
use super::map::PhaseSpace;

/// Vertical offset applied to the second curve to break tangencies.
pub const TANGENCY_SHIFT: f64 = 1e-9;
const MAX_PIECE: f64 = 0.25;

type Seg = ([f64; 2], [f64; 2]);

/// Splits segments longer than [`MAX_PIECE`] and moves every piece so its
/// start lies in the fundamental domain.
fn pieces(curve: &Polyline, dy: f64, space: PhaseSpace) -> Vec<Seg> {
    let mut out = Vec::new();
    for (a, b) in curve.segments() {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let n = (len / MAX_PIECE).ceil().max(1.0) as usize;
        for i in 0..n {
            let t0 = i as f64 / n as f64;
            let t1 = (i + 1) as f64 / n as f64;
            let p = [a[0] + t0 * (b[0] - a[0]), a[1] + t0 * (b[1] - a[1]) + dy];
            let q = [a[0] + t1 * (b[0] - a[0]), a[1] + t1 * (b[1] - a[1]) + dy];
            let sx = p[0].floor();
            let sy = match space {
                PhaseSpace::Torus => p[1].floor(),
                PhaseSpace::Cylinder => 0.0,
            };
            out.push(([p[0] - sx, p[1] - sy], [q[0] - sx, q[1] - sy]));
        }
    }
    out
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Half-open segments [p, p+r) and [q, q+s) cross.
fn crosses(p: [f64; 2], p2: [f64; 2], q: [f64; 2], q2: [f64; 2]) -> bool {
    let r = [p2[0] - p[0], p2[1] - p[1]];
    let s = [q2[0] - q[0], q2[1] - q[1]];
    let denom = cross(r, s);
    if denom == 0.0 {
        return false;
    }
    let qp = [q[0] - p[0], q[1] - p[1]];
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)
}

fn bbox(s: &Seg) -> [f64; 4] {
    [
        s.0[0].min(s.1[0]),
        s.0[1].min(s.1[1]),
        s.0[0].max(s.1[0]),
        s.0[1].max(s.1[1]),
    ]
}

/// Number of crossings between `a` and `b` shifted up by
/// [`TANGENCY_SHIFT`], counted on the torus or cylinder.
///
/// Every segment is half-open, so a crossing through a shared vertex is
/// counted once.
pub fn count_intersections(a: &Polyline, b: &Polyline, space: PhaseSpace) -> usize {
    let pa = pieces(a, 0.0, space);
    let pb = pieces(b, TANGENCY_SHIFT, space);
    if pa.is_empty() || pb.is_empty() {
        return 0;
    }
    let total = (pa.len() + pb.len()) as f64;
    let grid = (total.sqrt() as usize).clamp(1, 1024);
    let g = grid as f64;

    // Bin b's pieces by x-cells (and y-cells on the torus), wrapping.
    let y_bins = match space {
        PhaseSpace::Torus => grid,
        PhaseSpace::Cylinder => 1,
    };
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); grid * y_bins];
    let cell = |v: f64| (v * g).floor() as i64;
    let wrap = |c: i64, n: usize| c.rem_euclid(n as i64) as usize;
    for (idx, s) in pb.iter().enumerate() {
        let bb = bbox(s);
        let (x0, x1) = (cell(bb[0]), cell(bb[2]));
        let (y0, y1) = match space {
            PhaseSpace::Torus => (cell(bb[1]), cell(bb[3])),
            PhaseSpace::Cylinder => (0, 0),
        };
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                bins[wrap(cy, y_bins) * grid + wrap(cx, grid)].push(idx as u32);
            }
        }
    }

    let shifts: Vec<(f64, f64)> = match space {
        PhaseSpace::Torus => (-1..=1)
            .flat_map(|i| (-1..=1).map(move |j| (i as f64, j as f64)))
            .collect(),
        PhaseSpace::Cylinder => (-1..=1).map(|i| (i as f64, 0.0)).collect(),
    };

    let mut count = 0;
    let mut candidates: Vec<u32> = Vec::new();
    for s in &pa {
        let bb = bbox(s);
        candidates.clear();
        let (x0, x1) = (cell(bb[0]), cell(bb[2]));
        let (y0, y1) = match space {
            PhaseSpace::Torus => (cell(bb[1]), cell(bb[3])),
            PhaseSpace::Cylinder => (0, 0),
        };
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                candidates.extend_from_slice(&bins[wrap(cy, y_bins) * grid + wrap(cx, grid)]);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for &j in &candidates {
            let t = &pb[j as usize];
            let tb = bbox(t);
            for &(dx, dy) in &shifts {
                if tb[0] + dx > bb[2] || tb[2] + dx < bb[0] || tb[1] + dy > bb[3] || tb[3] + dy < bb[1] {
                    continue;
                }
                let q = [t.0[0] + dx, t.0[1] + dy];
                let q2 = [t.1[0] + dx, t.1[1] + dy];
                if crosses(s.0, s.1, q, q2) {
                    count += 1;
                }
            }
        }
    }
    count
}
