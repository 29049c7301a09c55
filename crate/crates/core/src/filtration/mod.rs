//! Action-filtered complexes for iterates of the standard map.
//!
//! The ground truth is the sublevel persistence of the discrete action W_k,
//! sampled on a grid over the class-m configuration space S¹ × ℝ^{k−1} and
//! reduced to its Morse complex. Orbit complexes built from Newton orbits
//! are checked against it.

mod grid;
mod morse;
mod orbit;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{BarcodeSequence, Provenance};
use crate::persistence::{
    barcode, spectral_edges, Barcode, ComplexError, FilteredComplex, Generator, SpectralPair,
};
use crate::twist::{action, TwistMapSpec};

use grid::{
    boundary_floor, chart_gradient_norm, critical_value_bound, radius_for_level, Grid, LEVEL_MARGIN,
    MAX_K,
};
use morse::Filtration;

pub use orbit::{cross_validate, orbit_complex, Endpoint, EndpointKind, MatchReport, OrbitComplex};

pub const DEFAULT_CELL_BUDGET: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiltrationError {
    #[error("grid with n = {n} for k = {k} exceeds the budget of {budget} vertices; largest feasible n is {max_n}")]
    BudgetExceeded {
        k: usize,
        n: usize,
        budget: usize,
        max_n: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("degenerate orbit in input: {0}")]
    DegenerateInput(String),
    #[error("orbits mix periods or rotation classes")]
    MixedOrbits,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Cap on n^k.
    pub budget: usize,
    /// Half-width of the box in the u directions. When absent the box is
    /// the smallest one containing the sublevel set just above an a-priori
    /// bound on critical values.
    pub radius: Option<f64>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_CELL_BUDGET,
            radius: None,
        }
    }
}

/// Largest n with n^k within the budget.
pub fn max_feasible_n(k: usize, budget: usize) -> usize {
    let mut n = (budget as f64).powf(1.0 / k as f64).floor() as usize;
    while n > 0 && (n as f64).powi(k as i32) > budget as f64 {
        n -= 1;
    }
    while ((n + 1) as f64).powi(k as i32) <= budget as f64 {
        n += 1;
    }
    n
}

/// Lower-star filtration of W_k on a grid, reduced to its Morse complex.
#[derive(Debug, Clone)]
pub struct GridActionComplex {
    pub k: usize,
    pub m: i64,
    pub n: usize,
    pub radius: f64,
    /// Vertices with W_k above this level are left out. It lies below W_k on
    /// the box faces, so sublevel sets never reach them, and above every
    /// critical value when the default box is used.
    pub cutoff: f64,
    /// W_k on the vertex grid, +∞ above the cutoff.
    pub values: Vec<f64>,
    /// Sampled sup of the gradient times the cell diameter.
    pub modulus: f64,
    /// Morse complex of the lower-star filtration; degrees are cell
    /// dimensions.
    pub complex: FilteredComplex,
    grid: Grid,
}

impl GridActionComplex {
    pub fn barcode(&self) -> Barcode {
        barcode(&self.complex)
    }

    pub fn vertex_count(&self) -> usize {
        self.values.len()
    }

    pub fn critical_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k + 1];
        for g in self.complex.generators() {
            c[g.degree.unwrap_or(0) as usize] += 1;
        }
        c
    }

    /// Persistence pairs with the degree of the birth cell; unpaired
    /// generators have no death.
    pub fn pairs(&self) -> Vec<(f64, Option<f64>, usize)> {
        let red = crate::persistence::reduce::reduce(self.complex.columns());
        let g = self.complex.generators();
        let deg = |i: usize| g[i].degree.unwrap_or(0) as usize;
        let mut out: Vec<(f64, Option<f64>, usize)> = red
            .pairs()
            .filter(|&(i, j)| g[j].action > g[i].action)
            .map(|(i, j)| (g[i].action, Some(g[j].action), deg(i)))
            .collect();
        out.extend(red.essential().map(|i| (g[i].action, None, deg(i))));
        out
    }

    /// Full cubical lower-star complex on the same samples, every cell kept.
    ///
    /// Only meant for small grids, as a check on the Morse reduction.
    pub fn explicit_complex(&self) -> Result<FilteredComplex, FiltrationError> {
        explicit_cubical(&self.grid, &self.values)
    }
}

/// Samples W_k on an n-point-per-axis grid and reduces the lower-star
/// filtration to its critical cells.
pub fn grid_action_complex(
    spec: &TwistMapSpec,
    k: usize,
    m: i64,
    n: usize,
) -> Result<GridActionComplex, FiltrationError> {
    grid_action_complex_with(spec, k, m, n, &GridOptions::default())
}

pub fn grid_action_complex_with(
    spec: &TwistMapSpec,
    k: usize,
    m: i64,
    n: usize,
    opts: &GridOptions,
) -> Result<GridActionComplex, FiltrationError> {
    if k == 0 || k > MAX_K {
        return Err(FiltrationError::InvalidGrid(format!("k = {k} outside 1..={MAX_K}")));
    }
    if n < 3 {
        return Err(FiltrationError::InvalidGrid(format!("n = {n} below 3")));
    }
    let fits = (n as f64).powi(k as i32) <= opts.budget as f64;
    if !fits {
        return Err(FiltrationError::BudgetExceeded {
            k,
            n,
            budget: opts.budget,
            max_n: max_feasible_n(k, opts.budget),
        });
    }
    let level = critical_value_bound(spec, k, m) + LEVEL_MARGIN;
    let radius = opts.radius.unwrap_or_else(|| radius_for_level(spec, k, m, level));
    if k > 1 && !(radius > 0.0) {
        return Err(FiltrationError::InvalidGrid(format!("radius {radius}")));
    }
    let grid = Grid::new(k, n, m, radius);
    let cutoff = boundary_floor(spec, k, m, radius);

    let mut values = Vec::with_capacity(grid.vertex_count());
    let mut grad_max: f64 = 0.0;
    for v in 0..grid.vertex_count() {
        let x = grid.config(v);
        let w = action(spec, &x, m);
        if w < cutoff {
            grad_max = grad_max.max(chart_gradient_norm(spec, &x, m));
            values.push(w);
        } else {
            values.push(f64::INFINITY);
        }
    }
    let modulus = grad_max * grid.cell_diameter();

    let filt = Filtration::new(&grid, &values);
    let critical = filt.critical_cells();
    let columns = filt.morse_boundary(&critical);
    let generators = critical
        .iter()
        .map(|c| {
            Generator::new(format!("v{}:{}", c.vertex, c.code), values[c.vertex]).with_degree(c.dim as i32)
        })
        .collect();
    let complex = FilteredComplex::from_ordered(generators, columns)?;
    Ok(GridActionComplex {
        k,
        m,
        n,
        radius,
        cutoff,
        values,
        modulus,
        complex,
        grid,
    })
}

/// Limit on the number of cells in [`GridActionComplex::explicit_complex`].
pub const EXPLICIT_CELL_LIMIT: usize = 2_000_000;

fn explicit_cubical(grid: &Grid, values: &[f64]) -> Result<FilteredComplex, FiltrationError> {
    let k = grid.k;
    let filt = Filtration::new(grid, values);
    let rank = &filt.rank;
    // cells as (low corner, axis mask)
    let mut cells: Vec<(usize, u32)> = Vec::new();
    for v in 0..grid.vertex_count() {
        'mask: for mask in 0u32..(1 << k) {
            for sub in 0u32..(1 << k) {
                if sub & !mask != 0 {
                    continue;
                }
                let mut u = v;
                for i in 0..k {
                    if sub & (1 << i) != 0 {
                        match grid.step(u, i, 1) {
                            Some(w) => u = w,
                            None => continue 'mask,
                        }
                    }
                }
                if rank[u] == u32::MAX {
                    continue 'mask;
                }
            }
            cells.push((v, mask));
            if cells.len() > EXPLICIT_CELL_LIMIT {
                return Err(FiltrationError::InvalidGrid(format!(
                    "more than {EXPLICIT_CELL_LIMIT} cells"
                )));
            }
        }
    }
    let top_rank = |&(v, mask): &(usize, u32)| -> u32 {
        let mut best = rank[v];
        for sub in 0u32..(1 << k) {
            if sub & !mask != 0 {
                continue;
            }
            let mut u = v;
            for i in 0..k {
                if sub & (1 << i) != 0 {
                    u = grid.step(u, i, 1).expect("cell checked");
                }
            }
            best = best.max(rank[u]);
        }
        best
    };
    let mut keyed: Vec<(u32, u32, usize, u32)> = cells
        .iter()
        .map(|c| (top_rank(c), c.1.count_ones(), c.0, c.1))
        .collect();
    keyed.sort_unstable();
    let index: std::collections::HashMap<(usize, u32), u32> = keyed
        .iter()
        .enumerate()
        .map(|(i, &(_, _, v, mask))| ((v, mask), i as u32))
        .collect();
    let mut generators = Vec::with_capacity(keyed.len());
    let mut columns = Vec::with_capacity(keyed.len());
    let mut by_rank = vec![0usize; values.len()];
    for (v, &r) in rank.iter().enumerate() {
        if r != u32::MAX {
            by_rank[r as usize] = v;
        }
    }
    for &(r, d, v, mask) in &keyed {
        generators.push(
            Generator::new(format!("c{v}:{mask}"), values[by_rank[r as usize]]).with_degree(d as i32),
        );
        let mut col = Vec::new();
        for i in 0..k {
            if mask & (1 << i) != 0 {
                let face = mask & !(1 << i);
                col.push(index[&(v, face)]);
                let far = grid.step(v, i, 1).expect("cell checked");
                col.push(index[&(far, face)]);
            }
        }
        columns.push(col);
    }
    Ok(FilteredComplex::from_ordered(generators, columns)?)
}

/// Per-axis resolution cap for budget-chosen grids.
pub const MAX_RESOLUTION: usize = 8192;

/// Grid resolution chosen from the budget, capped at [`MAX_RESOLUTION`].
/// Never below the smallest valid grid, so that a budget too small for any
/// grid is refused as such.
pub fn resolution_for_budget(k: usize, budget: usize) -> usize {
    max_feasible_n(k, budget).clamp(3, MAX_RESOLUTION)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: usize,
    pub n: usize,
    pub radius: f64,
    pub modulus: f64,
    pub critical_counts: Vec<usize>,
    pub spectral: SpectralPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSweep {
    pub sequence: BarcodeSequence,
    pub entries: Vec<SweepEntry>,
}

/// Grid barcodes of W_k for every k in the range, each at the finest
/// resolution the budget allows.
pub fn grid_sweep(
    spec: &TwistMapSpec,
    ks: RangeInclusive<usize>,
    m: i64,
    budget: usize,
) -> Result<GridSweep, FiltrationError> {
    let mut sequence = BarcodeSequence::new(Provenance::Grid);
    let mut entries = Vec::new();
    for k in ks {
        let n = resolution_for_budget(k, budget);
        let opts = GridOptions {
            budget,
            radius: None,
        };
        let g = grid_action_complex_with(spec, k, m, n, &opts)?;
        let spectral = spectral_edges(&g.complex)
            .map_err(|e| FiltrationError::InvalidGrid(format!("k = {k}: {e}")))?;
        sequence.insert(k as u32, g.barcode());
        entries.push(SweepEntry {
            k,
            n,
            radius: g.radius,
            modulus: g.modulus,
            critical_counts: g.critical_counts(),
            spectral,
        });
    }
    Ok(GridSweep { sequence, entries })
}
