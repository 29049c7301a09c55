//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use barcode_lab::persistence::{build_complex, FilteredComplex, Generator};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random complex on `n` generators with sorted distinct actions.
///
/// The differential is U·R·U⁻¹ with R a random disjoint pairing and U a
/// random unipotent upper triangular matrix, so ∂² = 0 and ∂ is strictly
/// upper triangular in index order.
pub fn random_complex(rng: &mut ChaCha8Rng, n: usize, actions: &[f64]) -> FilteredComplex {
    assert_eq!(actions.len(), n);
    // R as bitmask columns: column j has bit i.
    let mut r = vec![0u32; n];
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let pairs = rng.random_range(0..=n / 2);
    for p in 0..pairs {
        let (a, b) = (idx[2 * p], idx[2 * p + 1]);
        let (i, j) = (a.min(b), a.max(b));
        r[j] |= 1 << i;
    }
    // U unipotent upper triangular: column j = e_j + random bits above.
    let mut u = vec![0u32; n];
    for (j, col) in u.iter_mut().enumerate() {
        let above: u32 = if j == 0 { 0 } else { rng.random::<u32>() & ((1u32 << j) - 1) };
        *col = (1 << j) | above;
    }
    let uinv = invert_upper(&u);
    let d = mat_mul(&u, &mat_mul(&r, &uinv));

    let gens: Vec<Generator> = (0..n)
        .map(|i| Generator::new(format!("g{i:02}"), actions[i]))
        .collect();
    let boundary: Vec<(String, Vec<String>)> = (0..n)
        .map(|j| {
            (
                format!("g{j:02}"),
                (0..n)
                    .filter(|&i| d[j] >> i & 1 == 1)
                    .map(|i| format!("g{i:02}"))
                    .collect(),
            )
        })
        .collect();
    build_complex(gens, boundary).expect("random complex is valid")
}

/// Column-major F2 product: (AB)_j = Σ_i B_ij A_i.
fn mat_mul(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter()
        .map(|&bj| {
            let mut acc = 0;
            for (i, &ai) in a.iter().enumerate() {
                if bj >> i & 1 == 1 {
                    acc ^= ai;
                }
            }
            acc
        })
        .collect()
}

fn invert_upper(u: &[u32]) -> Vec<u32> {
    let n = u.len();
    // Solve U x = e_j by back substitution.
    (0..n)
        .map(|j| {
            let mut x = 0u32;
            let mut rhs = 1u32 << j;
            for i in (0..n).rev() {
                if rhs >> i & 1 == 1 {
                    x |= 1 << i;
                    rhs ^= u[i];
                }
            }
            x
        })
        .collect()
}

pub fn sorted_actions(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Actions on a lattice of spacing `h`, strictly increasing.
pub fn lattice_actions(rng: &mut ChaCha8Rng, n: usize, h: f64) -> Vec<f64> {
    let mut pts = HashSet::new();
    while pts.len() < n {
        pts.insert(rng.random_range(-40i32..40));
    }
    let mut v: Vec<i32> = pts.into_iter().collect();
    v.sort();
    v.into_iter().map(|z| z as f64 * h).collect()
}

/// Bars by inclusion–exclusion over ranks of H(C≤a) → H(C≤b), with ranks
/// computed by enumerating all chains of the complex as bitmasks.
pub struct RankOracle {
    levels: Vec<f64>,
    ranks: Vec<Vec<u32>>,
}

fn span(vectors: &[u32]) -> HashSet<u32> {
    let mut out: HashSet<u32> = HashSet::from([0]);
    for &v in vectors {
        let extra: Vec<u32> = out.iter().map(|&w| w ^ v).collect();
        out.extend(extra);
    }
    out
}

fn log2_exact(n: usize) -> u32 {
    assert!(n.is_power_of_two());
    n.trailing_zeros()
}

impl RankOracle {
    pub fn new(complex: &FilteredComplex) -> Self {
        let gens = complex.generators();
        let n = gens.len();
        assert!(n <= 14);
        let cols: Vec<u32> = complex
            .columns()
            .iter()
            .map(|c| c.iter().fold(0u32, |acc, &i| acc | (1 << i)))
            .collect();
        let boundary_of = |chain: u32| -> u32 {
            (0..n)
                .filter(|&j| chain >> j & 1 == 1)
                .fold(0, |acc, j| acc ^ cols[j])
        };
        let mut levels: Vec<f64> = gens.iter().map(|g| g.action).collect();
        levels.dedup();
        let mask_at = |a: f64| -> u32 {
            (0..n)
                .filter(|&i| gens[i].action <= a)
                .fold(0, |acc, i| acc | (1 << i))
        };
        // Level index 0 is the empty sublevel set; level t+1 is levels[t].
        let mut masks = vec![0u32];
        masks.extend(levels.iter().map(|&a| mask_at(a)));
        let cycles: Vec<Vec<u32>> = masks
            .iter()
            .map(|&m| {
                let mut z = Vec::new();
                let mut s = m;
                // enumerate all submasks of m
                loop {
                    if boundary_of(s) == 0 {
                        z.push(s);
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & m;
                }
                z
            })
            .collect();
        let boundaries: Vec<HashSet<u32>> = masks
            .iter()
            .map(|&m| {
                let b: Vec<u32> = (0..n)
                    .filter(|&j| m >> j & 1 == 1)
                    .map(|j| cols[j])
                    .collect();
                span(&b)
            })
            .collect();
        let t = masks.len();
        let mut ranks = vec![vec![0u32; t]; t];
        for a in 0..t {
            let dz = log2_exact(cycles[a].len());
            for b in a..t {
                let inter = cycles[a].iter().filter(|z| boundaries[b].contains(z)).count();
                ranks[a][b] = dz - log2_exact(inter);
            }
        }
        Self { levels, ranks }
    }

    /// (birth, death) multiplicities and infinite births.
    pub fn bars(&self) -> (BTreeMap<(u64, u64), i64>, BTreeMap<u64, i64>) {
        let t = self.levels.len();
        let r = |a: usize, b: usize| -> i64 {
            if a == 0 {
                0
            } else {
                self.ranks[a][b] as i64
            }
        };
        let mut finite = BTreeMap::new();
        let mut infinite = BTreeMap::new();
        for i in 1..=t {
            for j in i + 1..=t {
                let mu = r(i, j - 1) - r(i - 1, j - 1) - r(i, j) + r(i - 1, j);
                if mu != 0 {
                    finite.insert(
                        (self.levels[i - 1].to_bits(), self.levels[j - 1].to_bits()),
                        mu,
                    );
                }
            }
            let mu = r(i, t) - r(i - 1, t);
            if mu != 0 {
                infinite.insert(self.levels[i - 1].to_bits(), mu);
            }
        }
        (finite, infinite)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Least-squares slope of y against x, written out directly.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
