//! Barcode sequences with prescribed growth laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{BarcodeSequence, Provenance};
use crate::persistence::{Barcode, FiniteBar, InfiniteBar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyntheticError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

/// Largest k for which 2^{k²} still fits the exact counters.
pub const SUPEREXP_K_MAX: u32 = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SyntheticLaw {
    /// round(2^{ck}) bars of length 1 plus two infinite bars.
    ExponentialGrowth { c: f64 },
    /// 2^{k²} bars of length 2^{−k²} plus four bars of length 1.
    SuperexpCountShrinkingBars,
    /// Period-N templates, perturbed by less than ε/4 per endpoint from k = N on.
    AlmostPeriodic { period: u32, eps: f64, seed: u64 },
    /// n + 1 infinite bars at every k.
    PseudoRotation { n: u32 },
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), SyntheticError> {
    if cond {
        Ok(())
    } else {
        Err(SyntheticError::ParameterOutOfRange(msg()))
    }
}

fn bar(birth: f64, death: f64, mult: u128) -> FiniteBar {
    FiniteBar { birth, death, mult }
}

pub fn exponential_barcode(c: f64, k: u32) -> Barcode {
    let count = (c * k as f64).exp2().round() as u128;
    Barcode::new(
        vec![bar(0.0, 1.0, count)],
        vec![InfiniteBar { birth: 0.0, mult: 1 }, InfiniteBar { birth: 0.5, mult: 1 }],
    )
    .expect("unit bars")
}

pub fn superexp_barcode(k: u32) -> Barcode {
    let sq = k * k;
    let short = (-(sq as f64)).exp2();
    Barcode::new(
        vec![bar(0.0, short, 1u128 << sq), bar(0.0, 1.0, 4)],
        Vec::new(),
    )
    .expect("positive bars")
}

/// Template barcode of phase `l` of the almost-periodic law.
fn template(period: u32, eps: f64, seed: u64, l: u32) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(l) << 32) ^ u64::from(period));
    let count = 2 + (l * 3 % 5) as usize;
    (0..count)
        .map(|i| {
            let birth = i as f64 + rng.random_range(0.0..0.5);
            let length = eps * rng.random_range(0.6..3.0);
            (birth, birth + length)
        })
        .collect()
}

fn almost_periodic_barcode(period: u32, eps: f64, seed: u64, k: u32) -> Barcode {
    let l = k % period;
    let mut bars = template(period, eps, seed, l);
    if k >= period {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ u64::from(k));
        let r = 0.99 * eps / 4.0;
        for b in &mut bars {
            b.0 += rng.random_range(-r..=r);
            b.1 += rng.random_range(-r..=r);
        }
    }
    let infinite = [-1.0, 10.0];
    Barcode::from_bars(&bars, &infinite).expect("perturbation keeps lengths positive")
}

/// Barcodes for k = 1..=k_max. The almost-periodic law also attaches its
/// unperturbed k = 0 barcode as the sequence base.
pub fn generate(law: &SyntheticLaw, k_max: u32) -> Result<BarcodeSequence, SyntheticError> {
    check(k_max >= 4, || format!("k_max = {k_max} < 4"))?;
    let mut seq = BarcodeSequence::new(Provenance::Synthetic);
    match *law {
        SyntheticLaw::ExponentialGrowth { c } => {
            check(c > 0.0 && c * k_max as f64 <= 120.0, || format!("c = {c}"))?;
            for k in 1..=k_max {
                seq.insert(k, exponential_barcode(c, k));
            }
            seq = seq.with_base(exponential_barcode(c, 0));
        }
        SyntheticLaw::SuperexpCountShrinkingBars => {
            check(k_max <= SUPEREXP_K_MAX, || {
                format!("k_max = {k_max} > {SUPEREXP_K_MAX}")
            })?;
            for k in 1..=k_max {
                seq.insert(k, superexp_barcode(k));
            }
        }
        SyntheticLaw::AlmostPeriodic { period, eps, seed } => {
            check(period >= 1, || "period must be positive".into())?;
            check(eps > 0.0 && eps.is_finite(), || format!("eps = {eps}"))?;
            for k in 1..=k_max {
                seq.insert(k, almost_periodic_barcode(period, eps, seed, k));
            }
            seq = seq.with_base(almost_periodic_barcode(period, eps, seed, 0));
        }
        SyntheticLaw::PseudoRotation { n } => {
            let births: Vec<f64> = (0..=n).map(f64::from).collect();
            let bc = Barcode::from_bars(&[], &births).expect("infinite bars only");
            for k in 1..=k_max {
                seq.insert(k, bc.clone());
            }
            seq = seq.with_base(bc);
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_counts() {
        let b = exponential_barcode(0.5, 6);
        assert_eq!(b.finite_count(), 8);
        assert_eq!(b.infinite_count(), 2);
    }

    #[test]
    fn template_lengths_survive_perturbation() {
        for l in 0..7 {
            for (b, d) in template(7, 0.2, 3, l) {
                assert!(d - b >= 0.6 * 0.2);
            }
        }
    }
}
