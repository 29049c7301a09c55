use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::complex::FilteredComplex;
use super::reduce::{anti_transpose, reduce};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarcodeError {
    #[error("epsilon must be positive, got {0}")]
    NonpositiveEpsilon(f64),
    #[error("alpha must be positive, got {0}")]
    NonpositiveAlpha(f64),
    #[error("finite bar ({birth}, {death}) has nonpositive length")]
    EmptyBar { birth: f64, death: f64 },
    #[error("complex has no infinite bars")]
    AcyclicComplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteBar {
    pub birth: f64,
    pub death: f64,
    pub mult: u128,
}

impl FiniteBar {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteBar {
    pub birth: f64,
    pub mult: u128,
}

/// Multiset of bars stored as run-length entries.
///
/// `trivial` counts pairs born and killed at the same action. They only
/// arise from complexes with tied actions and never count as bars.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    finite: Vec<FiniteBar>,
    infinite: Vec<InfiniteBar>,
    #[serde(default)]
    trivial: u128,
}

impl Barcode {
    pub fn new(finite: Vec<FiniteBar>, infinite: Vec<InfiniteBar>) -> Result<Self, BarcodeError> {
        for b in &finite {
            if !(b.death > b.birth) {
                return Err(BarcodeError::EmptyBar {
                    birth: b.birth,
                    death: b.death,
                });
            }
        }
        let mut bc = Self {
            finite,
            infinite,
            trivial: 0,
        };
        bc.normalize();
        Ok(bc)
    }

    /// Unit-multiplicity constructor.
    pub fn from_bars(finite: &[(f64, f64)], infinite: &[f64]) -> Result<Self, BarcodeError> {
        Self::new(
            finite
                .iter()
                .map(|&(birth, death)| FiniteBar {
                    birth,
                    death,
                    mult: 1,
                })
                .collect(),
            infinite
                .iter()
                .map(|&birth| InfiniteBar { birth, mult: 1 })
                .collect(),
        )
    }

    /// Sorts entries and merges identical ones.
    fn normalize(&mut self) {
        self.finite.retain(|b| b.mult > 0);
        self.infinite.retain(|b| b.mult > 0);
        self.finite.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        self.finite.dedup_by(|next, kept| {
            if next.birth == kept.birth && next.death == kept.death {
                kept.mult += next.mult;
                true
            } else {
                false
            }
        });
        self.infinite.sort_by(|a, b| a.birth.total_cmp(&b.birth));
        self.infinite.dedup_by(|next, kept| {
            if next.birth == kept.birth {
                kept.mult += next.mult;
                true
            } else {
                false
            }
        });
    }

    pub fn finite(&self) -> &[FiniteBar] {
        &self.finite
    }

    pub fn infinite(&self) -> &[InfiniteBar] {
        &self.infinite
    }

    pub fn trivial_pairs(&self) -> u128 {
        self.trivial
    }

    pub fn finite_count(&self) -> u128 {
        self.finite.iter().map(|b| b.mult).sum()
    }

    pub fn infinite_count(&self) -> u128 {
        self.infinite.iter().map(|b| b.mult).sum()
    }

    /// Generators of the source complex: 2·(finite + trivial) + infinite.
    pub fn generator_count(&self) -> u128 {
        2 * (self.finite_count() + self.trivial) + self.infinite_count()
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.infinite.is_empty()
    }

    /// Bars of length strictly greater than `eps`, infinite bars included.
    pub fn b_eps(&self, eps: f64) -> Result<u128, BarcodeError> {
        if !(eps > 0.0) {
            return Err(BarcodeError::NonpositiveEpsilon(eps));
        }
        let finite: u128 = self
            .finite
            .iter()
            .filter(|b| b.length() > eps)
            .map(|b| b.mult)
            .sum();
        Ok(finite + self.infinite_count())
    }

    /// Longest finite bar, 0 without finite bars.
    pub fn boundary_depth(&self) -> f64 {
        self.finite.iter().map(FiniteBar::length).fold(0.0, f64::max)
    }

    pub fn shortest_bar(&self) -> Option<f64> {
        self.finite
            .iter()
            .map(FiniteBar::length)
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Σ length^alpha over finite bars.
    pub fn total_bar_length(&self, alpha: f64) -> Result<f64, BarcodeError> {
        if !(alpha > 0.0) {
            return Err(BarcodeError::NonpositiveAlpha(alpha));
        }
        Ok(self
            .finite
            .iter()
            .map(|b| b.mult as f64 * b.length().powf(alpha))
            .sum())
    }

    /// Finite bars expanded to unit multiplicity. Panics on huge multisets.
    pub fn expanded_finite(&self) -> Vec<(f64, f64)> {
        let total = self.finite_count();
        assert!(total <= 50_000_000, "barcode too large to expand");
        let mut out = Vec::with_capacity(total as usize);
        for b in &self.finite {
            for _ in 0..b.mult {
                out.push((b.birth, b.death));
            }
        }
        out
    }

    pub fn expanded_infinite(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.infinite {
            for _ in 0..b.mult {
                out.push(b.birth);
            }
        }
        out
    }
}

/// Barcode of a filtered complex by column reduction.
pub fn barcode(complex: &FilteredComplex) -> Barcode {
    let red = reduce(complex.columns());
    let gens = complex.generators();
    let mut finite = Vec::new();
    let mut trivial = 0u128;
    for (i, j) in red.pairs() {
        let (birth, death) = (gens[i].action, gens[j].action);
        if death > birth {
            finite.push(FiniteBar {
                birth,
                death,
                mult: 1,
            });
        } else {
            trivial += 1;
        }
    }
    let infinite = red
        .essential()
        .map(|i| InfiniteBar {
            birth: gens[i].action,
            mult: 1,
        })
        .collect();
    let mut bc = Barcode {
        finite,
        infinite,
        trivial,
    };
    bc.normalize();
    bc
}

/// Spectral edges of a complex and of its dual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub c_plus: f64,
    pub c_minus: f64,
    pub gamma_proxy: f64,
}

/// `c_plus` is the top infinite birth; `c_minus` is the top infinite birth of
/// the dual complex, which has the transposed boundary and negated actions.
pub fn spectral_edges(complex: &FilteredComplex) -> Result<SpectralPair, BarcodeError> {
    let gens = complex.generators();
    let n = gens.len();
    let primal = reduce(complex.columns());
    let c_plus = primal
        .essential()
        .map(|i| gens[i].action)
        .max_by(|a, b| a.total_cmp(b))
        .ok_or(BarcodeError::AcyclicComplex)?;
    let dual = reduce(&anti_transpose(complex.columns()));
    let c_minus = dual
        .essential()
        .map(|d| -gens[n - 1 - d].action)
        .max_by(|a, b| a.total_cmp(b))
        .ok_or(BarcodeError::AcyclicComplex)?;
    Ok(SpectralPair {
        c_plus,
        c_minus,
        gamma_proxy: c_plus + c_minus,
    })
}
