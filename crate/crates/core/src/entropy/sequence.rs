use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::persistence::Barcode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Grid,
    Orbit,
    Synthetic,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Grid => "grid",
            Provenance::Orbit => "orbit",
            Provenance::Synthetic => "synthetic",
        })
    }
}

/// Barcodes indexed by iteration order k ≥ 1.
///
/// A k = 0 base barcode may be attached for the almost-periodicity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarcodeSequence {
    entries: BTreeMap<u32, Barcode>,
    pub provenance: Provenance,
    #[serde(default)]
    base: Option<Barcode>,
}

impl BarcodeSequence {
    pub fn new(provenance: Provenance) -> Self {
        Self {
            entries: BTreeMap::new(),
            provenance,
            base: None,
        }
    }

    /// Inserts the barcode of the k-th iterate. Panics on k = 0.
    pub fn insert(&mut self, k: u32, barcode: Barcode) {
        assert!(k > 0, "iteration orders are positive");
        self.entries.insert(k, barcode);
    }

    pub fn with_base(mut self, base: Barcode) -> Self {
        self.base = Some(base);
        self
    }

    pub fn base(&self) -> Option<&Barcode> {
        self.base.as_ref()
    }

    pub fn get(&self, k: u32) -> Option<&Barcode> {
        if k == 0 {
            self.base.as_ref()
        } else {
            self.entries.get(&k)
        }
    }

    pub fn entries(&self) -> &BTreeMap<u32, Barcode> {
        &self.entries
    }

    pub fn ks(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(u32, Barcode)> for BarcodeSequence {
    fn from_iter<T: IntoIterator<Item = (u32, Barcode)>>(iter: T) -> Self {
        let mut seq = Self::new(Provenance::Synthetic);
        for (k, b) in iter {
            seq.insert(k, b);
        }
        seq
    }
}

/// Base-2 logarithm with log⁺0 = 0.
pub fn log_plus(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.log2()
    }
}

/// log⁺ of an exact count.
pub fn log_plus_count(n: u128) -> f64 {
    if n == 0 {
        0.0
    } else {
        (n as f64).log2()
    }
}
