//! Filtered complexes over F2 and their barcodes.

mod barcode;
mod bottleneck;
mod complex;
pub mod io;
pub mod reduce;

pub use barcode::{barcode, spectral_edges, Barcode, BarcodeError, FiniteBar, InfiniteBar, SpectralPair};
pub use bottleneck::{bottleneck_distance, finite_bottleneck};
pub use complex::{build_complex, ComplexError, FilteredComplex, Generator};
