//! Barcode growth laboratory.
//!
//! Persistence of action-filtered complexes over F2, entropy estimators for
//! barcode sequences, a standard-map backend that produces such sequences,
//! and checks for the growth inequalities that tie them to curve length.

pub mod persistence;
pub mod entropy;
pub mod synthetic;
pub mod twist;
pub mod filtration;
pub mod crofton;
