//! Growth-rate estimators for barcode sequences and the inequality checks
//! built on them. Logarithms are base 2 throughout.

mod checks;
mod estimators;
mod report;
mod schedule;
mod sequence;

use thiserror::Error;

use crate::persistence::BarcodeError;

pub use checks::{
    ai_iteration_check, ap_bound_check, htop_bound_check, quasi_arithmetic_gaps, AiOutcome,
    AiVerdict, ApVerdict, GapClassification, HtopCheck, HtopRow, SUBLINEAR_RATE_TOLERANCE,
};
pub use estimators::{
    barcode_entropy, epsilon_entropy, order_verdicts, sequential_entropy, shortest_bar_series,
    EntropyProfile, OrderVerdict, SequentialEstimate, SlopeFit, Window,
};
pub use report::{EntropyReport, ORDER_TOLERANCE};
pub use schedule::{is_subexponential, Schedule, SubexpCertificate, SUBEXP_RATE_TOLERANCE};
pub use sequence::{log_plus, log_plus_count, BarcodeSequence, Provenance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("window {window:?} holds {found} entries, need at least 3")]
    WindowTooSmall { found: usize, window: Window },
    #[error("empty epsilon grid")]
    EmptyGrid,
    #[error("epsilon grid must be positive and strictly decreasing")]
    BadGrid,
    #[error("empty schedule")]
    EmptySchedule,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("schedule has no value at k = {0}")]
    ScheduleRangeMismatch(u32),
    #[error("series cover different k-ranges")]
    RangeMismatch,
    #[error("k-list needs at least 3 entries, got {0}")]
    TooShort(usize),
    #[error("k-list is not strictly increasing")]
    NotIncreasing,
    #[error("k-list gaps are not bounded")]
    UnboundedGaps,
    #[error("sequence has no barcode at k = {0}")]
    CoverageGap(u32),
    #[error("profile is not on a dyadic epsilon grid")]
    NonDyadicGrid,
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Barcode(#[from] BarcodeError),
}
