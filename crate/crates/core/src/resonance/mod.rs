//! Small divisors, near-resonance search, exception patterns and the
//! Monte Carlo measure estimate.

mod classify;
mod divisor;
mod enumerate;
mod measure;

pub use classify::{
    calibrate_pair_cutoff, classify_exception, coupled_pair_cutoff, normal_form_membership, shell_cutoff, ClassifyParams, PairRelation, Pattern,
};
pub use divisor::{compensated_dot, compensated_sum, signed_divisor, small_divisor, threshold, DivisorQuery};
pub use enumerate::{enumerate_exhaustive, enumerate_near_resonances, filter_hits, Enumeration, ResonanceHit};
pub use measure::{measure_estimate, wilson_interval, ClassifyRule, MeasureConfig, MeasureReport, MeasureRow, QueryTemplate};

use crate::spectra::SpectraError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("mode {0} has no frequency")]
    UnsupportedMode(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}
