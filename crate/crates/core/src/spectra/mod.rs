//! Potentials, Sturm-Liouville spectra and model frequency tables.

mod checks;
mod frequencies;
mod potential;
mod sturm;

pub use checks::{check_localization, eigenvalue_derivative_check, expansion_fit, leading_derivative, DerivativeReport, ExpansionFit, LocalizationReport};
pub use frequencies::{convolution_frequencies, coupled_frequencies, frequencies_for_sample, nlw_frequencies, schroedinger_frequencies, FrequencyTable, ModelTag};
pub use potential::{sample_potential, CosinePotential, PotentialFamily, PotentialParams, PotentialSample};
pub use sturm::{galerkin_matrix, periodic_spectrum, sturm_liouville, Boundary, EigenBasis, REFINEMENT_TOL};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("Galerkin size {m} below 4*jmax (jmax = {jmax})")]
    GalerkinTooSmall { m: usize, jmax: usize },
    #[error("eigenvalue {j} not resolved under refinement (relative change {rel:e})")]
    Unresolved { j: usize, rel: f64 },
    #[error("lambda + m = {value} <= 0 at mode {mode}")]
    NonPositiveRadicand { mode: String, value: f64 },
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("i/o: {0}")]
    Io(String),
}
