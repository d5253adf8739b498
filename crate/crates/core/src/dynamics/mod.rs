//! Symplectic integration of the truncated flow and the observables used in
//! drift experiments.

mod experiment;
mod field;
mod integrate;
mod models;
mod observables;
mod state;

pub use experiment::{drift_experiment, drift_run, initial_state, loglog_slope, write_drift_csv, DriftConfig, DriftRow, InitialProfile, DRIFT_CSV_HEADER};
pub use field::{hamiltonian_flow_field, HamiltonianField};
pub use integrate::{integrate, Integrator, IntegratorOptions};
pub use models::{build_model_hamiltonian, model_spectrum, ModelBasis, NlsTerm, Nonlinearity, PowerTerm, Profile};
pub use observables::{momentum, observe, pair_actions, shell_actions, torus_distance, ObservableFrame, ObservableSpec};
pub use state::State;

use crate::birkhoff::BirkhoffError;
use crate::poly::PolyError;
use crate::spectra::SpectraError;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("model: {0}")]
    Model(String),
    #[error("quadrature not converged under refinement (max change {0:e})")]
    Quadrature(f64),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("midpoint solver did not converge at step {dt:e}")]
    NonConvergence { dt: f64 },
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Birkhoff(#[from] BirkhoffError),
}
