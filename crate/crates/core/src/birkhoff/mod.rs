//! The normal-form engine: homological equation, Lie transforms, the
//! iterative normalization and point transport through the generators.

mod homological;
mod lie;
mod normalize;
mod params;
mod remainder;
mod transport;

pub use homological::{h0_polynomial, homological_residual, solve_homological};
pub use lie::{lie_series, lie_transform, pullback};
pub use normalize::{normalize, NormalFormResult, RemainderLedger};
pub use params::{fit_a_constant, nstar, rstar_radius, sstar, NormalFormParams, NormalizeMode, TailCutoff};
pub use remainder::{tail_field_sup, TailProbe};
pub use transport::{transform_state, Direction, Transport, TransportOptions};

use crate::poly::PolyError;
use crate::resonance::ResonanceError;

#[derive(Debug, thiserror::Error)]
pub enum BirkhoffError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("term {monomial} has {tail} tail factors; the homological solver needs at most 2")]
    TailPrecondition { monomial: String, tail: u32 },
    #[error("generator has a term of degree {0}; Lie series need degree >= 3")]
    GeneratorDegree(u32),
    #[error("homological residual {residual:e} exceeds 1e-12 * {scale:e}")]
    Residual { residual: f64, scale: f64 },
    #[error("degree bookkeeping violated at step {step}: carry has degree {degree}")]
    Bookkeeping { step: u32, degree: u32 },
    #[error("flow integration did not converge: {0}")]
    NonConvergence(String),
    #[error("state norm {norm:e} outside trust radius {radius:e}")]
    TrustRadius { norm: f64, radius: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
}
