//! Polynomial algebra in the complex Birkhoff variables `xi`, `eta`.

mod coeff;
mod compiled;
mod mode;
mod monomial;
mod norms;
mod polynomial;
mod text;

pub use coeff::{exact_l1, gaussian, is_exactly_real, Coeff, GaussianRational, PRUNE_REL};
pub use compiled::{CompiledPolynomial, ModeIndex};
pub use mode::{weight, IndexDomain, ModeId, WeightScheme};
pub use monomial::{Factor, Monomial};
pub use norms::{majorant_norm, monomial_nu, nu, sampled_tame_ratio, single_term};
pub use polynomial::Polynomial;
pub use text::{format_hex, parse_hex};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial is not homogeneous of degree >= 2 ({0})")]
    NonHomogeneous(String),
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
