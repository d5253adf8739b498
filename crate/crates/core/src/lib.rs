//! Birkhoff normal forms for mode-truncated Hamiltonian PDEs.
//!
//! * [`poly`]: polynomials in complex Birkhoff variables, Poisson brackets,
//!   tame-norm estimators.
//! * [`spectra`]: random potentials, Sturm-Liouville eigenvalues, model
//!   frequencies.
//! * [`resonance`]: small divisors, near-resonance enumeration and exception
//!   patterns.
//! * [`birkhoff`]: homological equation, Lie transforms, the iterative
//!   normalization and coordinate transport.
//! * [`dynamics`]: symplectic integration and action-drift experiments.

pub mod birkhoff;
pub mod dynamics;
pub mod poly;
pub mod resonance;
pub mod seeds;
pub mod spectra;
