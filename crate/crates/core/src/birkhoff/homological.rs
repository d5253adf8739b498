//! The homological equation `{H0, chi} + Z = f`.

use num_complex::Complex64;
use std::collections::BTreeMap;

use super::BirkhoffError;
use crate::poly::{ModeId, Monomial, Polynomial};
use crate::resonance::{signed_divisor, threshold};
use crate::spectra::FrequencyTable;

/// `sum_j omega_j xi_j eta_j` over the given modes (all of `freqs` if `None`).
pub fn h0_polynomial(freqs: &FrequencyTable, modes: Option<&[ModeId]>) -> Result<Polynomial, BirkhoffError> {
    let mut h = Polynomial::zero(freqs.dim());
    let mut push = |m: &ModeId, w: f64| h.add_term(Monomial::action(m.clone()), Complex64::new(w, 0.0));
    match modes {
        None => {
            for (m, w) in freqs.iter() {
                push(m, *w)?;
            }
        }
        Some(ms) => {
            for m in ms {
                let w = freqs
                    .get(m)
                    .ok_or_else(|| crate::resonance::ResonanceError::UnsupportedMode(m.to_string()))?;
                push(m, w)?;
            }
        }
    }
    Ok(h)
}

/// Split `f` into a resonant part `Z` (divisor at or below `gamma / N^alpha`)
/// and solve for `chi` on the rest, `chi_kl = f_kl / (i omega.(k-l))`.
///
/// Every term of `f` must have at most two tail factors.
pub fn solve_homological(
    f: &Polynomial,
    freqs: &FrequencyTable,
    gamma: f64,
    alpha: f64,
    n: u32,
) -> Result<(Polynomial, Polynomial), BirkhoffError> {
    let thr = threshold(gamma, alpha, n);
    let mut divisors: BTreeMap<&Monomial, f64> = BTreeMap::new();
    for (m, _) in f.terms() {
        let tail = m.tail_degree(n);
        if tail > 2 {
            return Err(BirkhoffError::TailPrecondition { monomial: m.to_string(), tail });
        }
        let d = signed_divisor(freqs, &m.k_minus_l())?;
        if d.abs() > thr {
            divisors.insert(m, d);
        }
    }
    let mut z = f.filter(|m, _| !divisors.contains_key(m));
    z.clear_ledger();
    // c / (i d) = -i c / d
    let mut chi = f
        .filter(|m, _| divisors.contains_key(m))
        .map_coeffs(|m, c| Complex64::new(c.im, -c.re) / divisors[m]);
    chi.clear_ledger();
    Ok((chi, z))
}

/// `||{H0, chi} + Z - f||_1`, with `H0` restricted to the modes `chi` touches.
pub fn homological_residual(f: &Polynomial, chi: &Polynomial, z: &Polynomial, freqs: &FrequencyTable) -> Result<f64, BirkhoffError> {
    let h0 = h0_polynomial(freqs, Some(&chi.support()))?;
    let lhs = h0.uncapped().poisson_bracket(&chi.uncapped())?.add(&z.uncapped())?;
    Ok(lhs.sub(&f.uncapped())?.l1_norm())
}
