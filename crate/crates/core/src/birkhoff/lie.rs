//! Lie transforms `g o Phi_chi = sum_l ad_chi^l g / l!`.

use num_complex::Complex64;

use super::BirkhoffError;
use crate::poly::Polynomial;

fn check_generator(chi: &Polynomial) -> Result<(), BirkhoffError> {
    match chi.min_degree() {
        Some(d) if d < 3 => Err(BirkhoffError::GeneratorDegree(d)),
        _ => Ok(()),
    }
}

/// `sum_{l >= first} g_l` where `g_first` is given and
/// `g_l = {chi, g_{l-1}} / l`. The series stops once a term vanishes under
/// the cap; dropped mass accumulates in the result's ledger.
pub fn lie_series(g_first: &Polynomial, first: u32, chi: &Polynomial, cap: u32) -> Result<Polynomial, BirkhoffError> {
    check_generator(chi)?;
    let chi = chi.truncate(cap);
    let mut term = g_first.truncate(cap);
    let mut total = term.clone();
    let mut l = first + 1;
    while !term.is_zero() && !chi.is_zero() {
        term = chi.poisson_bracket(&term)?.scale(&Complex64::new(1.0 / l as f64, 0.0));
        total = total.add(&term)?;
        l += 1;
    }
    Ok(total)
}

/// `g o Phi_chi` truncated at degree `cap`; `chi` must have min degree 3.
pub fn lie_transform(g: &Polynomial, chi: &Polynomial, cap: u32) -> Result<Polynomial, BirkhoffError> {
    lie_series(g, 0, chi, cap)
}

/// `g o Phi_1 o ... o Phi_r`: transforms by each generator in order.
pub fn pullback(g: &Polynomial, generators: &[Polynomial], cap: u32) -> Result<Polynomial, BirkhoffError> {
    let mut out = g.truncate(cap);
    for chi in generators {
        out = lie_transform(&out, chi, cap)?;
    }
    Ok(out)
}
