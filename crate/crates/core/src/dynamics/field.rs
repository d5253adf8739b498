//! Hamiltonian vector fields `xi' = -i dH/deta` on the real slice.

use num_complex::Complex64;
use std::sync::Arc;

use super::{DynamicsError, State};
use crate::poly::{CompiledPolynomial, ModeIndex, Polynomial};

/// A compiled Hamiltonian, with its diagonal quadratic part kept apart so
/// integrators can treat the linear rotation exactly.
#[derive(Clone, Debug)]
pub struct HamiltonianField {
    index: Arc<ModeIndex>,
    full: CompiledPolynomial,
    /// everything except `sum_j omega_j xi_j eta_j`
    rest: CompiledPolynomial,
    omega: Vec<f64>,
}

impl HamiltonianField {
    pub fn new(h: &Polynomial, index: Arc<ModeIndex>) -> Result<Self, DynamicsError> {
        let defect = h.reality_defect();
        if defect > 1e-12 * h.max_coeff().max(1.0) {
            return Err(DynamicsError::Model(format!("Hamiltonian is not real (defect {defect:e})")));
        }
        let mut omega = vec![0.0; index.len()];
        let mut rest = Polynomial::zero(h.dim());
        for (m, c) in h.terms() {
            let f = m.factors();
            if m.degree() == 2 && f.len() == 1 && f[0].xi == 1 {
                if let Some(i) = index.position(&f[0].mode) {
                    omega[i] += c.re;
                    if c.im != 0.0 {
                        rest.add_term(m.clone(), Complex64::new(0.0, c.im))?;
                    }
                    continue;
                }
            }
            rest.add_term(m.clone(), *c)?;
        }
        Ok(HamiltonianField {
            full: CompiledPolynomial::new(h, &index)?,
            rest: CompiledPolynomial::new(&rest, &index)?,
            index,
            omega,
        })
    }

    pub fn index(&self) -> &Arc<ModeIndex> {
        &self.index
    }

    /// Diagonal linear frequencies, in index order.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Real part of `H` on the real slice.
    pub fn energy(&self, xi: &[Complex64]) -> f64 {
        let eta: Vec<Complex64> = xi.iter().map(|z| z.conj()).collect();
        self.full.value(xi, &eta).re
    }

    /// Full field into `out`.
    pub fn eval(&self, xi: &[Complex64], out: &mut [Complex64]) {
        apply_field(&self.full, xi, out);
    }

    /// Field of the non-diagonal part only.
    pub(crate) fn eval_rest(&self, xi: &[Complex64], out: &mut [Complex64]) {
        apply_field(&self.rest, xi, out);
    }
}

fn apply_field(h: &CompiledPolynomial, xi: &[Complex64], out: &mut [Complex64]) {
    let eta: Vec<Complex64> = xi.iter().map(|z| z.conj()).collect();
    let mut dxi = vec![Complex64::new(0.0, 0.0); xi.len()];
    h.gradient(xi, &eta, &mut dxi, out);
    // -i * z
    out.iter_mut().for_each(|o| *o = Complex64::new(o.im, -o.re));
}

/// `xi' = -i dH/deta` at `z`.
pub fn hamiltonian_flow_field(h: &Polynomial, z: &State) -> Result<Vec<Complex64>, DynamicsError> {
    let f = HamiltonianField::new(h, z.index().clone())?;
    let mut out = vec![Complex64::new(0.0, 0.0); z.xi.len()];
    f.eval(&z.xi, &mut out);
    Ok(out)
}
