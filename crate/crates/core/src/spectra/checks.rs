//! Diagnostics on computed spectra: exponential localization of the
//! eigenfunctions, large-j expansion of the eigenvalues, and finite-difference
//! eigenvalue derivatives.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;

use super::potential::CosinePotential;
use super::sturm::{sturm_liouville, Boundary, EigenBasis};
use super::SpectraError;

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationReport {
    pub order: u32,
    /// smallest C with |phi_j^k| <= C / (1 + min |k -+ j|)^n
    pub c_n: f64,
    /// (j, k) attaining it
    pub worst: (usize, usize),
}

/// Fit the localization constant of the first eigenfunctions of `basis`.
/// Eigenfunction index i corresponds to j = i+1 (Dirichlet) or j = i (Neumann).
pub fn check_localization(basis: &EigenBasis, n: u32) -> LocalizationReport {
    let mut best = (0.0, (0, 0));
    for i in 0..basis.count() {
        let j = match basis.boundary {
            Boundary::Dirichlet => i + 1,
            Boundary::Neumann => i,
        };
        for k in 0..=basis.bandwidth() {
            let c = basis.exp_coefficient(i, k);
            let dist = k.abs_diff(j).min(k + j) as f64;
            let v = c * (1.0 + dist).powi(n as i32);
            if v > best.0 {
                best = (v, (j, k));
            }
        }
    }
    LocalizationReport { order: n, c_n: best.0, worst: best.1 }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit {
    /// coefficients of 1, j^-2, j^-4
    pub coeffs: [f64; 3],
    pub rms_residual: f64,
    /// (1/2pi) int_0^{2pi} V
    pub mean_value: f64,
    /// int_0^{2pi} V
    pub integral: f64,
    /// which functional the fitted constant is closer to
    pub closer_to_mean: bool,
    pub fit_range: (usize, usize),
}

/// Least squares fit of lambda_j - j^2 against {1, j^-2, j^-4} over the upper
/// two thirds of the computed range.
pub fn expansion_fit(lambda: &[f64], v: &CosinePotential) -> Result<ExpansionFit, SpectraError> {
    let jmax = lambda.len();
    if jmax < 12 {
        return Err(SpectraError::IllConditioned(format!("need at least 12 eigenvalues, got {jmax}")));
    }
    let lo = jmax.div_ceil(3);
    let rows: Vec<usize> = (lo..=jmax).collect();
    let a = DMatrix::from_fn(rows.len(), 3, |r, c| (rows[r] as f64).powi(-2 * c as i32));
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&j| lambda[j - 1] - (j * j) as f64));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(SpectraError::IllConditioned(format!("singular values {smin:e} / {smax:e}")));
    }
    let x = svd.solve(&b, 1e-14).map_err(|e| SpectraError::IllConditioned(e.to_string()))?;
    let res = &a * &x - &b;
    let mean = v.mean_value();
    let integral = 2.0 * PI * mean;
    Ok(ExpansionFit {
        coeffs: [x[0], x[1], x[2]],
        rms_residual: (res.norm_squared() / rows.len() as f64).sqrt(),
        mean_value: mean,
        integral,
        closer_to_mean: (x[0] - mean).abs() <= (x[0] - integral).abs(),
        fit_range: (lo, jmax),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub boundary: Boundary,
    pub j: usize,
    pub k: usize,
    pub h: f64,
    /// central difference of lambda_j in the cos(kx) coefficient
    pub derivative: f64,
    /// first-order perturbation value at V = 0
    pub leading: f64,
    pub deviation: f64,
}

/// Leading derivative of the free eigenvalue: the cos(kx) perturbation only
/// couples sin(jx) to itself through cos(2jx), with weight -1/2 (Dirichlet)
/// or +1/2 (Neumann, index j >= 1).
pub fn leading_derivative(bc: Boundary, j: usize, k: usize) -> f64 {
    if j >= 1 && k == 2 * j {
        match bc {
            Boundary::Dirichlet => -0.5,
            Boundary::Neumann => 0.5,
        }
    } else {
        0.0
    }
}

/// Central difference of lambda_j (1-based for Dirichlet, 0-based Neumann
/// index) with respect to the cos(kx) coefficient of V.
pub fn eigenvalue_derivative_check(v: &CosinePotential, bc: Boundary, j: usize, k: usize, h: f64) -> Result<DerivativeReport, SpectraError> {
    let idx = match bc {
        Boundary::Dirichlet if j == 0 => return Err(SpectraError::InvalidParams("Dirichlet labels start at 1".into())),
        Boundary::Dirichlet => j - 1,
        Boundary::Neumann => j,
    };
    let count = idx + 1;
    let m = (4 * count).max(2 * k + 8).max(v.v.len() + 8);
    let base = v.coeff(k);
    let (lp, _) = sturm_liouville(&v.with_coeff(k, base + h), bc, count, m)?;
    let (lm, _) = sturm_liouville(&v.with_coeff(k, base - h), bc, count, m)?;
    let derivative = (lp[idx] - lm[idx]) / (2.0 * h);
    let leading = leading_derivative(bc, j, k);
    Ok(DerivativeReport { boundary: bc, j, k, h, derivative, leading, deviation: (derivative - leading).abs() })
}
