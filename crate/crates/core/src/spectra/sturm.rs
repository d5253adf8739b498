//! Spectral Galerkin solver for -d^2/dx^2 + V on (0, pi).

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::potential::CosinePotential;
use super::SpectraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// basis sqrt(2/pi) sin(kx), k = 1..M
    Dirichlet,
    /// basis 1/sqrt(pi), sqrt(2/pi) cos(kx), k = 1..M-1
    Neumann,
}

/// Refinement tolerance on the first `jmax` eigenvalues.
pub const REFINEMENT_TOL: f64 = 1e-8;

/// Eigenvectors in the Galerkin basis.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    pub boundary: Boundary,
    pub galerkin_size: usize,
    /// column i = coefficients of the i-th eigenfunction in the Galerkin basis
    pub coeffs: DMatrix<f64>,
}

impl EigenBasis {
    pub fn count(&self) -> usize {
        self.coeffs.ncols()
    }

    /// Frequency carried by Galerkin row `row`.
    fn row_freq(&self, row: usize) -> usize {
        match self.boundary {
            Boundary::Dirichlet => row + 1,
            Boundary::Neumann => row,
        }
    }

    /// Value at x of eigenfunction `idx` (0-based), extended to the circle
    /// (odd for Dirichlet, even for Neumann) and normalized in L^2(-pi, pi).
    pub fn eval(&self, idx: usize, x: f64) -> f64 {
        let col = self.coeffs.column(idx);
        let mut s = 0.0;
        for (row, c) in col.iter().enumerate() {
            let k = self.row_freq(row) as f64;
            s += match self.boundary {
                Boundary::Dirichlet => c * (k * x).sin() / PI.sqrt(),
                Boundary::Neumann if row == 0 => c / (2.0 * PI).sqrt(),
                Boundary::Neumann => c * (k * x).cos() / PI.sqrt(),
            };
        }
        s
    }

    /// |coefficient| on the orthonormal exponential e^{ikx}/sqrt(2pi), for
    /// both k and -k (equal by parity).
    pub fn exp_coefficient(&self, idx: usize, k: usize) -> f64 {
        let row = match self.boundary {
            Boundary::Dirichlet if k == 0 => return 0.0,
            Boundary::Dirichlet => k - 1,
            Boundary::Neumann => k,
        };
        if row >= self.coeffs.nrows() {
            return 0.0;
        }
        let c = self.coeffs[(row, idx)].abs();
        if self.boundary == Boundary::Neumann && k == 0 {
            c
        } else {
            c / 2f64.sqrt()
        }
    }

    /// Largest frequency present in the basis.
    pub fn bandwidth(&self) -> usize {
        self.row_freq(self.coeffs.nrows() - 1)
    }

    /// max |<phi_i, phi_j> - delta_ij| in the coefficient inner product.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.coeffs.transpose() * &self.coeffs;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Galerkin matrix of -d^2/dx^2 + V in the chosen basis.
pub fn galerkin_matrix(v: &CosinePotential, bc: Boundary, m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    match bc {
        Boundary::Dirichlet => {
            for r in 0..m {
                for c in 0..m {
                    let (k, l) = (r + 1, c + 1);
                    let mut x = -0.5 * v.coeff(k + l);
                    if k == l {
                        x += (k * k) as f64 + v.coeff(0);
                    } else {
                        x += 0.5 * v.coeff(k.abs_diff(l));
                    }
                    a[(r, c)] = x;
                }
            }
        }
        Boundary::Neumann => {
            for k in 0..m {
                for l in 0..m {
                    let x = match (k, l) {
                        (0, 0) => v.coeff(0),
                        (0, l) => v.coeff(l) / 2f64.sqrt(),
                        (k, 0) => v.coeff(k) / 2f64.sqrt(),
                        (k, l) => {
                            let mut x = 0.5 * v.coeff(k + l);
                            if k == l {
                                x += (k * k) as f64 + v.coeff(0);
                            } else {
                                x += 0.5 * v.coeff(k.abs_diff(l));
                            }
                            x
                        }
                    };
                    a[(k, l)] = x;
                }
            }
        }
    }
    a
}

fn solve(v: &CosinePotential, bc: Boundary, m: usize) -> Result<(Vec<f64>, DMatrix<f64>), SpectraError> {
    let a = galerkin_matrix(v, bc, m);
    let asym = (&a - a.transpose()).abs().max();
    assert!(asym == 0.0, "Galerkin matrix not symmetric ({asym})");
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        // sign convention: largest-magnitude entry positive
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col = -col;
        }
        vecs.set_column(dst, &col);
    }
    Ok((vals, vecs))
}

/// First `jmax` eigenpairs, ascending, checked against a 2M solve.
pub fn sturm_liouville(v: &CosinePotential, bc: Boundary, jmax: usize, m: usize) -> Result<(Vec<f64>, EigenBasis), SpectraError> {
    if jmax == 0 {
        return Err(SpectraError::InvalidParams("jmax must be >= 1".into()));
    }
    if m < 4 * jmax {
        return Err(SpectraError::GalerkinTooSmall { m, jmax });
    }
    let (vals, vecs) = solve(v, bc, m)?;
    let (fine, _) = solve(v, bc, 2 * m)?;
    for j in 0..jmax {
        let rel = (vals[j] - fine[j]).abs() / fine[j].abs().max(1.0);
        if rel > REFINEMENT_TOL {
            return Err(SpectraError::Unresolved { j, rel });
        }
    }
    let coeffs = vecs.columns(0, jmax).into_owned();
    Ok((vals[..jmax].to_vec(), EigenBasis { boundary: bc, galerkin_size: m, coeffs }))
}

/// Periodic spectrum of an even potential: label j > 0 carries the j-th
/// Dirichlet eigenvalue, j <= 0 the Neumann eigenvalue of index -j (0 is the
/// lowest). Returns (labels, eigenvalues) for -jmax..=jmax and both bases.
pub fn periodic_spectrum(v: &CosinePotential, jmax: usize, m: usize) -> Result<(Vec<(i32, f64)>, EigenBasis, EigenBasis), SpectraError> {
    let (dl, db) = sturm_liouville(v, Boundary::Dirichlet, jmax, m)?;
    let (nl, nb) = sturm_liouville(v, Boundary::Neumann, jmax + 1, m.max(4 * (jmax + 1)))?;
    let mut out = Vec::with_capacity(2 * jmax + 1);
    for n in (0..=jmax).rev() {
        out.push((-(n as i32), nl[n]));
    }
    for (j, l) in dl.iter().enumerate() {
        out.push((j as i32 + 1, *l));
    }
    Ok((out, db, nb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_dirichlet_is_j_squared() {
        let (l, b) = sturm_liouville(&CosinePotential::zero(), Boundary::Dirichlet, 20, 80).unwrap();
        for (j, x) in l.iter().enumerate() {
            assert!((x - ((j + 1) * (j + 1)) as f64).abs() <= 1e-10);
        }
        assert!(b.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn free_neumann_starts_at_zero() {
        let (l, _) = sturm_liouville(&CosinePotential::zero(), Boundary::Neumann, 5, 20).unwrap();
        for (n, x) in l.iter().enumerate() {
            assert!((x - (n * n) as f64).abs() <= 1e-10);
        }
    }

    #[test]
    fn small_galerkin_rejected() {
        assert!(matches!(
            sturm_liouville(&CosinePotential::zero(), Boundary::Dirichlet, 10, 20),
            Err(SpectraError::GalerkinTooSmall { .. })
        ));
    }

    #[test]
    fn eigenfunctions_normalized_on_circle() {
        let v = CosinePotential::from_coeffs(0.0, &[0.3, -0.2, 0.1]);
        for bc in [Boundary::Dirichlet, Boundary::Neumann] {
            let (_, b) = sturm_liouville(&v, bc, 3, 16).unwrap();
            let q = 256;
            let h = 2.0 * PI / q as f64;
            for i in 0..3 {
                let n: f64 = (0..q).map(|t| b.eval(i, -PI + t as f64 * h).powi(2)).sum::<f64>() * h;
                assert!((n - 1.0).abs() < 1e-12, "{bc:?} {i} {n}");
            }
        }
    }

    #[test]
    fn periodic_labels() {
        let v = CosinePotential::from_coeffs(0.0, &[0.1]);
        let (spec, _, _) = periodic_spectrum(&v, 3, 16).unwrap();
        let labels: Vec<i32> = spec.iter().map(|(j, _)| *j).collect();
        assert_eq!(labels, vec![-3, -2, -1, 0, 1, 2, 3]);
    }
}
