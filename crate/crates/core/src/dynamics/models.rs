//! Model Hamiltonians `H0 + P` in Birkhoff variables.
//!
//! Normalizations (real orthonormal eigenfunctions `phi_j` on (-pi, pi)):
//! * wave: `u = sum_j omega_j^{-1/2} phi_j q_j`, `q_j = -i (xi_j - eta_j) / sqrt 2`,
//!   `P = int G(x, u)`;
//! * 1-d Schroedinger: `psi = sqrt 2 sum_j xi_j phi_j`, `P = int g`;
//! * coupled pair: `psi = sum_{j>0} xi_j phi_j`, `phi = sum_{j>0} xi_{-j} phi'_j`, `P = -int g`;
//! * lattice: `psi = (2 pi)^{-d/2} sum_k xi_k e^{ik.x}`, `P = kappa int |psi|^4`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::DynamicsError;
use crate::birkhoff::h0_polynomial;
use crate::poly::{ModeId, Monomial, Polynomial};
use crate::spectra::{
    coupled_frequencies, nlw_frequencies, periodic_spectrum, schroedinger_frequencies, sturm_liouville, Boundary, CosinePotential, EigenBasis,
    FrequencyTable, ModelTag,
};

/// x-dependence of a nonlinear coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Const,
    Sin(u32),
    Cos(u32),
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Const => 1.0,
            Profile::Sin(n) => (*n as f64 * x).sin(),
            Profile::Cos(n) => (*n as f64 * x).cos(),
        }
    }

    fn bandwidth(&self) -> usize {
        match self {
            Profile::Const => 0,
            Profile::Sin(n) | Profile::Cos(n) => *n as usize,
        }
    }
}

/// `coeff * profile(x) * u^power`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub power: u32,
    pub coeff: f64,
    pub profile: Profile,
}

/// `coeff * profile(x) * psi^a conj(psi)^b`, plus its conjugate when a != b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlsTerm {
    pub psi: u32,
    pub psi_bar: u32,
    pub coeff: f64,
    pub profile: Profile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Nonlinearity {
    Wave(Vec<PowerTerm>),
    Schroedinger(Vec<NlsTerm>),
    /// `g = k_psi |psi|^4 + k_phi |phi|^4 + k_cross |psi|^2 |phi|^2`
    Coupled { k_psi: f64, k_phi: f64, k_cross: f64 },
    /// `g = kappa |psi|^4`, x-independent
    Lattice { kappa: f64 },
}

/// Eigenfunctions backing the mode labels of a model.
#[derive(Clone, Debug)]
pub enum ModelBasis {
    /// label j >= 1 is column j-1
    Dirichlet(EigenBasis),
    /// j > 0: Dirichlet column j-1; j <= 0: Neumann column -j
    Periodic { dir: EigenBasis, neu: EigenBasis },
    /// j > 0: first field, column j-1; j < 0: second field, column -j-1
    Coupled { first: EigenBasis, second: EigenBasis },
    Fourier { d: usize },
}

impl ModelBasis {
    fn eval(&self, m: &ModeId, x: f64) -> Option<f64> {
        let j = m.first();
        match self {
            ModelBasis::Dirichlet(b) if j >= 1 && (j as usize) <= b.count() => Some(b.eval(j as usize - 1, x)),
            ModelBasis::Periodic { dir, .. } if j >= 1 && (j as usize) <= dir.count() => Some(dir.eval(j as usize - 1, x)),
            ModelBasis::Periodic { neu, .. } if j <= 0 && ((-j) as usize) < neu.count() => Some(neu.eval((-j) as usize, x)),
            ModelBasis::Coupled { first, .. } if j >= 1 && (j as usize) <= first.count() => Some(first.eval(j as usize - 1, x)),
            ModelBasis::Coupled { second, .. } if j <= -1 && ((-j) as usize) <= second.count() => Some(second.eval((-j) as usize - 1, x)),
            _ => None,
        }
    }

    fn bandwidth(&self) -> usize {
        match self {
            ModelBasis::Dirichlet(b) => b.bandwidth(),
            ModelBasis::Periodic { dir, neu } => dir.bandwidth().max(neu.bandwidth()),
            ModelBasis::Coupled { first, second } => first.bandwidth().max(second.bandwidth()),
            ModelBasis::Fourier { .. } => 0,
        }
    }
}

/// A real field expanded as `sum_v c_v(x) z_v` over Birkhoff variables.
struct LinearField {
    /// (mode, is_xi, constant factor)
    vars: Vec<(ModeId, bool, Complex64)>,
}

/// Uniform trapezoid grid on (-pi, pi).
struct Grid {
    x: Vec<f64>,
    weight: f64,
}

impl Grid {
    fn new(points: usize) -> Self {
        let h = 2.0 * PI / points as f64;
        Grid { x: (0..points).map(|n| -PI + h * n as f64).collect(), weight: h }
    }
}

/// One factor `field^e` of an integrand.
struct Power<'a> {
    field: &'a LinearField,
    exponent: u32,
}

/// Multisets of size `k` drawn from `0..n`, as nondecreasing index lists.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `k! / prod(multiplicities!)`
fn multinomial(ms: &[usize]) -> f64 {
    let mut num = 1.0;
    for i in 1..=ms.len() {
        num *= i as f64;
    }
    let mut i = 0;
    while i < ms.len() {
        let mut j = i;
        while j < ms.len() && ms[j] == ms[i] {
            j += 1;
        }
        for r in 1..=(j - i) {
            num /= r as f64;
        }
        i = j;
    }
    num
}

/// Adds `coeff * int profile(x) prod_f field_f(x)^{e_f} dx` to `out`.
fn integrate_product(
    out: &mut BTreeMap<Monomial, Complex64>,
    basis: &ModelBasis,
    grid: &Grid,
    coeff: Complex64,
    profile: Profile,
    factors: &[Power<'_>],
) -> Result<(), DynamicsError> {
    // tabulate each field's variables on the grid
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(factors.len());
    for f in factors {
        let mut t = Vec::with_capacity(f.field.vars.len());
        for (m, _, _) in &f.field.vars {
            let mut row = Vec::with_capacity(grid.x.len());
            for &x in &grid.x {
                row.push(basis.eval(m, x).ok_or_else(|| DynamicsError::Model(format!("no basis function for mode {m}")))?);
            }
            t.push(row);
        }
        tables.push(t);
    }
    let prof: Vec<f64> = grid.x.iter().map(|&x| profile.eval(x)).collect();
    let choices: Vec<Vec<Vec<usize>>> = factors.iter().map(|f| multisets(f.field.vars.len(), f.exponent as usize)).collect();
    let mut idx = vec![0usize; factors.len()];
    let mut vals = vec![0.0; grid.x.len()];
    'outer: loop {
        let mut c = coeff;
        vals.copy_from_slice(&prof);
        let mut triples = Vec::new();
        for (fi, f) in factors.iter().enumerate() {
            let ms = &choices[fi][idx[fi]];
            c *= multinomial(ms);
            for &v in ms {
                let (m, is_xi, k) = &f.field.vars[v];
                c *= *k;
                let row = &tables[fi][v];
                vals.iter_mut().zip(row).for_each(|(a, b)| *a *= b);
                triples.push((m.clone(), u32::from(*is_xi), u32::from(!*is_xi)));
            }
        }
        let integral: f64 = vals.iter().sum::<f64>() * grid.weight;
        if integral != 0.0 {
            *out.entry(Monomial::from_factors(triples)).or_insert(Complex64::new(0.0, 0.0)) += c * integral;
        }
        // odometer over the factor choices
        for fi in 0..factors.len() {
            idx[fi] += 1;
            if idx[fi] < choices[fi].len() {
                continue 'outer;
            }
            idx[fi] = 0;
        }
        break;
    }
    Ok(())
}

fn collect_terms(map: BTreeMap<Monomial, Complex64>, dim: usize) -> Result<Polynomial, DynamicsError> {
    let scale = map.values().map(|c| c.norm()).fold(0.0, f64::max);
    let mut p = Polynomial::zero(dim);
    for (m, c) in map {
        if c.norm() > 1e-14 * scale {
            p.add_term(m, c)?;
        }
    }
    Ok(p)
}

/// Interaction polynomial on a quadrature grid of `points` nodes.
fn quadrature_perturbation(freqs: &FrequencyTable, basis: &ModelBasis, nl: &Nonlinearity, points: usize) -> Result<Polynomial, DynamicsError> {
    let grid = Grid::new(points);
    let mut map = BTreeMap::new();
    let modes: Vec<ModeId> = freqs.modes().cloned().collect();
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    match nl {
        Nonlinearity::Wave(terms) => {
            let mut vars = Vec::new();
            for m in &modes {
                let w = freqs.get(m).expect("mode from table");
                let k = w.powf(-0.5) * r2;
                // -i (xi - eta) k
                vars.push((m.clone(), true, Complex64::new(0.0, -k)));
                vars.push((m.clone(), false, Complex64::new(0.0, k)));
            }
            let u = LinearField { vars };
            for t in terms {
                integrate_product(&mut map, basis, &grid, Complex64::new(t.coeff, 0.0), t.profile, &[Power { field: &u, exponent: t.power }])?;
            }
        }
        Nonlinearity::Schroedinger(terms) => {
            let s2 = 2f64.sqrt();
            let psi = LinearField { vars: modes.iter().map(|m| (m.clone(), true, Complex64::new(s2, 0.0))).collect() };
            let psib = LinearField { vars: modes.iter().map(|m| (m.clone(), false, Complex64::new(s2, 0.0))).collect() };
            for t in terms {
                let c = Complex64::new(t.coeff, 0.0);
                let f = [Power { field: &psi, exponent: t.psi }, Power { field: &psib, exponent: t.psi_bar }];
                integrate_product(&mut map, basis, &grid, c, t.profile, &f)?;
                if t.psi != t.psi_bar {
                    let g = [Power { field: &psi, exponent: t.psi_bar }, Power { field: &psib, exponent: t.psi }];
                    integrate_product(&mut map, basis, &grid, c, t.profile, &g)?;
                }
            }
        }
        Nonlinearity::Coupled { k_psi, k_phi, k_cross } => {
            let one = Complex64::new(1.0, 0.0);
            let side = |pos: bool, xi: bool| LinearField {
                vars: modes.iter().filter(|m| (m.first() > 0) == pos).map(|m| (m.clone(), xi, one)).collect(),
            };
            let (a, ab, b, bb) = (side(true, true), side(true, false), side(false, true), side(false, false));
            integrate_product(&mut map, basis, &grid, Complex64::new(-k_psi, 0.0), Profile::Const, &[Power { field: &a, exponent: 2 }, Power { field: &ab, exponent: 2 }])?;
            integrate_product(&mut map, basis, &grid, Complex64::new(-k_phi, 0.0), Profile::Const, &[Power { field: &b, exponent: 2 }, Power { field: &bb, exponent: 2 }])?;
            let cross = [Power { field: &a, exponent: 1 }, Power { field: &ab, exponent: 1 }, Power { field: &b, exponent: 1 }, Power { field: &bb, exponent: 1 }];
            integrate_product(&mut map, basis, &grid, Complex64::new(-k_cross, 0.0), Profile::Const, &cross)?;
        }
        Nonlinearity::Lattice { .. } => return Err(DynamicsError::Model("lattice nonlinearity is built combinatorially".into())),
    }
    collect_terms(map, freqs.dim())
}

fn max_degree(nl: &Nonlinearity) -> usize {
    match nl {
        Nonlinearity::Wave(t) => t.iter().map(|x| x.power as usize).max().unwrap_or(0),
        Nonlinearity::Schroedinger(t) => t.iter().map(|x| (x.psi + x.psi_bar) as usize).max().unwrap_or(0),
        Nonlinearity::Coupled { .. } | Nonlinearity::Lattice { .. } => 4,
    }
}

fn max_profile(nl: &Nonlinearity) -> usize {
    match nl {
        Nonlinearity::Wave(t) => t.iter().map(|x| x.profile.bandwidth()).max().unwrap_or(0),
        Nonlinearity::Schroedinger(t) => t.iter().map(|x| x.profile.bandwidth()).max().unwrap_or(0),
        _ => 0,
    }
}

/// `kappa (2 pi)^{-d} sum_{k1 + k2 = k3 + k4} xi_k1 xi_k2 eta_k3 eta_k4` over
/// ordered tuples within the table.
fn lattice_quartic(freqs: &FrequencyTable, kappa: f64, d: usize) -> Result<Polynomial, DynamicsError> {
    let modes: Vec<ModeId> = freqs.modes().cloned().collect();
    let c = kappa / (2.0 * PI).powi(d as i32);
    let mut map: BTreeMap<Monomial, Complex64> = BTreeMap::new();
    for k1 in &modes {
        for k2 in &modes {
            for k3 in &modes {
                let k4: Vec<i32> = (0..d).map(|i| k1.coords()[i] + k2.coords()[i] - k3.coords()[i]).collect();
                let k4 = ModeId::new(&k4);
                if freqs.get(&k4).is_none() {
                    continue;
                }
                let m = Monomial::from_factors([(k1.clone(), 1, 0), (k2.clone(), 1, 0), (k3.clone(), 0, 1), (k4, 0, 1)]);
                *map.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
    }
    collect_terms(map, d)
}

/// `H = sum_j omega_j I_j + P` for the model behind `freqs`.
///
/// One-dimensional models are integrated on a uniform grid large enough to
/// be exact for the trigonometric polynomials involved, and the result is
/// checked against a grid twice as fine.
pub fn build_model_hamiltonian(freqs: &FrequencyTable, basis: &ModelBasis, nl: &Nonlinearity) -> Result<Polynomial, DynamicsError> {
    let h0 = h0_polynomial(freqs, None)?;
    let p = match (nl, basis) {
        (Nonlinearity::Lattice { kappa }, ModelBasis::Fourier { d }) => lattice_quartic(freqs, *kappa, *d)?,
        (Nonlinearity::Lattice { .. }, _) | (_, ModelBasis::Fourier { .. }) => {
            return Err(DynamicsError::Model("lattice models need a lattice nonlinearity and a Fourier basis".into()))
        }
        _ => {
            let band = max_degree(nl) * basis.bandwidth() + max_profile(nl) + 1;
            let points = (2 * band).next_power_of_two().max(64);
            let coarse = quadrature_perturbation(freqs, basis, nl, points)?;
            let fine = quadrature_perturbation(freqs, basis, nl, 2 * points)?;
            let diff = coarse.sub(&fine)?.max_coeff();
            if diff > 1e-10 * fine.max_coeff().max(1e-300) {
                return Err(DynamicsError::Quadrature(diff));
            }
            fine
        }
    };
    Ok(h0.add(&p)?)
}

/// Frequencies and basis of a one-dimensional model with potential `v`.
pub fn model_spectrum(tag: ModelTag, v: &CosinePotential, second: Option<&CosinePotential>, jmax: u32, mass: f64) -> Result<(FrequencyTable, ModelBasis), DynamicsError> {
    let j = jmax as usize;
    let m = (4 * (j + 1)).max(16);
    let out = match tag {
        ModelTag::NlwDirichlet | ModelTag::Nls1dDirichlet => {
            let (l, b) = sturm_liouville(v, Boundary::Dirichlet, j, m)?;
            let lam = l.iter().enumerate().map(|(i, x)| (ModeId::scalar(i as i32 + 1), *x)).collect();
            let t = if tag == ModelTag::NlwDirichlet { nlw_frequencies(tag, &lam, mass)? } else { schroedinger_frequencies(tag, &lam)? };
            (t, ModelBasis::Dirichlet(b))
        }
        ModelTag::NlwPeriodic => {
            let (spec, dir, neu) = periodic_spectrum(v, j, m)?;
            let lam = spec.into_iter().map(|(j, x)| (ModeId::scalar(j), x)).collect();
            (nlw_frequencies(tag, &lam, mass)?, ModelBasis::Periodic { dir, neu })
        }
        ModelTag::NlsCoupled => {
            let v2 = second.ok_or_else(|| DynamicsError::Model("coupled model needs a second potential".into()))?;
            let (l1, b1) = sturm_liouville(v, Boundary::Dirichlet, j, m)?;
            let (l2, b2) = sturm_liouville(v2, Boundary::Dirichlet, j, m)?;
            (coupled_frequencies(&l1, &l2)?, ModelBasis::Coupled { first: b1, second: b2 })
        }
        ModelTag::NlsDd(_) | ModelTag::Custom => return Err(DynamicsError::Model(format!("{} is not a one-dimensional potential model", tag.name()))),
    };
    Ok(out)
}
