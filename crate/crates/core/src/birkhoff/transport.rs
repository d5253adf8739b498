//! Moving phase points through the normalizing transformation by
//! integrating the flows of the generators.

use num_complex::Complex64;
use std::sync::Arc;

use super::BirkhoffError;
use crate::dynamics::State;
use crate::poly::{CompiledPolynomial, ModeIndex, Polynomial, WeightScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// normalized coordinates to original ones: `T = Phi_1 o ... o Phi_r`
    Forward,
    /// original coordinates to normalized ones
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportOptions {
    /// absolute tolerance per unit-time flow
    pub tol: f64,
    pub base_steps: usize,
    pub max_doublings: u32,
    pub trust_radius: Option<f64>,
    pub s: f64,
    pub weights: WeightScheme,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { tol: 1e-12, base_steps: 64, max_doublings: 10, trust_radius: None, s: 1.0, weights: WeightScheme::Shifted }
    }
}

/// Compiled generators over a fixed mode index.
#[derive(Clone, Debug)]
pub struct Transport {
    index: Arc<ModeIndex>,
    fields: Vec<CompiledPolynomial>,
}

impl Transport {
    pub fn new(generators: &[Polynomial], index: Arc<ModeIndex>) -> Result<Self, BirkhoffError> {
        let fields = generators.iter().map(|g| CompiledPolynomial::new(g, &index)).collect::<Result<_, _>>()?;
        Ok(Transport { index, fields })
    }

    pub fn index(&self) -> &Arc<ModeIndex> {
        &self.index
    }

    pub fn apply(&self, state: &State, dir: Direction, opts: &TransportOptions) -> Result<State, BirkhoffError> {
        if state.index().as_ref() != self.index.as_ref() {
            return Err(BirkhoffError::InvalidParams("state and transport use different mode sets".into()));
        }
        if let Some(radius) = opts.trust_radius {
            let norm = state.norm_s(opts.s, opts.weights);
            if norm > radius {
                return Err(BirkhoffError::TrustRadius { norm, radius });
            }
        }
        let mut xi = state.xi.clone();
        match dir {
            Direction::Forward => {
                for f in self.fields.iter().rev() {
                    xi = unit_flow(f, 1.0, &xi, opts)?;
                }
            }
            Direction::Inverse => {
                for f in &self.fields {
                    xi = unit_flow(f, -1.0, &xi, opts)?;
                }
            }
        }
        Ok(state.with_xi(xi))
    }
}

/// Apply `T` (forward) or `T^{-1}` (inverse) to a state.
pub fn transform_state(state: &State, generators: &[Polynomial], dir: Direction, opts: &TransportOptions) -> Result<State, BirkhoffError> {
    Transport::new(generators, state.index().clone())?.apply(state, dir, opts)
}

/// `xi' = sign * i dchi/deta` on the real slice.
fn field(chi: &CompiledPolynomial, sign: f64, xi: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
    let eta: Vec<Complex64> = xi.iter().map(|z| z.conj()).collect();
    chi.gradient(xi, &eta, scratch, out);
    for o in out.iter_mut() {
        *o = Complex64::new(-o.im, o.re) * sign;
    }
}

fn rk4(chi: &CompiledPolynomial, sign: f64, xi0: &[Complex64], steps: usize) -> Vec<Complex64> {
    let n = xi0.len();
    let h = 1.0 / steps as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut x = xi0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut scratch = vec![zero; n];
    let mut tmp = vec![zero; n];
    for _ in 0..steps {
        field(chi, sign, &x, &mut k1, &mut scratch);
        for i in 0..n {
            tmp[i] = x[i] + k1[i] * (0.5 * h);
        }
        field(chi, sign, &tmp, &mut k2, &mut scratch);
        for i in 0..n {
            tmp[i] = x[i] + k2[i] * (0.5 * h);
        }
        field(chi, sign, &tmp, &mut k3, &mut scratch);
        for i in 0..n {
            tmp[i] = x[i] + k3[i] * h;
        }
        field(chi, sign, &tmp, &mut k4, &mut scratch);
        for i in 0..n {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    x
}

fn unit_flow(chi: &CompiledPolynomial, sign: f64, xi: &[Complex64], opts: &TransportOptions) -> Result<Vec<Complex64>, BirkhoffError> {
    let mut steps = opts.base_steps.max(1);
    let mut coarse = rk4(chi, sign, xi, steps);
    for _ in 0..opts.max_doublings {
        steps *= 2;
        let fine = rk4(chi, sign, xi, steps);
        let err = coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / 15.0;
        if !err.is_finite() {
            break;
        }
        if err <= opts.tol {
            // Richardson step for a fourth-order method
            return Ok(fine.iter().zip(&coarse).map(|(f, c)| f + (f - c) / 15.0).collect());
        }
        coarse = fine;
    }
    Err(BirkhoffError::NonConvergence(format!("no convergence with {steps} RK4 steps")))
}
