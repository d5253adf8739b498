//! Implicit midpoint rule with the diagonal linear part solved exactly
//! inside each step.

use num_complex::Complex64;
use std::ops::ControlFlow;

use super::field::HamiltonianField;
use super::observables::{observe, ObservableFrame, ObservableSpec};
use super::{DynamicsError, State};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub dt: f64,
    /// fixed-point stopping tolerance, relative to the state's sup norm
    pub tol: f64,
    pub max_iter: usize,
    /// a failed step is retried as two half steps, at most this deep
    pub max_halvings: u32,
    /// call the observer every `stride` steps
    pub stride: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { dt: 0.01, tol: 1e-14, max_iter: 60, max_halvings: 6, stride: 100 }
    }
}

impl IntegratorOptions {
    fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DynamicsError::InvalidOptions(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 || self.stride == 0 {
            return Err(DynamicsError::InvalidOptions("tol, max_iter and stride must be positive".into()));
        }
        Ok(())
    }
}

/// Midpoint stepper for a fixed Hamiltonian.
pub struct Integrator<'a> {
    field: &'a HamiltonianField,
    opts: IntegratorOptions,
    scratch: Vec<Complex64>,
}

impl<'a> Integrator<'a> {
    pub fn new(field: &'a HamiltonianField, opts: IntegratorOptions) -> Result<Self, DynamicsError> {
        opts.validate()?;
        Ok(Integrator { field, opts, scratch: vec![Complex64::new(0.0, 0.0); field.index().len()] })
    }

    /// One step of signed length `h`, halving on solver failure.
    pub fn step(&mut self, xi: &[Complex64], h: f64) -> Result<Vec<Complex64>, DynamicsError> {
        self.step_depth(xi, h, 0)
    }

    fn step_depth(&mut self, xi: &[Complex64], h: f64, depth: u32) -> Result<Vec<Complex64>, DynamicsError> {
        if let Some(z) = self.try_step(xi, h) {
            return Ok(z);
        }
        if depth >= self.opts.max_halvings {
            return Err(DynamicsError::NonConvergence { dt: h });
        }
        let mid = self.step_depth(xi, h / 2.0, depth + 1)?;
        self.step_depth(&mid, h / 2.0, depth + 1)
    }

    /// `z1 (1 + i w h/2) = z0 (1 - i w h/2) + h G((z0 + z1)/2)`
    fn try_step(&mut self, z0: &[Complex64], h: f64) -> Option<Vec<Complex64>> {
        let omega = self.field.omega();
        let plus: Vec<Complex64> = omega.iter().map(|w| Complex64::new(1.0, w * h / 2.0)).collect();
        let lin: Vec<Complex64> = z0.iter().zip(omega).map(|(z, w)| z * Complex64::new(1.0, -w * h / 2.0)).collect();
        let mut z1: Vec<Complex64> = lin.iter().zip(&plus).map(|(a, b)| a / b).collect();
        let scale = z0.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut mid = vec![Complex64::new(0.0, 0.0); z0.len()];
        for _ in 0..self.opts.max_iter {
            mid.iter_mut().zip(z0.iter().zip(&z1)).for_each(|(m, (a, b))| *m = (a + b) * 0.5);
            self.field.eval_rest(&mid, &mut self.scratch);
            let mut change: f64 = 0.0;
            for i in 0..z1.len() {
                let next = (lin[i] + self.scratch[i] * h) / plus[i];
                // f64::max would swallow a NaN here
                let d = (next - z1[i]).norm();
                if !d.is_finite() {
                    return None;
                }
                change = change.max(d);
                z1[i] = next;
            }
            if change <= self.opts.tol * scale {
                return Some(z1);
            }
        }
        None
    }

    /// Advance `z` to time `z.time + duration` (either sign) in equal steps
    /// no longer than `dt`, calling `observer` at the start, every `stride`
    /// steps and at the end. The observer may stop the run early.
    pub fn run<F: FnMut(&State) -> ControlFlow<()>>(&mut self, z: &State, duration: f64, mut observer: F) -> Result<State, DynamicsError> {
        if z.index().as_ref() != self.field.index().as_ref() {
            return Err(DynamicsError::Model("state and Hamiltonian use different mode sets".into()));
        }
        let n = (duration.abs() / self.opts.dt).ceil().max(if duration == 0.0 { 0.0 } else { 1.0 }) as usize;
        let h = if n == 0 { 0.0 } else { duration / n as f64 };
        let mut cur = z.clone();
        let t0 = z.time;
        if observer(&cur).is_break() {
            return Ok(cur);
        }
        for k in 1..=n {
            let xi = self.step(&cur.xi, h)?;
            cur.xi = xi;
            cur.time = t0 + h * k as f64;
            if (k % self.opts.stride == 0 || k == n) && observer(&cur).is_break() {
                break;
            }
        }
        Ok(cur)
    }
}

/// Trajectory of frames from `z0` over `duration`.
pub fn integrate(field: &HamiltonianField, z0: &State, duration: f64, opts: IntegratorOptions, spec: &ObservableSpec) -> Result<Vec<ObservableFrame>, DynamicsError> {
    let mut frames = Vec::new();
    Integrator::new(field, opts)?.run(z0, duration, |z| {
        frames.push(observe(z, field.energy(&z.xi), spec));
        ControlFlow::Continue(())
    })?;
    Ok(frames)
}
