//! Parameter calculators and normalization settings.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use super::BirkhoffError;
use crate::poly::{majorant_norm, Polynomial, WeightScheme};
use crate::resonance::threshold;

/// `floor(R^(-1/(2 r alpha)))`. Values within 1e-9 (relative) of an integer
/// are rounded to it so that e.g. `R = 0.01, r = alpha = 1` gives 10 and not 9.
pub fn nstar(r: u32, alpha: f64, radius: f64) -> u32 {
    let x = radius.powf(-1.0 / (2.0 * r as f64 * alpha));
    let near = x.round();
    let n = if (x - near).abs() <= 1e-9 * x.max(1.0) { near } else { x.floor() };
    n.clamp(0.0, u32::MAX as f64) as u32
}

/// `2 alpha r^2 + 2`
pub fn sstar(r: u32, alpha: f64) -> f64 {
    2.0 * alpha * (r as f64).powi(2) + 2.0
}

/// `gamma / (24 e r_star N^alpha A)`
pub fn rstar_radius(gamma: f64, r_star: u32, n: u32, alpha: f64, a: f64) -> f64 {
    // integer-valued factors first, so 1/(240e) comes out bit-exact
    gamma / (24.0 * r_star as f64 * (n as f64).powf(alpha) * a * E)
}

/// `A` with `majorant(P) <= A R^2` at the given radius.
pub fn fit_a_constant(p: &Polynomial, s: f64, radius: f64, weights: WeightScheme) -> Result<f64, BirkhoffError> {
    Ok(majorant_norm(p, s, radius, weights)? / (radius * radius))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalizeMode {
    /// normalize the degree r+3 component at step r
    DegreeByDegree,
    /// normalize every degree at every step
    Block,
}

impl NormalizeMode {
    pub fn name(&self) -> &'static str {
        match self {
            NormalizeMode::DegreeByDegree => "degree",
            NormalizeMode::Block => "block",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "degree" | "degree_by_degree" => Some(NormalizeMode::DegreeByDegree),
            "block" => Some(NormalizeMode::Block),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailCutoff {
    /// from `nstar` at radius `8 eps`
    Auto { eps: f64 },
    Fixed(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormParams {
    pub r_star: u32,
    pub gamma: f64,
    pub alpha: f64,
    /// resolved tail cutoff
    pub n_cut: u32,
    pub cutoff: TailCutoff,
    pub s: f64,
    pub mode: NormalizeMode,
    pub weights: WeightScheme,
    /// radius at which ledger majorants are evaluated
    pub radius: f64,
}

impl NormalFormParams {
    pub fn new(r_star: u32, gamma: f64, alpha: f64, cutoff: TailCutoff, s: f64) -> Result<Self, BirkhoffError> {
        let (n_cut, radius) = match cutoff {
            TailCutoff::Fixed(n) => (n, 0.1),
            TailCutoff::Auto { eps } => {
                if !(eps > 0.0) {
                    return Err(BirkhoffError::InvalidParams("eps must be positive for an automatic cutoff".into()));
                }
                (nstar(r_star.max(1), alpha, 8.0 * eps), 8.0 * eps)
            }
        };
        let p = NormalFormParams {
            r_star,
            gamma,
            alpha,
            n_cut,
            cutoff,
            s,
            mode: NormalizeMode::DegreeByDegree,
            weights: WeightScheme::default(),
            radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mode(mut self, mode: NormalizeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn degree_cap(&self) -> u32 {
        self.r_star + 2
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.gamma, self.alpha, self.n_cut)
    }

    pub fn validate(&self) -> Result<(), BirkhoffError> {
        let bad = |m: &str| Err(BirkhoffError::InvalidParams(m.to_string()));
        if self.r_star == 0 {
            return bad("r_star must be at least 1");
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if self.n_cut == 0 {
            return bad("tail cutoff N must be at least 1");
        }
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return bad("s must be at least 1");
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad("ledger radius must be positive");
        }
        if matches!(self.cutoff, TailCutoff::Auto { .. }) {
            let need = sstar(self.r_star, self.alpha);
            if self.s < need {
                return Err(BirkhoffError::InvalidParams(format!("s = {} is below s_* = {need} required by an automatic cutoff", self.s)));
            }
        }
        Ok(())
    }
}
