//! Random potential ensembles.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

use super::SpectraError;
use crate::poly::{IndexDomain, ModeId};
use crate::seeds;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialFamily {
    /// V = m + sum v_k cos kx, v_k = R e^{-sigma k} v'_k, m = Delta m'
    NlwPeriodic,
    /// V = sum v_k cos kx, v_k = R e^{-sigma k} v'_k
    NlsCosine,
    /// V = sum_{k in Z^d} v_k e^{ik.x}, v_k = R v'_k / (1+|k|)^m
    ConvolutionD,
}

impl PotentialFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialFamily::NlwPeriodic => "NLW_PERIODIC",
            PotentialFamily::NlsCosine => "NLS_COSINE",
            PotentialFamily::ConvolutionD => "CONVOLUTION_D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// amplitude R
    pub r_amp: f64,
    /// exponential decay rate of the cosine families
    pub sigma: f64,
    /// mass range Delta (NLW only)
    pub delta: f64,
    /// algebraic decay exponent m of the lattice family, m > d/2
    pub m_decay: f64,
    /// lattice dimension (lattice family only)
    pub d: usize,
    /// largest stored |k|
    pub k_max: u32,
    /// impose v_{-k} = v_k in the lattice family
    pub symmetric: bool,
}

impl Default for PotentialParams {
    fn default() -> Self {
        PotentialParams { r_amp: 0.1, sigma: 1.0, delta: 1.0, m_decay: 2.0, d: 1, k_max: 32, symmetric: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub family: PotentialFamily,
    pub params: PotentialParams,
    /// v_k; keys are k >= 1 for the cosine families, lattice points otherwise
    pub coeffs: BTreeMap<ModeId, f64>,
    /// constant part m (NLW family), zero otherwise
    pub mass: f64,
    pub seed: u64,
}

fn validate(family: PotentialFamily, p: &PotentialParams) -> Result<(), SpectraError> {
    let bad = |s: &str| Err(SpectraError::InvalidParams(s.to_string()));
    if !(p.r_amp >= 0.0) || !p.r_amp.is_finite() {
        return bad("R must be finite and >= 0");
    }
    match family {
        PotentialFamily::NlwPeriodic | PotentialFamily::NlsCosine => {
            if !(p.sigma > 0.0) {
                return bad("sigma must be > 0");
            }
            if family == PotentialFamily::NlwPeriodic && !(p.delta > 0.0) {
                return bad("Delta must be > 0");
            }
        }
        PotentialFamily::ConvolutionD => {
            if p.d == 0 {
                return bad("d must be >= 1");
            }
            if !(p.m_decay > p.d as f64 / 2.0) {
                return bad("m_decay must exceed d/2");
            }
        }
    }
    Ok(())
}

/// Draw a potential; identical inputs give identical samples.
pub fn sample_potential(family: PotentialFamily, params: &PotentialParams, seed: u64) -> Result<PotentialSample, SpectraError> {
    validate(family, params)?;
    let mut rng = seeds::rng(seed, "potential");
    let mut coeffs = BTreeMap::new();
    let mut mass = 0.0;
    match family {
        PotentialFamily::NlwPeriodic | PotentialFamily::NlsCosine => {
            if family == PotentialFamily::NlwPeriodic {
                mass = params.delta * rng.gen_range(0.0..=1.0);
            }
            for k in 1..=params.k_max {
                let u: f64 = rng.gen_range(-0.5..=0.5);
                coeffs.insert(ModeId::scalar(k as i32), params.r_amp * (-params.sigma * k as f64).exp() * u);
            }
        }
        PotentialFamily::ConvolutionD => {
            for k in IndexDomain::Lattice(params.d).modes_up_to(params.k_max) {
                if params.symmetric && !canonical_representative(&k) {
                    continue;
                }
                let u: f64 = rng.gen_range(-0.5..=0.5);
                let v = params.r_amp * u / (1.0 + k.norm()).powf(params.m_decay);
                if params.symmetric {
                    coeffs.insert(k.negated(), v);
                }
                coeffs.insert(k, v);
            }
        }
    }
    Ok(PotentialSample { family, params: params.clone(), coeffs, mass, seed })
}

/// k is the representative of {k, -k}: zero, or first nonzero coordinate positive.
fn canonical_representative(k: &ModeId) -> bool {
    k.coords().iter().find(|&&c| c != 0).map_or(true, |&c| c > 0)
}

impl PotentialSample {
    /// Identically zero sample of the given family.
    pub fn zero(family: PotentialFamily, params: &PotentialParams) -> Self {
        PotentialSample { family, params: params.clone(), coeffs: BTreeMap::new(), mass: 0.0, seed: 0 }
    }

    pub fn coeff(&self, k: &ModeId) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Envelope bound |v_k| <= (R/2) e^{-sigma k} or (R/2)/(1+|k|)^m.
    pub fn envelope(&self, k: &ModeId) -> f64 {
        match self.family {
            PotentialFamily::ConvolutionD => 0.5 * self.params.r_amp / (1.0 + k.norm()).powf(self.params.m_decay),
            _ => 0.5 * self.params.r_amp * (-self.params.sigma * k.norm()).exp(),
        }
    }

    /// Zero-mean cosine part (for the Sturm-Liouville solver).
    pub fn cosine_part(&self) -> CosinePotential {
        let kmax = self.coeffs.keys().map(|k| k.first()).max().unwrap_or(0).max(0) as usize;
        let mut v = vec![0.0; kmax];
        for (k, c) in &self.coeffs {
            if k.dim() == 1 && k.first() >= 1 {
                v[k.first() as usize - 1] = *c;
            }
        }
        CosinePotential { v0: 0.0, v }
    }

    /// CSV rows `family, seed, k, v_k`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SpectraError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["family", "seed", "k", "v_k"]).map_err(csv_err)?;
        if self.family == PotentialFamily::NlwPeriodic {
            wr.write_record([self.family.name(), &self.seed.to_string(), "mass", &format!("{:.16e}", self.mass)]).map_err(csv_err)?;
        }
        for (k, v) in &self.coeffs {
            wr.write_record([self.family.name(), &self.seed.to_string(), &k.to_string(), &format!("{v:.16e}")]).map_err(csv_err)?;
        }
        wr.flush().map_err(|e| SpectraError::Io(e.to_string()))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> SpectraError {
    SpectraError::Io(e.to_string())
}

/// V(x) = v0 + sum_{n>=1} v[n-1] cos(n x).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CosinePotential {
    pub v0: f64,
    pub v: Vec<f64>,
}

impl CosinePotential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        CosinePotential { v0: c, v: Vec::new() }
    }

    pub fn from_coeffs(v0: f64, v: &[f64]) -> Self {
        CosinePotential { v0, v: v.to_vec() }
    }

    /// Coefficient of cos(n x), n >= 0.
    pub fn coeff(&self, n: usize) -> f64 {
        if n == 0 {
            self.v0
        } else {
            self.v.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn with_coeff(&self, n: usize, value: f64) -> Self {
        let mut out = self.clone();
        if n == 0 {
            out.v0 = value;
        } else {
            if out.v.len() < n {
                out.v.resize(n, 0.0);
            }
            out.v[n - 1] = value;
        }
        out
    }

    pub fn shifted(&self, c: f64) -> Self {
        CosinePotential { v0: self.v0 + c, v: self.v.clone() }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.v0 + self.v.iter().enumerate().map(|(i, c)| c * ((i + 1) as f64 * x).cos()).sum::<f64>()
    }

    /// (1/2pi) int_0^{2pi} V
    pub fn mean_value(&self) -> f64 {
        self.v0
    }
}
