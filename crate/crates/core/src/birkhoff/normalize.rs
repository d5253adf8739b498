//! The iterative normalization loop.

use serde::Serialize;

use super::homological::{homological_residual, solve_homological};
use super::lie::{lie_series, lie_transform};
use super::params::{NormalFormParams, NormalizeMode};
use super::BirkhoffError;
use crate::poly::{majorant_norm, Monomial, PolyError, Polynomial};
use crate::resonance::normal_form_membership;
use crate::spectra::FrequencyTable;

/// Cumulative remainder bookkeeping, one entry per step.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RemainderLedger {
    /// running sum of the majorant of the tail-cubic part seen at each step
    pub tail_cubic_mass: Vec<f64>,
    /// running sum of coefficient mass dropped above the degree cap
    pub overflow_mass: Vec<f64>,
    /// majorant of each generator
    pub chi_norms: Vec<f64>,
    /// homological residual of each solve
    pub residuals: Vec<f64>,
}

impl RemainderLedger {
    fn push(&mut self, tail: f64, overflow: f64, chi: f64, residual: f64) {
        let last = |v: &Vec<f64>| v.last().copied().unwrap_or(0.0);
        self.tail_cubic_mass.push(last(&self.tail_cubic_mass) + tail);
        self.overflow_mass.push(last(&self.overflow_mass) + overflow);
        self.chi_norms.push(chi);
        self.residuals.push(residual);
    }
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    /// normal form part (terms of degree 3..=cap passing membership)
    pub z: Polynomial,
    /// chi_1..chi_{r_star}; chi_r is homogeneous of degree r+2 in degree mode
    pub generators: Vec<Polynomial>,
    /// non-normalized low-tail terms left after the last step
    pub f_final: Polynomial,
    /// terms with three or more tail factors
    pub tail: Polynomial,
    pub ledger: RemainderLedger,
    pub params: NormalFormParams,
    /// membership verdict for every term of `z`
    pub verdicts: Vec<(Monomial, bool)>,
}

impl NormalFormResult {
    pub fn all_members(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    /// `z + f_final + tail`
    pub fn transformed_perturbation(&self) -> Result<Polynomial, PolyError> {
        self.z.add(&self.f_final)?.add(&self.tail)
    }
}

/// Normal form of `H0 + P` where `H0 = sum omega_j I_j` comes from `freqs`.
///
/// `P` must start at degree 3; it is truncated to `r_star + 2` first.
pub fn normalize(freqs: &FrequencyTable, p: &Polynomial, params: &NormalFormParams) -> Result<NormalFormResult, BirkhoffError> {
    params.validate()?;
    if let Some(d) = p.min_degree() {
        if d < 3 {
            return Err(BirkhoffError::InvalidParams(format!("perturbation has a term of degree {d}; it must start at degree 3")));
        }
    }
    let cap = params.degree_cap();
    let n = params.n_cut;
    let (s, radius, weights) = (params.s, params.radius, params.weights);
    let mut rest = p.truncate(cap);
    let mut ledger = RemainderLedger::default();
    let mut generators = Vec::with_capacity(params.r_star as usize);
    let mut dropped_before = rest.dropped_mass();

    for r in 0..params.r_star {
        let (low, high) = rest.tail_split(n);
        let work = match params.mode {
            NormalizeMode::DegreeByDegree => low.homogeneous(r + 3),
            NormalizeMode::Block => low.clone(),
        };
        let (chi, z_r) = solve_homological(&work, freqs, params.gamma, params.alpha, n)?;
        let residual = homological_residual(&work, &chi, &z_r, freqs)?;
        let scale = work.l1_norm();
        if residual > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(BirkhoffError::Residual { residual, scale });
        }
        // H0 o Phi = H0 + sum_{l>=1} g_l with g_1 = {chi, H0} = Z_r - work
        let g1 = z_r.sub(&work)?;
        let from_h0 = lie_series(&g1, 1, &chi, cap)?;
        let next = lie_transform(&rest, &chi, cap)?.add(&from_h0)?;
        let overflow = (next.dropped_mass() - dropped_before).max(0.0);
        dropped_before = next.dropped_mass();
        ledger.push(majorant_norm(&high, s, radius, weights)?, overflow, majorant_norm(&chi, s, radius, weights)?, residual);
        rest = next;
        generators.push(chi);

        if params.mode == NormalizeMode::DegreeByDegree {
            let (low, _) = rest.tail_split(n);
            for (m, _) in low.terms() {
                if m.degree() <= r + 3 && !normal_form_membership(m, freqs, params.gamma, params.alpha, n)? {
                    return Err(BirkhoffError::Bookkeeping { step: r, degree: m.degree() });
                }
            }
        }
    }

    let (low, tail) = rest.tail_split(n);
    let mut member = std::collections::BTreeSet::new();
    for (m, _) in low.terms() {
        if normal_form_membership(m, freqs, params.gamma, params.alpha, n)? {
            member.insert(m.clone());
        }
    }
    let z = low.filter(|m, _| member.contains(m));
    let f_final = low.filter(|m, _| !member.contains(m));
    let mut verdicts = Vec::with_capacity(z.len());
    for (m, _) in z.terms() {
        verdicts.push((m.clone(), normal_form_membership(m, freqs, params.gamma, params.alpha, n)?));
    }
    Ok(NormalFormResult { z, generators, f_final, tail, ledger, params: params.clone(), verdicts })
}
