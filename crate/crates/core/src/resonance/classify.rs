//! Exceptional resonance patterns and normal-form membership.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::divisor::{small_divisor, threshold};
use super::ResonanceError;
use crate::poly::{ModeId, Monomial};
use crate::spectra::FrequencyTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    None,
    /// supported beyond a cutoff, on pairs {j, -j} with the pair relation
    PairTail,
    /// supported beyond a cutoff, summing to zero on every sphere |j|^2 = K
    Shell,
}

impl Pattern {
    pub fn name(&self) -> &'static str {
        match self {
            Pattern::None => "NONE",
            Pattern::PairTail => "PAIR_TAIL",
            Pattern::Shell => "SHELL",
        }
    }

    pub fn is_exempt(&self) -> bool {
        !matches!(self, Pattern::None)
    }
}

/// How the two entries of a pair must combine to cancel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRelation {
    /// k_j + k_{-j} = 0; for omega_{-j} close to omega_j
    Opposite,
    /// k_j = k_{-j}; for omega_{-j} close to -omega_j (coupled systems)
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    /// pair patterns need k_j = 0 for |j| <= this value (None disables)
    pub pair_cutoff: Option<f64>,
    pub pair_relation: PairRelation,
    /// shell patterns need k_j = 0 for |j| <= this value (None disables)
    pub shell_cutoff: Option<f64>,
}

impl ClassifyParams {
    pub fn none() -> Self {
        ClassifyParams { pair_cutoff: None, pair_relation: PairRelation::Opposite, shell_cutoff: None }
    }
}

/// N^{sqrt(alpha/m)}
pub fn shell_cutoff(n: u32, alpha: f64, m_decay: f64) -> f64 {
    (n as f64).powf((alpha / m_decay).sqrt())
}

/// C N^{sqrt(2 alpha)}
pub fn coupled_pair_cutoff(c: f64, n: u32, alpha: f64) -> f64 {
    c * (n as f64).powf((2.0 * alpha).sqrt())
}

/// Gap of the pair {j, -j} under the relation.
fn pair_gap(freqs: &FrequencyTable, j: &ModeId, rel: PairRelation) -> Option<f64> {
    let a = freqs.get(j)?;
    let b = freqs.get(&j.negated())?;
    Some(match rel {
        PairRelation::Opposite => (a - b).abs(),
        PairRelation::Equal => (a + b).abs(),
    })
}

/// Smallest cutoff c such that every pair with |j| > c has gap below
/// gamma / (2 N^alpha). Returns (c, b) with c = b ln N (b = 0 when N = 1).
pub fn calibrate_pair_cutoff(freqs: &FrequencyTable, gamma: f64, alpha: f64, n: u32, rel: PairRelation) -> (f64, f64) {
    let half = 0.5 * threshold(gamma, alpha, n);
    let mut cut: f64 = 0.0;
    for j in freqs.modes() {
        if j.is_zero() || j.negated() == *j {
            continue;
        }
        if let Some(g) = pair_gap(freqs, j, rel) {
            if g >= half {
                cut = cut.max(j.norm());
            }
        }
    }
    let ln = (n as f64).ln();
    (cut, if ln > 0.0 { cut / ln } else { 0.0 })
}

fn is_pair_pattern(k: &[(ModeId, i64)], cutoff: f64, rel: PairRelation) -> bool {
    let map: BTreeMap<&ModeId, i64> = k.iter().map(|(m, c)| (m, *c)).collect();
    for (m, c) in k {
        if m.norm() <= cutoff {
            return false;
        }
        let partner = map.get(&m.negated()).copied().unwrap_or(0);
        let ok = match rel {
            PairRelation::Opposite => c + partner == 0,
            PairRelation::Equal => *c == partner,
        };
        if !ok || m.is_zero() {
            return false;
        }
    }
    true
}

fn is_shell_pattern(k: &[(ModeId, i64)], cutoff: f64) -> bool {
    let mut shells: BTreeMap<i64, i64> = BTreeMap::new();
    for (m, c) in k {
        if m.norm() <= cutoff {
            return false;
        }
        *shells.entry(m.norm_sq()).or_insert(0) += c;
    }
    shells.values().all(|&s| s == 0)
}

pub fn classify_exception(k: &[(ModeId, i64)], params: &ClassifyParams) -> Pattern {
    if k.is_empty() {
        return Pattern::None;
    }
    if let Some(c) = params.pair_cutoff {
        if is_pair_pattern(k, c, params.pair_relation) {
            return Pattern::PairTail;
        }
    }
    if let Some(c) = params.shell_cutoff {
        if is_shell_pattern(k, c) {
            return Pattern::Shell;
        }
    }
    Pattern::None
}

/// Whether `m` may stay in a (gamma, alpha, N)-normal form: divisor at or
/// below the threshold (ties count as resonant) and at most two tail factors.
pub fn normal_form_membership(m: &Monomial, freqs: &FrequencyTable, gamma: f64, alpha: f64, n: u32) -> Result<bool, ResonanceError> {
    if m.tail_degree(n) > 2 {
        return Ok(false);
    }
    let d = small_divisor(freqs, &m.k_minus_l())?;
    Ok(d <= threshold(gamma, alpha, n))
}
