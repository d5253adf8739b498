//! Monte Carlo estimate of how often sampled potentials violate the
//! non-resonance condition outside the exempt patterns.

use rayon::prelude::*;
use serde::Serialize;

use super::classify::{calibrate_pair_cutoff, classify_exception, shell_cutoff, ClassifyParams, PairRelation, Pattern};
use super::divisor::{threshold, DivisorQuery};
use super::enumerate::enumerate_near_resonances;
use super::ResonanceError;
use crate::seeds;
use crate::spectra::{frequencies_for_sample, sample_potential, PotentialFamily, PotentialParams};

/// Query fields shared by every sample; gamma comes from the grid.
#[derive(Clone, Debug, Serialize)]
pub struct QueryTemplate {
    pub r: u32,
    pub n_cut: u32,
    pub alpha: f64,
    pub jmax: u32,
    pub node_cap: u64,
}

/// Which exempt patterns are recognized.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyRule {
    /// pair patterns with a cutoff calibrated per sample and gamma
    pub pair: Option<PairRelation>,
    /// shell patterns with cutoff N^{sqrt(alpha/m)} for this m
    pub shell_m: Option<f64>,
}

impl ClassifyRule {
    /// Patterns relevant to a potential family.
    pub fn for_family(family: PotentialFamily, params: &PotentialParams) -> Self {
        match family {
            PotentialFamily::NlsCosine => ClassifyRule { pair: None, shell_m: None },
            PotentialFamily::NlwPeriodic => ClassifyRule { pair: Some(PairRelation::Opposite), shell_m: None },
            PotentialFamily::ConvolutionD => ClassifyRule { pair: Some(PairRelation::Opposite), shell_m: Some(params.m_decay) },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureConfig {
    pub family: PotentialFamily,
    pub params: PotentialParams,
    pub template: QueryTemplate,
    pub samples: usize,
    pub seed: u64,
    pub gamma_grid: Vec<f64>,
    pub rule: ClassifyRule,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MeasureRow {
    pub gamma: f64,
    pub threshold: f64,
    pub used: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub half_width: f64,
    pub hits_none: usize,
    pub hits_pair: usize,
    pub hits_shell: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MeasureReport {
    pub rows: Vec<MeasureRow>,
    /// samples whose spectrum could not be computed
    pub skipped: usize,
    /// samples whose enumeration hit the node cap (counted, not excluded)
    pub incomplete: usize,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let den = 1.0 + z * z / nf;
    let center = (p + z * z / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / den;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

struct SampleOutcome {
    /// per gamma: (violation, none, pair, shell)
    per_gamma: Vec<(bool, usize, usize, usize)>,
    complete: bool,
}

fn run_sample(cfg: &MeasureConfig, i: usize) -> Result<SampleOutcome, ResonanceError> {
    let seed = seeds::substream_seed(cfg.seed, &format!("monte-carlo/{i}"));
    let pot = sample_potential(cfg.family, &cfg.params, seed)?;
    let freqs = frequencies_for_sample(&pot, cfg.template.jmax)?;
    let gmax = cfg.gamma_grid.iter().copied().fold(f64::MIN, f64::max);
    let mut q = DivisorQuery::new(cfg.template.r, cfg.template.n_cut, gmax, cfg.template.alpha, cfg.template.jmax)?;
    q.node_cap = cfg.template.node_cap;
    let en = enumerate_near_resonances(&freqs, &q)?;
    let mut per_gamma = Vec::with_capacity(cfg.gamma_grid.len());
    for &g in &cfg.gamma_grid {
        let thr = threshold(g, cfg.template.alpha, cfg.template.n_cut);
        let params = ClassifyParams {
            pair_cutoff: cfg.rule.pair.map(|rel| calibrate_pair_cutoff(&freqs, g, cfg.template.alpha, cfg.template.n_cut, rel).0),
            pair_relation: cfg.rule.pair.unwrap_or(PairRelation::Opposite),
            shell_cutoff: cfg.rule.shell_m.map(|m| shell_cutoff(cfg.template.n_cut, cfg.template.alpha, m)),
        };
        let (mut none, mut pair, mut shell) = (0, 0, 0);
        for h in en.hits.iter().filter(|h| h.value.abs() <= thr) {
            match classify_exception(&h.k, &params) {
                Pattern::None => none += 1,
                Pattern::PairTail => pair += 1,
                Pattern::Shell => shell += 1,
            }
        }
        per_gamma.push((none > 0, none, pair, shell));
    }
    Ok(SampleOutcome { per_gamma, complete: en.complete })
}

/// Draw `samples` potentials and report, for each gamma, the fraction with
/// at least one non-exempt near resonance. Deterministic in `seed`,
/// independent of the thread count.
pub fn measure_estimate(cfg: &MeasureConfig) -> Result<MeasureReport, ResonanceError> {
    if cfg.samples < 30 {
        return Err(ResonanceError::InvalidQuery(format!("need at least 30 samples, got {}", cfg.samples)));
    }
    if cfg.gamma_grid.is_empty() || cfg.gamma_grid.iter().any(|g| !(*g > 0.0)) {
        return Err(ResonanceError::InvalidQuery("gamma grid must be nonempty and positive".into()));
    }
    let outcomes: Vec<Result<SampleOutcome, ResonanceError>> = (0..cfg.samples).into_par_iter().map(|i| run_sample(cfg, i)).collect();
    let mut skipped = 0;
    let mut incomplete = 0;
    let mut ok = Vec::new();
    for o in outcomes {
        match o {
            Ok(s) => {
                if !s.complete {
                    incomplete += 1;
                }
                ok.push(s);
            }
            Err(ResonanceError::Spectra(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let rows = cfg
        .gamma_grid
        .iter()
        .enumerate()
        .map(|(gi, &g)| {
            let used = ok.len();
            let violations = ok.iter().filter(|s| s.per_gamma[gi].0).count();
            let (lo, hi) = wilson_interval(violations, used);
            MeasureRow {
                gamma: g,
                threshold: threshold(g, cfg.template.alpha, cfg.template.n_cut),
                used,
                violations,
                violation_fraction: if used > 0 { violations as f64 / used as f64 } else { 0.0 },
                wilson_low: lo,
                wilson_high: hi,
                half_width: 0.5 * (hi - lo),
                hits_none: ok.iter().map(|s| s.per_gamma[gi].1).sum(),
                hits_pair: ok.iter().map(|s| s.per_gamma[gi].2).sum(),
                hits_shell: ok.iter().map(|s| s.per_gamma[gi].3).sum(),
            }
        })
        .collect();
    Ok(MeasureReport { rows, skipped, incomplete })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 0 of 100: upper limit z^2/(n+z^2)
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036994).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403832).abs() < 1e-5 && (hi - 0.596168).abs() < 1e-5);
    }

    #[test]
    fn too_few_samples_rejected() {
        let p = PotentialParams { d: 2, k_max: 2, ..Default::default() };
        let cfg = MeasureConfig {
            family: PotentialFamily::ConvolutionD,
            rule: ClassifyRule::for_family(PotentialFamily::ConvolutionD, &p),
            params: p,
            template: QueryTemplate { r: 1, n_cut: 1, alpha: 1.0, jmax: 2, node_cap: 1_000_000 },
            samples: 10,
            seed: 0,
            gamma_grid: vec![0.1],
        };
        assert!(measure_estimate(&cfg).is_err());
    }
}
