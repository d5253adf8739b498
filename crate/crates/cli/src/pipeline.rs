//! From a resolved config to frequencies and a Hamiltonian.

use bnf_core::birkhoff::{h0_polynomial, NormalFormParams, NormalizeMode, TailCutoff};
use bnf_core::dynamics::{build_model_hamiltonian, model_spectrum, ModelBasis, NlsTerm, Nonlinearity, PowerTerm, Profile};
use bnf_core::poly::Polynomial;
use bnf_core::seeds;
use bnf_core::spectra::{convolution_frequencies, sample_potential, CosinePotential, FrequencyTable, ModelTag, PotentialFamily, PotentialParams, PotentialSample};

use crate::config::{Cutoff, Model, RunConfig};
use crate::CliError;

pub struct Built {
    pub freqs: FrequencyTable,
    /// H0 + P
    pub hamiltonian: Polynomial,
}

impl Built {
    /// Terms of degree 3 and higher.
    pub fn perturbation(&self) -> Polynomial {
        let top = self.hamiltonian.max_degree().unwrap_or(0);
        self.hamiltonian.degree_range(3, top.max(3))
    }
}

pub fn family(model: Model) -> Option<PotentialFamily> {
    match model {
        Model::NlwDirichlet | Model::Nls1dDirichlet | Model::NlsCoupled => Some(PotentialFamily::NlsCosine),
        Model::NlwPeriodic => Some(PotentialFamily::NlwPeriodic),
        Model::NlsDd => Some(PotentialFamily::ConvolutionD),
        Model::Custom => None,
    }
}

pub fn potential_params(cfg: &RunConfig) -> PotentialParams {
    PotentialParams {
        r_amp: cfg.potential_r_amp,
        sigma: cfg.potential_sigma,
        delta: cfg.potential_delta,
        m_decay: cfg.potential_m_decay,
        d: if cfg.model == Model::NlsDd { cfg.d } else { 1 },
        ..Default::default()
    }
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Cosine potential for the 1-d models: explicit coefficients, zero, or a
/// sample drawn from `seed`.
fn cosine(cfg: &RunConfig, seed: u64) -> Result<(CosinePotential, Option<PotentialSample>), CliError> {
    if let Some(v) = &cfg.potential_coeffs {
        return Ok((CosinePotential::from_coeffs(0.0, v), None));
    }
    if cfg.potential == "zero" {
        return Ok((CosinePotential::zero(), None));
    }
    let fam = family(cfg.model).expect("1-d model");
    let sample = sample_potential(fam, &potential_params(cfg), seed).map_err(|e| CliError::Validation(format!("potential: {e}")))?;
    Ok((sample.cosine_part(), Some(sample)))
}

pub fn build(cfg: &RunConfig) -> Result<Built, CliError> {
    let tag = match cfg.model {
        Model::NlwDirichlet => ModelTag::NlwDirichlet,
        Model::NlwPeriodic => ModelTag::NlwPeriodic,
        Model::Nls1dDirichlet => ModelTag::Nls1dDirichlet,
        Model::NlsCoupled => ModelTag::NlsCoupled,
        Model::NlsDd => ModelTag::NlsDd(cfg.d),
        Model::Custom => return build_custom(cfg),
    };
    if cfg.model == Model::NlsDd {
        let sample = if cfg.potential == "zero" {
            PotentialSample::zero(PotentialFamily::ConvolutionD, &potential_params(cfg))
        } else {
            sample_potential(PotentialFamily::ConvolutionD, &potential_params(cfg), cfg.seed).map_err(|e| CliError::Validation(format!("potential: {e}")))?
        };
        let freqs = convolution_frequencies(cfg.d, &sample, cfg.jmax).map_err(compute)?;
        let h = build_model_hamiltonian(&freqs, &ModelBasis::Fourier { d: cfg.d }, &Nonlinearity::Lattice { kappa: cfg.coeff }).map_err(compute)?;
        return Ok(Built { freqs, hamiltonian: h });
    }

    let (v, sample) = cosine(cfg, cfg.seed)?;
    let second = if cfg.model == Model::NlsCoupled { Some(cosine(cfg, seeds::substream_seed(cfg.seed, "potential/second"))?.0) } else { None };
    let mass = match (cfg.mass, &sample) {
        (Some(m), _) => m,
        (None, Some(s)) if cfg.model == Model::NlwPeriodic => s.mass,
        _ => 1.0,
    };
    let (freqs, basis) = model_spectrum(tag, &v, second.as_ref(), cfg.jmax, mass).map_err(compute)?;
    let nl = match cfg.model {
        Model::NlwDirichlet | Model::NlwPeriodic => Nonlinearity::Wave(vec![PowerTerm { power: cfg.power, coeff: cfg.coeff, profile: Profile::Const }]),
        Model::Nls1dDirichlet => Nonlinearity::Schroedinger(vec![NlsTerm { psi: cfg.nls_psi, psi_bar: cfg.nls_psi_bar, coeff: cfg.coeff, profile: Profile::Const }]),
        Model::NlsCoupled => Nonlinearity::Coupled { k_psi: cfg.k_psi, k_phi: cfg.k_phi, k_cross: cfg.k_cross },
        Model::NlsDd | Model::Custom => unreachable!(),
    };
    let h = build_model_hamiltonian(&freqs, &basis, &nl).map_err(compute)?;
    Ok(Built { freqs, hamiltonian: h })
}

fn build_custom(cfg: &RunConfig) -> Result<Built, CliError> {
    let freqs = FrequencyTable::from_values(cfg.frequencies.as_deref().expect("validated")).map_err(|e| CliError::Validation(format!("frequencies: {e}")))?;
    let path = cfg.perturbation.as_ref().expect("validated");
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("perturbation: {}: {e}", path.display())))?;
    let p = Polynomial::from_text(&text).map_err(|e| CliError::Validation(format!("perturbation: {e}")))?;
    if let Some(m) = p.support().iter().find(|m| freqs.get(m).is_none()) {
        return Err(CliError::Validation(format!("perturbation: mode {m} has no frequency")));
    }
    let h = h0_polynomial(&freqs, None).map_err(compute)?.add(&p).map_err(compute)?;
    Ok(Built { freqs, hamiltonian: h })
}

pub fn normal_form_params(cfg: &RunConfig) -> Result<NormalFormParams, CliError> {
    let cutoff = match cfg.n {
        Cutoff::Auto => TailCutoff::Auto { eps: cfg.eps },
        Cutoff::Fixed(n) => TailCutoff::Fixed(n),
    };
    let mode = NormalizeMode::parse(&cfg.mode).expect("validated");
    let p = NormalFormParams::new(cfg.r_star, cfg.gamma(), cfg.alpha, cutoff, cfg.s).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(p.with_mode(mode))
}

/// Tail cutoff without building normal form parameters.
pub fn n_cut(cfg: &RunConfig) -> u32 {
    match cfg.n {
        Cutoff::Fixed(n) => n,
        Cutoff::Auto => bnf_core::birkhoff::nstar(cfg.r_star, cfg.alpha, 8.0 * cfg.eps),
    }
}
