//! Frequency tables for the supported models.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

use super::potential::{csv_err, PotentialFamily, PotentialSample};
use super::SpectraError;
use crate::poly::{IndexDomain, ModeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelTag {
    NlwDirichlet,
    NlwPeriodic,
    Nls1dDirichlet,
    NlsCoupled,
    NlsDd(usize),
    /// user-supplied frequencies on modes 1..n
    Custom,
}

impl ModelTag {
    pub fn name(&self) -> String {
        match self {
            ModelTag::NlwDirichlet => "nlw_dirichlet".into(),
            ModelTag::NlwPeriodic => "nlw_periodic".into(),
            ModelTag::Nls1dDirichlet => "nls1d_dirichlet".into(),
            ModelTag::NlsCoupled => "nls_coupled".into(),
            ModelTag::NlsDd(_) => "nls_dd".into(),
            ModelTag::Custom => "custom".into(),
        }
    }

    pub fn domain(&self) -> IndexDomain {
        match self {
            ModelTag::NlwDirichlet | ModelTag::Nls1dDirichlet | ModelTag::Custom => IndexDomain::Positive,
            ModelTag::NlwPeriodic => IndexDomain::Integer,
            ModelTag::NlsCoupled => IndexDomain::NonzeroInteger,
            ModelTag::NlsDd(d) => IndexDomain::Lattice(*d),
        }
    }

    pub fn dim(&self) -> usize {
        self.domain().dim()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub model: ModelTag,
    freqs: BTreeMap<ModeId, f64>,
    /// underlying eigenvalues, when the frequencies come from a spectrum
    pub lambda: Option<BTreeMap<ModeId, f64>>,
    pub mass: Option<f64>,
    pub potential: Option<PotentialSample>,
}

impl FrequencyTable {
    /// Table from explicit values; labels must belong to the model's domain.
    pub fn new(model: ModelTag, freqs: BTreeMap<ModeId, f64>) -> Result<Self, SpectraError> {
        let dom = model.domain();
        if let Some(bad) = freqs.keys().find(|k| !dom.contains(k)) {
            return Err(SpectraError::InvalidParams(format!("mode {bad} outside the {} index domain", model.name())));
        }
        if let Some((k, _)) = freqs.iter().find(|(_, w)| !w.is_finite()) {
            return Err(SpectraError::InvalidParams(format!("non-finite frequency at mode {k}")));
        }
        Ok(FrequencyTable { model, freqs, lambda: None, mass: None, potential: None })
    }

    /// Custom table on modes 1..=n.
    pub fn from_values(values: &[f64]) -> Result<Self, SpectraError> {
        let freqs = values.iter().enumerate().map(|(i, w)| (ModeId::scalar(i as i32 + 1), *w)).collect();
        Self::new(ModelTag::Custom, freqs)
    }

    pub fn get(&self, k: &ModeId) -> Option<f64> {
        self.freqs.get(k).copied()
    }

    pub fn modes(&self) -> impl Iterator<Item = &ModeId> {
        self.freqs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeId, &f64)> {
        self.freqs.iter()
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Largest |j| present.
    pub fn jmax(&self) -> u32 {
        self.freqs.keys().map(|k| k.norm().ceil() as u32).max().unwrap_or(0)
    }

    /// Keep only labels with |j| <= jmax.
    pub fn restricted(&self, jmax: u32) -> Self {
        let j2 = (jmax as i64) * (jmax as i64);
        let keep = |k: &ModeId| k.norm_sq() <= j2;
        FrequencyTable {
            model: self.model,
            freqs: self.freqs.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), *v)).collect(),
            lambda: self.lambda.as_ref().map(|l| l.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), *v)).collect()),
            mass: self.mass,
            potential: self.potential.clone(),
        }
    }

    /// Dirichlet tables must have a strictly increasing spectrum.
    pub fn is_strictly_increasing(&self) -> bool {
        let v: Vec<f64> = self.freqs.values().copied().collect();
        v.windows(2).all(|w| w[0] < w[1])
    }

    /// CSV rows `model, j, lambda, omega`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SpectraError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["model", "j", "lambda", "omega"]).map_err(csv_err)?;
        for (k, om) in &self.freqs {
            let lam = self
                .lambda
                .as_ref()
                .and_then(|l| l.get(k))
                .map(|x| format!("{x:.16e}"))
                .unwrap_or_default();
            wr.write_record([self.model.name(), k.to_string(), lam, format!("{om:.16e}")]).map_err(csv_err)?;
        }
        wr.flush().map_err(|e| SpectraError::Io(e.to_string()))
    }
}

/// omega_j = sqrt(lambda_j + m).
pub fn nlw_frequencies(model: ModelTag, lambda: &BTreeMap<ModeId, f64>, mass: f64) -> Result<FrequencyTable, SpectraError> {
    let mut freqs = BTreeMap::new();
    for (k, l) in lambda {
        let rad = l + mass;
        if !(rad > 0.0) {
            return Err(SpectraError::NonPositiveRadicand { mode: k.to_string(), value: rad });
        }
        freqs.insert(k.clone(), rad.sqrt());
    }
    let mut t = FrequencyTable::new(model, freqs)?;
    t.lambda = Some(lambda.clone());
    t.mass = Some(mass);
    Ok(t)
}

/// Table with omega_j = lambda_j (Schroedinger models).
pub fn schroedinger_frequencies(model: ModelTag, lambda: &BTreeMap<ModeId, f64>) -> Result<FrequencyTable, SpectraError> {
    let mut t = FrequencyTable::new(model, lambda.clone())?;
    t.lambda = Some(lambda.clone());
    Ok(t)
}

/// Coupled pair: omega_j = lambda1_j, omega_{-j} = -lambda2_j for j >= 1.
pub fn coupled_frequencies(lambda1: &[f64], lambda2: &[f64]) -> Result<FrequencyTable, SpectraError> {
    if lambda1.len() != lambda2.len() {
        return Err(SpectraError::InvalidParams("coupled spectra must have equal length".into()));
    }
    let mut freqs = BTreeMap::new();
    let mut lam = BTreeMap::new();
    for (i, (a, b)) in lambda1.iter().zip(lambda2).enumerate() {
        let j = i as i32 + 1;
        freqs.insert(ModeId::scalar(j), *a);
        freqs.insert(ModeId::scalar(-j), -*b);
        lam.insert(ModeId::scalar(j), *a);
        lam.insert(ModeId::scalar(-j), *b);
    }
    let mut t = FrequencyTable::new(ModelTag::NlsCoupled, freqs)?;
    t.lambda = Some(lam);
    Ok(t)
}

/// omega_k = |k|^2 + v_k for |k| <= jmax.
pub fn convolution_frequencies(d: usize, v: &PotentialSample, jmax: u32) -> Result<FrequencyTable, SpectraError> {
    if v.family != PotentialFamily::ConvolutionD || v.params.d != d {
        return Err(SpectraError::InvalidParams("need a CONVOLUTION_D sample of matching dimension".into()));
    }
    let freqs = IndexDomain::Lattice(d)
        .modes_up_to(jmax)
        .into_iter()
        .map(|k| {
            let w = k.norm_sq() as f64 + v.coeff(&k);
            (k, w)
        })
        .collect();
    let mut t = FrequencyTable::new(ModelTag::NlsDd(d), freqs)?;
    t.potential = Some(v.clone());
    Ok(t)
}


/// Frequencies of the model attached to a potential family: Dirichlet NLS
/// (omega = lambda), periodic NLW (omega = sqrt(lambda + m)) or the lattice
/// convolution model.
pub fn frequencies_for_sample(sample: &PotentialSample, jmax: u32) -> Result<FrequencyTable, SpectraError> {
    use super::sturm::{periodic_spectrum, sturm_liouville, Boundary};
    let m = (4 * (jmax as usize + 1)).max(16);
    let mut t = match sample.family {
        PotentialFamily::NlsCosine => {
            let (l, _) = sturm_liouville(&sample.cosine_part(), Boundary::Dirichlet, jmax as usize, m)?;
            let lam = l.iter().enumerate().map(|(i, x)| (ModeId::scalar(i as i32 + 1), *x)).collect();
            schroedinger_frequencies(ModelTag::Nls1dDirichlet, &lam)?
        }
        PotentialFamily::NlwPeriodic => {
            let (spec, _, _) = periodic_spectrum(&sample.cosine_part(), jmax as usize, m)?;
            let lam = spec.into_iter().map(|(j, x)| (ModeId::scalar(j), x)).collect();
            nlw_frequencies(ModelTag::NlwPeriodic, &lam, sample.mass)?
        }
        PotentialFamily::ConvolutionD => return convolution_frequencies(sample.params.d, sample, jmax),
    };
    t.potential = Some(sample.clone());
    Ok(t)
}
