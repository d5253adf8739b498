//! Phase points on the real slice `eta = conj(xi)`.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::poly::{ModeId, ModeIndex, WeightScheme};

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    index: Arc<ModeIndex>,
    pub xi: Vec<Complex64>,
    pub time: f64,
}

impl State {
    /// Panics if `xi` does not have one entry per mode.
    pub fn new(index: Arc<ModeIndex>, xi: Vec<Complex64>) -> Self {
        assert_eq!(index.len(), xi.len(), "state length must match the mode index");
        State { index, xi, time: 0.0 }
    }

    pub fn zeros(index: Arc<ModeIndex>) -> Self {
        let n = index.len();
        State::new(index, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_map(values: &BTreeMap<ModeId, Complex64>) -> Self {
        let index = Arc::new(ModeIndex::new(values.keys().cloned().collect()));
        let xi = index.modes().iter().map(|m| values[m]).collect();
        State::new(index, xi)
    }

    pub fn index(&self) -> &Arc<ModeIndex> {
        &self.index
    }

    pub fn modes(&self) -> &[ModeId] {
        self.index.modes()
    }

    pub fn get(&self, m: &ModeId) -> Option<Complex64> {
        self.index.position(m).map(|i| self.xi[i])
    }

    pub fn with_xi(&self, xi: Vec<Complex64>) -> Self {
        assert_eq!(xi.len(), self.xi.len());
        State { index: self.index.clone(), xi, time: self.time }
    }

    /// `I_j = |xi_j|^2`
    pub fn actions(&self) -> Vec<f64> {
        self.xi.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn action_map(&self) -> BTreeMap<ModeId, f64> {
        self.modes().iter().cloned().zip(self.actions()).collect()
    }

    /// `(sum_j w_s(j) (|xi_j|^2 + |eta_j|^2))^(1/2)`
    pub fn norm_s(&self, s: f64, weights: WeightScheme) -> f64 {
        weighted_norm(self.modes(), &self.xi, s, weights)
    }
}

pub(crate) fn weighted_norm(modes: &[ModeId], xi: &[Complex64], s: f64, weights: WeightScheme) -> f64 {
    modes
        .iter()
        .zip(xi)
        .map(|(m, z)| 2.0 * weights.weight(m, s) * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
