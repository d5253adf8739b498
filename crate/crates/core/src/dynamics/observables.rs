//! Actions, pair and shell sums, weighted norms and torus distance.

use std::collections::BTreeMap;

use super::State;
use crate::poly::{ModeId, WeightScheme};

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableFrame {
    pub t: f64,
    pub energy: f64,
    pub actions: BTreeMap<ModeId, f64>,
    /// `J_j = I_j + I_{-j}` for `j > 0` (scalar labels only)
    pub pairs: BTreeMap<i32, f64>,
    /// `J_M = sum_{|k|^2 = M} I_k`
    pub shells: BTreeMap<i64, f64>,
    pub norm_s: f64,
    pub torus_dist: Option<f64>,
}

/// What to measure and in which weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSpec {
    pub s: f64,
    pub weights: WeightScheme,
    /// exponent for the torus distance
    pub s1: f64,
    pub reference: Option<BTreeMap<ModeId, f64>>,
}

impl ObservableSpec {
    pub fn new(s: f64) -> Self {
        ObservableSpec { s, weights: WeightScheme::Shifted, s1: s, reference: None }
    }
}

pub fn pair_actions(actions: &BTreeMap<ModeId, f64>) -> BTreeMap<i32, f64> {
    let mut out = BTreeMap::new();
    for (m, i) in actions {
        if m.dim() == 1 && m.first() != 0 {
            *out.entry(m.first().abs()).or_insert(0.0) += i;
        }
    }
    out
}

pub fn shell_actions(actions: &BTreeMap<ModeId, f64>) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    for (m, i) in actions {
        *out.entry(m.norm_sq()).or_insert(0.0) += i;
    }
    out
}

/// `sum_j j I_j` per coordinate.
pub fn momentum(actions: &BTreeMap<ModeId, f64>) -> Vec<f64> {
    let d = actions.keys().next().map_or(0, |m| m.dim());
    let mut p = vec![0.0; d];
    for (m, i) in actions {
        for (pk, k) in p.iter_mut().zip(m.coords()) {
            *pk += *k as f64 * i;
        }
    }
    p
}

/// `(sum_j w_{s1}(j) (sqrt I_j - sqrt Ibar_j)^2)^(1/2)`; modes missing from
/// either side count as zero action.
pub fn torus_distance(actions: &BTreeMap<ModeId, f64>, reference: &BTreeMap<ModeId, f64>, s1: f64, weights: WeightScheme) -> f64 {
    let mut total = 0.0;
    for m in actions.keys().chain(reference.keys().filter(|m| !actions.contains_key(*m))) {
        let a = actions.get(m).copied().unwrap_or(0.0).max(0.0).sqrt();
        let b = reference.get(m).copied().unwrap_or(0.0).max(0.0).sqrt();
        total += weights.weight(m, s1) * (a - b).powi(2);
    }
    total.sqrt()
}

/// Frame at `z`, with energy supplied by the caller.
pub fn observe(z: &State, energy: f64, spec: &ObservableSpec) -> ObservableFrame {
    let actions = z.action_map();
    let torus_dist = spec.reference.as_ref().map(|r| torus_distance(&actions, r, spec.s1, spec.weights));
    ObservableFrame {
        t: z.time,
        energy,
        pairs: pair_actions(&actions),
        shells: shell_actions(&actions),
        norm_s: z.norm_s(spec.s, spec.weights),
        torus_dist,
        actions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acts(v: &[(i32, f64)]) -> BTreeMap<ModeId, f64> {
        v.iter().map(|(j, i)| (ModeId::scalar(*j), *i)).collect()
    }

    #[test]
    fn pairs_and_shells_recompute_from_actions() {
        let a = acts(&[(-2, 0.1), (-1, 0.2), (0, 0.05), (1, 0.3), (2, 0.4)]);
        let p = pair_actions(&a);
        assert_eq!(p.len(), 2);
        assert!((p[&1] - 0.5).abs() < 1e-15 && (p[&2] - 0.5).abs() < 1e-15);
        let sh = shell_actions(&a);
        assert!((sh[&0] - 0.05).abs() < 1e-15 && (sh[&4] - 0.5).abs() < 1e-15);
        assert!((momentum(&a)[0] - (-0.2 - 0.2 + 0.3 + 0.8)).abs() < 1e-15);
    }

    #[test]
    fn torus_distance_vanishes_iff_actions_match() {
        let a = acts(&[(1, 0.3), (2, 0.1)]);
        assert_eq!(torus_distance(&a, &a, 1.0, WeightScheme::Shifted), 0.0);
        let b = acts(&[(1, 0.3), (2, 0.1), (3, 0.01)]);
        let d = torus_distance(&a, &b, 1.0, WeightScheme::Shifted);
        let w = WeightScheme::Shifted.weight(&ModeId::scalar(3), 1.0);
        assert!((d - (w * 0.01).sqrt()).abs() < 1e-15);
    }
}
