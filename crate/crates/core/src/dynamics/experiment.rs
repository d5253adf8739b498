//! Action-drift measurements over a grid of amplitudes and seeds.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write;
use std::ops::ControlFlow;
use std::sync::Arc;

use super::field::HamiltonianField;
use super::integrate::{Integrator, IntegratorOptions};
use super::observables::{pair_actions, shell_actions, torus_distance};
use super::{DynamicsError, State};
use crate::birkhoff::{Direction, Transport, TransportOptions};
use crate::poly::{ModeId, ModeIndex, Polynomial, WeightScheme};
use crate::seeds;

/// Spectral shape of the initial data before scaling to `||z||_s = eps`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialProfile {
    /// `rho_j = (1 + |j|)^(-p)`
    PowerDecay(f64),
    /// explicit amplitudes; unlisted modes start at zero
    Explicit(BTreeMap<ModeId, f64>),
}

impl InitialProfile {
    fn amplitude(&self, m: &ModeId) -> f64 {
        match self {
            InitialProfile::PowerDecay(p) => (1.0 + m.norm()).powf(-p),
            InitialProfile::Explicit(v) => v.get(m).copied().unwrap_or(0.0),
        }
    }
}

/// `xi_j = eps rho_j e^{i theta_j} / ||rho||_s` with uniform phases drawn from
/// the "initial" substream of `seed`.
pub fn initial_state(index: Arc<ModeIndex>, profile: &InitialProfile, eps: f64, s: f64, weights: WeightScheme, seed: u64) -> Result<State, DynamicsError> {
    let mut rng = seeds::rng(seed, "initial");
    let rho: Vec<f64> = index.modes().iter().map(|m| profile.amplitude(m)).collect();
    let norm = index.modes().iter().zip(&rho).map(|(m, r)| 2.0 * weights.weight(m, s) * r * r).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(DynamicsError::InvalidOptions("initial profile vanishes on the mode set".into()));
    }
    let xi = rho.iter().map(|r| Complex64::from_polar(eps * r / norm, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
    Ok(State::new(index, xi))
}

#[derive(Clone, Debug)]
pub struct DriftConfig {
    pub model: String,
    pub eps_list: Vec<f64>,
    pub seeds: Vec<u64>,
    /// horizon `T = c eps^(-horizon_exponent)`
    pub horizon_exponent: f64,
    pub c: f64,
    pub s: f64,
    pub weights: WeightScheme,
    pub profile: InitialProfile,
    pub integrator: IntegratorOptions,
    /// generators of the normalizing map; the torus distance is measured in
    /// normalized coordinates when present
    pub generators: Vec<Polynomial>,
    pub transport: TransportOptions,
    /// torus distance every this many integrator strides (0 disables)
    pub torus_every: usize,
}

impl DriftConfig {
    pub fn new(model: &str, eps_list: Vec<f64>, seeds: Vec<u64>, horizon_exponent: f64, s: f64) -> Self {
        DriftConfig {
            model: model.to_string(),
            eps_list,
            seeds,
            horizon_exponent,
            c: 1.0,
            s,
            weights: WeightScheme::Shifted,
            profile: InitialProfile::PowerDecay(s + 1.0),
            integrator: IntegratorOptions { stride: 1, ..Default::default() },
            generators: Vec::new(),
            transport: TransportOptions::default(),
            torus_every: 0,
        }
    }

    pub fn horizon(&self, eps: f64) -> f64 {
        self.c * eps.powf(-self.horizon_exponent)
    }
}

/// One trajectory's summary.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftRow {
    pub model: String,
    pub eps: f64,
    pub seed: u64,
    /// time reached: the horizon, or the escape time
    pub t: f64,
    /// energy at the start
    pub energy: f64,
    pub energy_error: f64,
    /// `sup_t ||z(t)||_s`
    pub norm_s: f64,
    pub max_weighted_action_drift: f64,
    pub max_weighted_j_drift: f64,
    /// drift per mode, `sup_t |I_j(t) - I_j(0)|` (unweighted)
    pub action_drift: BTreeMap<ModeId, f64>,
    /// `sup_t |J_j(t) - J_j(0)|` per pair
    pub pair_drift: BTreeMap<i32, f64>,
    pub torus_dist: f64,
    pub escaped: bool,
}

/// Largest `w(j) |I_j - I_j(0)|` over observed times, tracked incrementally.
struct DriftTracker {
    modes: Vec<ModeId>,
    w: Vec<f64>,
    i0: Vec<f64>,
    sup: Vec<f64>,
    pairs0: BTreeMap<i32, f64>,
    pair_sup: BTreeMap<i32, f64>,
    shells0: BTreeMap<i64, f64>,
    shell_sup: BTreeMap<i64, f64>,
}

impl DriftTracker {
    fn new(z: &State, s: f64, weights: WeightScheme) -> Self {
        let acts = z.action_map();
        DriftTracker {
            modes: z.modes().to_vec(),
            w: z.modes().iter().map(|m| weights.weight(m, s)).collect(),
            i0: z.actions(),
            sup: vec![0.0; z.xi.len()],
            pairs0: pair_actions(&acts),
            pair_sup: BTreeMap::new(),
            shells0: shell_actions(&acts),
            shell_sup: BTreeMap::new(),
        }
    }

    fn update(&mut self, z: &State) {
        for (k, x) in z.xi.iter().enumerate() {
            self.sup[k] = self.sup[k].max((x.norm_sqr() - self.i0[k]).abs());
        }
        let acts = z.action_map();
        for (j, v) in pair_actions(&acts) {
            let e = self.pair_sup.entry(j).or_insert(0.0);
            *e = e.max((v - self.pairs0[&j]).abs());
        }
        if self.modes.first().map_or(1, |m| m.dim()) > 1 {
            for (m2, v) in shell_actions(&acts) {
                let e = self.shell_sup.entry(m2).or_insert(0.0);
                *e = e.max((v - self.shells0[&m2]).abs());
            }
        }
    }

    fn weighted_action(&self) -> f64 {
        self.sup.iter().zip(&self.w).map(|(a, w)| a * w).fold(0.0, f64::max)
    }

    /// Pairs in one dimension, shells otherwise; a shell uses the weight of
    /// its modes (they share `|k|`).
    fn weighted_j(&self, s: f64, weights: WeightScheme) -> f64 {
        if self.shell_sup.is_empty() {
            self.pair_sup.iter().map(|(j, d)| weights.weight(&ModeId::scalar(*j), s) * d).fold(0.0, f64::max)
        } else {
            let mut w_of: BTreeMap<i64, f64> = BTreeMap::new();
            for (m, w) in self.modes.iter().zip(&self.w) {
                w_of.insert(m.norm_sq(), *w);
            }
            self.shell_sup.iter().map(|(m2, d)| w_of[m2] * d).fold(0.0, f64::max)
        }
    }
}

/// Integrate one trajectory of `h` from `z0` for the configured horizon.
pub fn drift_run(field: &HamiltonianField, transport: Option<&Transport>, z0: &State, eps: f64, seed: u64, cfg: &DriftConfig) -> Result<DriftRow, DynamicsError> {
    let horizon = cfg.horizon(eps);
    let mut tracker = DriftTracker::new(z0, cfg.s, cfg.weights);
    let e0 = field.energy(&z0.xi);
    let reference = match transport {
        Some(t) if cfg.torus_every > 0 => Some(t.apply(z0, Direction::Inverse, &cfg.transport)?.action_map()),
        _ => None,
    };
    let mut sup_norm: f64 = 0.0;
    let mut energy_error: f64 = 0.0;
    let mut torus: f64 = 0.0;
    let mut escaped = false;
    let mut calls = 0usize;
    let mut failure = None;
    let mut integ = Integrator::new(field, cfg.integrator)?;
    let last = integ.run(z0, horizon, |z| {
        tracker.update(z);
        let n = z.norm_s(cfg.s, cfg.weights);
        sup_norm = sup_norm.max(n);
        energy_error = energy_error.max((field.energy(&z.xi) - e0).abs());
        if let (Some(t), Some(r)) = (transport, reference.as_ref()) {
            if calls % cfg.torus_every == 0 {
                match t.apply(z, Direction::Inverse, &cfg.transport) {
                    Ok(zn) => torus = torus.max(torus_distance(&zn.action_map(), r, cfg.s, cfg.weights)),
                    Err(e) => {
                        failure = Some(e);
                        return ControlFlow::Break(());
                    }
                }
            }
        }
        calls += 1;
        if n > 2.0 * eps {
            escaped = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(DriftRow {
        model: cfg.model.clone(),
        eps,
        seed,
        t: last.time,
        energy: e0,
        energy_error,
        norm_s: sup_norm,
        max_weighted_action_drift: tracker.weighted_action(),
        max_weighted_j_drift: tracker.weighted_j(cfg.s, cfg.weights),
        action_drift: tracker.modes.iter().cloned().zip(tracker.sup.iter().copied()).collect(),
        pair_drift: tracker.pair_sup.clone(),
        torus_dist: torus,
        escaped,
    })
}

/// Every `(eps, seed)` trajectory of `h`, in grid order; runs in parallel.
pub fn drift_experiment(h: &Polynomial, cfg: &DriftConfig) -> Result<Vec<DriftRow>, DynamicsError> {
    let index = Arc::new(ModeIndex::new(h.support()));
    let field = HamiltonianField::new(h, index.clone())?;
    let transport = if cfg.generators.is_empty() { None } else { Some(Transport::new(&cfg.generators, index.clone())?) };
    let jobs: Vec<(f64, u64)> = cfg.eps_list.iter().flat_map(|e| cfg.seeds.iter().map(move |s| (*e, *s))).collect();
    jobs.par_iter()
        .map(|&(eps, seed)| {
            let z0 = initial_state(index.clone(), &cfg.profile, eps, cfg.s, cfg.weights, seed)?;
            drift_run(&field, transport.as_ref(), &z0, eps, seed, cfg)
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub const DRIFT_CSV_HEADER: [&str; 10] = ["model", "eps", "seed", "t", "H", "norm_s", "max_weighted_action_drift", "max_weighted_J_drift", "torus_dist", "escaped"];

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_drift_csv<W: Write>(rows: &[DriftRow], w: W) -> Result<(), DynamicsError> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| DynamicsError::Io(e.to_string());
    wr.write_record(DRIFT_CSV_HEADER).map_err(io)?;
    for r in rows {
        wr.write_record([
            r.model.clone(),
            float(r.eps),
            r.seed.to_string(),
            float(r.t),
            float(r.energy),
            float(r.norm_s),
            float(r.max_weighted_action_drift),
            float(r.max_weighted_j_drift),
            float(r.torus_dist),
            r.escaped.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| DynamicsError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    fn linear(n: i32) -> Polynomial {
        let mut h = Polynomial::zero(1);
        for j in 1..=n {
            h.add_term(Monomial::action(ModeId::scalar(j)), Complex64::new((j * j) as f64, 0.0)).unwrap();
        }
        h
    }

    #[test]
    fn initial_state_has_requested_norm() {
        let idx = Arc::new(ModeIndex::new((1..=5).map(ModeId::scalar).collect()));
        let z = initial_state(idx, &InitialProfile::PowerDecay(3.0), 0.07, 2.0, WeightScheme::Shifted, 3).unwrap();
        assert!((z.norm_s(2.0, WeightScheme::Shifted) - 0.07).abs() < 1e-15);
    }

    #[test]
    fn linear_system_has_no_drift() {
        let mut cfg = DriftConfig::new("linear", vec![0.1, 0.05], vec![1, 2], 1.0, 1.0);
        cfg.integrator.dt = 0.05;
        let rows = drift_experiment(&linear(4), &cfg).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.max_weighted_action_drift < 1e-15, "{}", r.max_weighted_action_drift);
            assert!(!r.escaped);
            assert!((r.t - cfg.horizon(r.eps)).abs() < 1e-9);
        }
        let mut buf = Vec::new();
        write_drift_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("model,eps,seed,t,H,norm_s,max_weighted_action_drift,max_weighted_J_drift,torus_dist,escaped"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(3)).collect();
        assert!((loglog_slope(&x, &y) - 3.0).abs() < 1e-12);
    }
}
