//! The compute subcommands. Each writes its artifacts into the run directory
//! and returns a small JSON summary for the manifest.

use bnf_core::birkhoff::normalize;
use bnf_core::dynamics::{drift_experiment, initial_state, integrate, loglog_slope, write_drift_csv, DriftConfig, HamiltonianField, InitialProfile, IntegratorOptions, ObservableSpec};
use bnf_core::poly::{ModeIndex, WeightScheme};
use bnf_core::resonance::{
    calibrate_pair_cutoff, classify_exception, enumerate_near_resonances, measure_estimate, shell_cutoff, ClassifyParams, ClassifyRule, DivisorQuery, MeasureConfig, PairRelation, QueryTemplate,
};
use bnf_core::spectra::sample_potential;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use crate::config::{Model, RunConfig, Subcommand};
use crate::pipeline::{build, family, n_cut, normal_form_params, potential_params};
use crate::rundir::RunDir;
use crate::CliError;

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Compute(e.to_string())
}

/// Checks that need the core's own validators; run before the run directory
/// exists so a bad config leaves nothing behind.
pub fn preflight(cfg: &RunConfig, cmd: Subcommand) -> Result<(), CliError> {
    if cmd == Subcommand::Report {
        return Ok(());
    }
    if let Some(f) = family(cfg.model) {
        sample_potential(f, &potential_params(cfg), cfg.seed).map_err(|e| CliError::Validation(format!("potential: {e}")))?;
    }
    if cfg.model == Model::Custom {
        build(cfg)?;
    }
    match cmd {
        Subcommand::Normalize => drop(normal_form_params(cfg)?),
        Subcommand::DriftExperiment if cfg.torus_every > 0 => drop(normal_form_params(cfg)?),
        Subcommand::ScanResonances => drop(DivisorQuery::new(cfg.r, n_cut(cfg), cfg.gamma(), cfg.alpha, cfg.jmax).map_err(|e| CliError::Validation(e.to_string()))?),
        _ => {}
    }
    Ok(())
}

pub fn normalize_cmd(cfg: &RunConfig, dir: &mut RunDir, out: &str) -> Result<Value, CliError> {
    let params = normal_form_params(cfg)?;
    let b = build(cfg)?;
    let nf = normalize(&b.freqs, &b.perturbation(), &params).map_err(compute)?;
    let residual = nf.ledger.residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let doc = json!({
        "model": cfg.model.name(),
        "parameters": &nf.params,
        "threshold": nf.params.threshold(),
        "frequencies": b.freqs.iter().map(|(m, w)| json!({"mode": m.to_string(), "omega": w})).collect::<Vec<_>>(),
        "z": nf.z.to_text(false),
        "generators": nf.generators.iter().map(|g| g.to_text(false)).collect::<Vec<_>>(),
        "f_final": nf.f_final.to_text(false),
        "tail": nf.tail.to_text(false),
        "ledger": &nf.ledger,
        "verdicts": nf.verdicts.iter().map(|(m, ok)| json!({"monomial": m.to_string(), "member": ok})).collect::<Vec<_>>(),
        "all_members": nf.all_members(),
    });
    dir.write_file(out, serde_json::to_string_pretty(&doc).expect("json").as_bytes())?;
    Ok(json!({
        "n_cut": nf.params.n_cut,
        "z_terms": nf.z.len(),
        "generators": nf.generators.len(),
        "all_members": nf.all_members(),
        "max_homological_residual": residual,
    }))
}

/// Exempt-pattern parameters matching the model.
fn classify_params(cfg: &RunConfig, freqs: &bnf_core::spectra::FrequencyTable, gamma: f64, n: u32) -> ClassifyParams {
    let rule = match (cfg.model, family(cfg.model)) {
        (Model::NlsCoupled, _) => ClassifyRule { pair: Some(PairRelation::Equal), shell_m: None },
        (_, Some(f)) => ClassifyRule::for_family(f, &potential_params(cfg)),
        (_, None) => return ClassifyParams::none(),
    };
    ClassifyParams {
        pair_cutoff: rule.pair.map(|rel| calibrate_pair_cutoff(freqs, gamma, cfg.alpha, n, rel).0),
        pair_relation: rule.pair.unwrap_or(PairRelation::Opposite),
        shell_cutoff: rule.shell_m.map(|m| shell_cutoff(n, cfg.alpha, m)),
    }
}

pub fn scan_cmd(cfg: &RunConfig, dir: &mut RunDir, out: &str) -> Result<Value, CliError> {
    let n = n_cut(cfg);
    let mut q = DivisorQuery::new(cfg.r, n, cfg.gamma(), cfg.alpha, cfg.jmax).map_err(|e| CliError::Validation(e.to_string()))?;
    q.node_cap = cfg.node_cap;
    let b = build(cfg)?;
    let en = enumerate_near_resonances(&b.freqs, &q).map_err(compute)?;
    let cp = classify_params(cfg, &b.freqs, cfg.gamma(), n);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut w = csv::Writer::from_writer(dir.create_file(out)?);
    w.write_record(["k_serialized", "divisor", "pattern"]).map_err(csv_err)?;
    for h in &en.hits {
        let p = classify_exception(&h.k, &cp);
        *counts.entry(p.name()).or_default() += 1;
        w.write_record([h.serialize_k(), fmt(h.value), p.name().to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| compute(e))?;
    Ok(json!({
        "n_cut": n,
        "threshold": q.threshold(),
        "hits": en.hits.len(),
        "patterns": counts,
        "complete": en.complete,
        "nodes": en.nodes,
    }))
}

pub fn measure_cmd(cfg: &RunConfig, dir: &mut RunDir, out: &str) -> Result<Value, CliError> {
    let fam = family(cfg.model).expect("validated");
    let params = potential_params(cfg);
    let mc = MeasureConfig {
        family: fam,
        rule: ClassifyRule::for_family(fam, &params),
        params,
        template: QueryTemplate { r: cfg.r, n_cut: n_cut(cfg), alpha: cfg.alpha, jmax: cfg.jmax, node_cap: cfg.node_cap },
        samples: cfg.samples,
        seed: cfg.seed,
        gamma_grid: cfg.gamma_grid.clone().expect("validated"),
    };
    let rep = measure_estimate(&mc).map_err(compute)?;
    let mut w = csv::Writer::from_writer(dir.create_file(out)?);
    w.write_record([
        "gamma", "threshold", "used", "violations", "violation_fraction", "wilson_low", "wilson_high", "half_width", "hits_none", "hits_pair", "hits_shell",
    ])
    .map_err(csv_err)?;
    for r in &rep.rows {
        w.write_record([
            fmt(r.gamma),
            fmt(r.threshold),
            r.used.to_string(),
            r.violations.to_string(),
            fmt(r.violation_fraction),
            fmt(r.wilson_low),
            fmt(r.wilson_high),
            fmt(r.half_width),
            r.hits_none.to_string(),
            r.hits_pair.to_string(),
            r.hits_shell.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| compute(e))?;
    Ok(json!({
        "family": fam.name(),
        "skipped": rep.skipped,
        "incomplete": rep.incomplete,
        "violation_fraction": rep.rows.iter().map(|r| r.violation_fraction).collect::<Vec<_>>(),
    }))
}

fn integrator(cfg: &RunConfig) -> IntegratorOptions {
    IntegratorOptions { dt: cfg.dt, tol: cfg.tol, stride: cfg.stride, ..Default::default() }
}

pub fn simulate_cmd(cfg: &RunConfig, dir: &mut RunDir, out: &str) -> Result<Value, CliError> {
    let b = build(cfg)?;
    let index = Arc::new(ModeIndex::new(b.hamiltonian.support()));
    let z0 = initial_state(index.clone(), &InitialProfile::PowerDecay(cfg.profile_decay), cfg.eps, cfg.s, WeightScheme::Shifted, cfg.seed).map_err(compute)?;
    let field = HamiltonianField::new(&b.hamiltonian, index.clone()).map_err(compute)?;
    let duration = cfg.t_final.unwrap_or(cfg.c * cfg.eps.powf(-cfg.horizon_exponent));
    let frames = integrate(&field, &z0, duration, integrator(cfg), &ObservableSpec::new(cfg.s)).map_err(compute)?;
    let e0 = frames.first().map_or(0.0, |f| f.energy);
    let mut w = csv::Writer::from_writer(dir.create_file(out)?);
    let mut header = vec!["t".to_string(), "H".into(), "norm_s".into()];
    header.extend(index.modes().iter().map(|m| format!("I_{m}")));
    w.write_record(&header).map_err(csv_err)?;
    let mut worst: f64 = 0.0;
    for f in &frames {
        worst = worst.max((f.energy - e0).abs());
        let mut rec = vec![fmt(f.t), fmt(f.energy), fmt(f.norm_s)];
        rec.extend(index.modes().iter().map(|m| fmt(f.actions[m])));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| compute(e))?;
    Ok(json!({
        "modes": index.len(),
        "frames": frames.len(),
        "t_final": frames.last().map_or(0.0, |f| f.t),
        "max_energy_error": worst,
    }))
}

pub fn drift_cmd(cfg: &RunConfig, dir: &mut RunDir, out: &str) -> Result<Value, CliError> {
    let eps_list = cfg.eps_list.clone().expect("validated");
    let mut dc = DriftConfig::new(cfg.model.name(), eps_list.clone(), cfg.seeds.clone(), cfg.horizon_exponent, cfg.s);
    dc.c = cfg.c;
    dc.profile = InitialProfile::PowerDecay(cfg.profile_decay);
    dc.integrator = integrator(cfg);
    dc.torus_every = cfg.torus_every;
    let b = build(cfg)?;
    if cfg.torus_every > 0 {
        let nf = normalize(&b.freqs, &b.perturbation(), &normal_form_params(cfg)?).map_err(compute)?;
        dc.generators = nf.generators;
    }
    let rows = drift_experiment(&b.hamiltonian, &dc).map_err(compute)?;
    let mut w = dir.create_file(out)?;
    write_drift_csv(&rows, &mut w).map_err(compute)?;
    w.flush().map_err(|e| compute(e))?;

    let worst: Vec<f64> = eps_list.iter().map(|e| rows.iter().filter(|r| r.eps == *e).map(|r| r.max_weighted_action_drift).fold(0.0, f64::max)).collect();
    let slope = if eps_list.len() >= 2 { Some(loglog_slope(&eps_list, &worst)) } else { None };
    Ok(json!({
        "runs": rows.len(),
        "escaped": rows.iter().filter(|r| r.escaped).count(),
        "max_weighted_action_drift": worst,
        "drift_slope": slope,
    }))
}
