//! Plain-text summary of earlier runs, read back from their artifacts.

use bnf_core::dynamics::loglog_slope;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

fn read_err(p: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Compute(format!("{}: {e}", p.display()))
}

/// Run directories to summarize: the given ones, or every non-report run
/// under `out_dir`.
pub fn collect_runs(explicit: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !explicit.is_empty() {
        return Ok(explicit.to_vec());
    }
    let mut runs = Vec::new();
    if let Ok(rd) = std::fs::read_dir(out_dir) {
        for e in rd.flatten() {
            let p = e.path();
            let name = e.file_name().to_string_lossy().into_owned();
            if p.join("manifest.json").is_file() && !name.starts_with("report-") {
                runs.push(p);
            }
        }
    }
    runs.sort();
    Ok(runs)
}

fn records(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| read_err(path, e))?;
    let header = r.headers().map_err(|e| read_err(path, e))?.iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.map(|x| x.iter().map(str::to_string).collect())).collect::<Result<_, _>>().map_err(|e| read_err(path, e))?;
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize, CliError> {
    header.iter().position(|h| h == name).ok_or_else(|| read_err(path, format!("missing column {name}")))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or(f64::NAN)
}

pub fn render(runs: &[PathBuf]) -> Result<String, CliError> {
    let mut out = String::new();
    if runs.is_empty() {
        out.push_str("no runs found\n");
    }
    for run in runs {
        let mpath = run.join("manifest.json");
        let text = std::fs::read_to_string(&mpath).map_err(|e| read_err(&mpath, e))?;
        let m: Value = serde_json::from_str(&text).map_err(|e| read_err(&mpath, e))?;
        let cmd = m["subcommand"].as_str().unwrap_or("?");
        let _ = writeln!(out, "== {} [{cmd}, {}]", run.display(), m["status"].as_str().unwrap_or("?"));
        if let Some(err) = m["error"].as_str() {
            let _ = writeln!(out, "   error: {err}");
        }
        for a in m["artifacts"].as_array().into_iter().flatten() {
            let file = a["file"].as_str().unwrap_or_default();
            let path = run.join(file);
            if !path.is_file() {
                continue;
            }
            match file {
                f if f.ends_with(".json") => nf_section(&mut out, &path)?,
                _ => match cmd {
                    "drift-experiment" => drift_section(&mut out, &path)?,
                    "measure-estimate" => measure_section(&mut out, &path)?,
                    "scan-resonances" => hits_section(&mut out, &path)?,
                    "simulate" => frames_section(&mut out, &path)?,
                    _ => {}
                },
            }
        }
    }
    Ok(out)
}

fn nf_section(out: &mut String, path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| read_err(path, e))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| read_err(path, e))?;
    let residual = v["ledger"]["residuals"].as_array().into_iter().flatten().filter_map(Value::as_f64).map(f64::abs).fold(0.0, f64::max);
    let z_terms = v["verdicts"].as_array().map_or(0, Vec::len);
    let _ = writeln!(
        out,
        "   normal form: N = {}, {z_terms} Z terms, all members {}, max homological residual {residual:.3e}",
        v["parameters"]["n_cut"], v["all_members"]
    );
    if let Some(last) = v["ledger"]["tail_cubic_mass"].as_array().and_then(|a| a.last()) {
        let _ = writeln!(out, "   ledger: tail-cubic mass {last}, overflow mass {}", v["ledger"]["overflow_mass"].as_array().and_then(|a| a.last()).unwrap_or(&Value::Null));
    }
    Ok(())
}

fn drift_section(out: &mut String, path: &Path) -> Result<(), CliError> {
    let (h, rows) = records(path)?;
    let (ce, ci, cj, cx) = (column(&h, "eps", path)?, column(&h, "max_weighted_action_drift", path)?, column(&h, "max_weighted_J_drift", path)?, column(&h, "escaped", path)?);
    let mut by_eps: BTreeMap<String, (f64, f64, f64, usize, usize)> = BTreeMap::new();
    for r in &rows {
        let e = by_eps.entry(r[ce].clone()).or_insert((num(&r[ce]), 0.0, 0.0, 0, 0));
        e.1 = e.1.max(num(&r[ci]));
        e.2 = e.2.max(num(&r[cj]));
        e.3 += 1;
        e.4 += usize::from(r[cx] == "true");
    }
    let _ = writeln!(out, "   {:>12} {:>6} {:>14} {:>14} {:>8}", "eps", "runs", "max I drift", "max J drift", "escaped");
    for (eps, d_i, d_j, n, esc) in by_eps.values() {
        let _ = writeln!(out, "   {eps:>12.4e} {n:>6} {d_i:>14.4e} {d_j:>14.4e} {esc:>8}");
    }
    if by_eps.len() >= 2 {
        let x: Vec<f64> = by_eps.values().map(|v| v.0).collect();
        let y: Vec<f64> = by_eps.values().map(|v| v.1).collect();
        let _ = writeln!(out, "   log-log slope of the action drift: {:.3}", loglog_slope(&x, &y));
    }
    Ok(())
}

fn measure_section(out: &mut String, path: &Path) -> Result<(), CliError> {
    let (h, rows) = records(path)?;
    let idx: Vec<usize> = ["gamma", "violations", "used", "violation_fraction", "wilson_low", "wilson_high"].iter().map(|c| column(&h, c, path)).collect::<Result<_, _>>()?;
    let _ = writeln!(out, "   {:>12} {:>12} {:>10} {:>21}", "gamma", "violations", "fraction", "95% interval");
    for r in &rows {
        let _ = writeln!(
            out,
            "   {:>12.4e} {:>12} {:>10.4} [{:.4}, {:.4}]",
            num(&r[idx[0]]),
            format!("{}/{}", r[idx[1]], r[idx[2]]),
            num(&r[idx[3]]),
            num(&r[idx[4]]),
            num(&r[idx[5]])
        );
    }
    Ok(())
}

fn hits_section(out: &mut String, path: &Path) -> Result<(), CliError> {
    let (h, rows) = records(path)?;
    let (cp, cd) = (column(&h, "pattern", path)?, column(&h, "divisor", path)?);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &rows {
        *counts.entry(r[cp].as_str()).or_default() += 1;
    }
    let smallest = rows.iter().map(|r| num(&r[cd]).abs()).fold(f64::INFINITY, f64::min);
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    let _ = writeln!(out, "   near resonances: {} ({}), smallest |divisor| {smallest:.3e}", rows.len(), parts.join(", "));
    Ok(())
}

fn frames_section(out: &mut String, path: &Path) -> Result<(), CliError> {
    let (h, rows) = records(path)?;
    let (ct, ch, cn) = (column(&h, "t", path)?, column(&h, "H", path)?, column(&h, "norm_s", path)?);
    let e0 = rows.first().map_or(0.0, |r| num(&r[ch]));
    let err = rows.iter().map(|r| (num(&r[ch]) - e0).abs()).fold(0.0, f64::max);
    let norm = rows.iter().map(|r| num(&r[cn])).fold(0.0, f64::max);
    let t = rows.last().map_or(0.0, |r| num(&r[ct]));
    let _ = writeln!(out, "   trajectory to t = {t:.4e}: {} frames, max energy error {err:.3e}, sup norm {norm:.4e}", rows.len());
    Ok(())
}
