//! Flat run configuration: TOML file, then `--set key=value` overrides, then
//! typed validation with defaults filled in.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use toml::Value;

use crate::CliError;

/// Every accepted key with a one-line description, in display order.
pub const KEYS: &[(&str, &str)] = &[
    ("model", "nlw_dirichlet | nlw_periodic | nls1d_dirichlet | nls_coupled | nls_dd | custom"),
    ("seed", "manifest seed; potential and Monte Carlo streams derive from it"),
    ("jmax", "largest mode index kept"),
    ("d", "lattice dimension for nls_dd"),
    ("r_star", "number of normalization steps"),
    ("gamma", "small-divisor constant"),
    ("alpha", "small-divisor exponent"),
    ("N", "tail cutoff: integer or \"auto\" (uses eps)"),
    ("eps", "amplitude for simulate and for an automatic cutoff"),
    ("s", "Sobolev index of the weighted norms"),
    ("mode", "degree | block"),
    ("r", "resonance search length (defaults to r_star)"),
    ("potential", "sampled | zero"),
    ("potential_coeffs", "explicit cosine coefficients v_1, v_2, ... (1-d models)"),
    ("potential_r_amp", "sampled amplitude R"),
    ("potential_sigma", "exponential decay of cosine families"),
    ("potential_delta", "mass range for nlw_periodic"),
    ("potential_m_decay", "algebraic decay for the lattice family"),
    ("mass", "wave equation mass (nlw_periodic defaults to the sampled mass)"),
    ("power", "wave nonlinearity u^power"),
    ("coeff", "nonlinearity coefficient (kappa for nls_dd)"),
    ("nls_psi", "power of psi in the Schroedinger nonlinearity"),
    ("nls_psi_bar", "power of conj(psi) in the Schroedinger nonlinearity"),
    ("k_psi", "coupled model: |psi|^4 coefficient"),
    ("k_phi", "coupled model: |phi|^4 coefficient"),
    ("k_cross", "coupled model: |psi|^2 |phi|^2 coefficient"),
    ("frequencies", "custom model: omega_1, omega_2, ..."),
    ("perturbation", "custom model: polynomial text file, relative to the config"),
    ("dt", "integrator step"),
    ("tol", "midpoint fixed-point tolerance"),
    ("stride", "observer stride in steps"),
    ("eps_list", "drift amplitudes"),
    ("seeds", "initial-data seeds (defaults to [seed])"),
    ("c", "horizon constant, T = c eps^-horizon_exponent"),
    ("horizon_exponent", "horizon exponent"),
    ("profile_decay", "initial amplitudes ~ (1+|j|)^-profile_decay (defaults to s+1)"),
    ("t_final", "simulate: duration (defaults to the drift horizon of eps)"),
    ("torus_every", "drift: torus distance every this many strides, 0 disables"),
    ("samples", "Monte Carlo sample count"),
    ("gamma_grid", "Monte Carlo gamma values"),
    ("node_cap", "enumeration node budget"),
    ("out_dir", "parent of the run directories"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    NlwDirichlet,
    NlwPeriodic,
    Nls1dDirichlet,
    NlsCoupled,
    NlsDd,
    Custom,
}

impl Model {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "nlw_dirichlet" => Model::NlwDirichlet,
            "nlw_periodic" => Model::NlwPeriodic,
            "nls1d_dirichlet" => Model::Nls1dDirichlet,
            "nls_coupled" => Model::NlsCoupled,
            "nls_dd" => Model::NlsDd,
            "custom" => Model::Custom,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::NlwDirichlet => "nlw_dirichlet",
            Model::NlwPeriodic => "nlw_periodic",
            Model::Nls1dDirichlet => "nls1d_dirichlet",
            Model::NlsCoupled => "nls_coupled",
            Model::NlsDd => "nls_dd",
            Model::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Auto,
    #[serde(untagged)]
    Fixed(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Normalize,
    ScanResonances,
    MeasureEstimate,
    Simulate,
    DriftExperiment,
    Report,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcommand::Normalize => "normalize",
            Subcommand::ScanResonances => "scan-resonances",
            Subcommand::MeasureEstimate => "measure-estimate",
            Subcommand::Simulate => "simulate",
            Subcommand::DriftExperiment => "drift-experiment",
            Subcommand::Report => "report",
        })
    }
}

/// Fully resolved configuration; this is what the manifest records and hashes.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub model: Model,
    pub seed: u64,
    pub jmax: u32,
    pub d: usize,
    pub r_star: u32,
    pub gamma: Option<f64>,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: Cutoff,
    pub eps: f64,
    pub s: f64,
    pub mode: String,
    pub r: u32,
    pub potential: String,
    pub potential_coeffs: Option<Vec<f64>>,
    pub potential_r_amp: f64,
    pub potential_sigma: f64,
    pub potential_delta: f64,
    pub potential_m_decay: f64,
    pub mass: Option<f64>,
    pub power: u32,
    pub coeff: f64,
    pub nls_psi: u32,
    pub nls_psi_bar: u32,
    pub k_psi: f64,
    pub k_phi: f64,
    pub k_cross: f64,
    pub frequencies: Option<Vec<f64>>,
    /// resolved against the config file's directory
    pub perturbation: Option<PathBuf>,
    pub dt: f64,
    pub tol: f64,
    pub stride: usize,
    pub eps_list: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
    pub c: f64,
    pub horizon_exponent: f64,
    pub profile_decay: f64,
    pub t_final: Option<f64>,
    pub torus_every: usize,
    pub samples: usize,
    pub gamma_grid: Option<Vec<f64>>,
    pub node_cap: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn gamma(&self) -> f64 {
        self.gamma.expect("validated")
    }

    /// sha256 of the canonical JSON form.
    pub fn sha256(&self) -> String {
        crate::hex_sha256(self.canonical_json().as_bytes())
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

fn invalid(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {msg}"))
}

/// Parse a `key=value` override. The value is read as a TOML value, falling
/// back to a bare string.
pub fn parse_override(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Validation(format!("--set {s}: expected key=value")))?;
    let k = k.trim().to_string();
    Ok((k, parse_value(v.trim())))
}

pub fn parse_value(v: &str) -> Value {
    match toml::from_str::<toml::Table>(&format!("x = {v}")) {
        Ok(mut t) => t.remove("x").expect("key present"),
        Err(_) => Value::String(v.to_string()),
    }
}

/// Raw key table plus the directory relative paths resolve against.
pub struct RawConfig {
    table: BTreeMap<String, Value>,
    base: PathBuf,
}

impl RawConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RawConfig { table: BTreeMap::new(), base: PathBuf::from(".") });
        };
        let text = std::fs::read_to_string(path).map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text).map_err(|e| invalid("config", e.to_string().trim()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(RawConfig { table: table.into_iter().collect(), base })
    }

    pub fn set(&mut self, key: String, value: Value) {
        self.table.insert(key, value);
    }

    /// Validate against the subcommand's needs and fill defaults.
    pub fn resolve(&self, cmd: Subcommand) -> Result<RunConfig, CliError> {
        for k in self.table.keys() {
            if !KEYS.iter().any(|(name, _)| name == k) {
                return Err(invalid(k, "unknown key"));
            }
        }
        let t = Typed(&self.table);
        let model_name = t.string("model")?;
        let model = match (&model_name, cmd) {
            (Some(name), _) => Model::parse(name).ok_or_else(|| invalid("model", format!("unknown model `{name}`")))?,
            (None, Subcommand::Report) => Model::Custom,
            (None, _) => return Err(invalid("model", "required")),
        };
        let needs_model = cmd != Subcommand::Report;

        let jmax = match (t.uint("jmax")?, model) {
            (Some(j), _) => j as u32,
            (None, Model::Custom) => t.floats("frequencies")?.map_or(0, |f| f.len() as u32),
            (None, _) if needs_model => return Err(invalid("jmax", "required")),
            (None, _) => 0,
        };
        if needs_model && jmax == 0 {
            return Err(invalid("jmax", "must be at least 1"));
        }
        let r_star = t.uint("r_star")?.unwrap_or(2) as u32;
        if r_star == 0 {
            return Err(invalid("r_star", "must be at least 1"));
        }
        let s = t.positive("s")?.unwrap_or(1.0);
        let n = match self.table.get("N") {
            None => Cutoff::Auto,
            Some(Value::String(x)) if x == "auto" => Cutoff::Auto,
            Some(Value::Integer(i)) if *i >= 1 => Cutoff::Fixed(*i as u32),
            Some(other) => return Err(invalid("N", format!("expected \"auto\" or a positive integer, got {other}"))),
        };
        let mode = t.string("mode")?.unwrap_or_else(|| "degree".into());
        if !matches!(mode.as_str(), "degree" | "block") {
            return Err(invalid("mode", format!("expected degree or block, got `{mode}`")));
        }
        let potential = t.string("potential")?.unwrap_or_else(|| "sampled".into());
        if !matches!(potential.as_str(), "sampled" | "zero") {
            return Err(invalid("potential", format!("expected sampled or zero, got `{potential}`")));
        }
        let seed = t.uint("seed")?.unwrap_or(0);
        let defaults = bnf_core::spectra::PotentialParams::default();
        let cfg = RunConfig {
            model,
            seed,
            jmax,
            d: t.uint("d")?.unwrap_or(2) as usize,
            r_star,
            gamma: t.positive("gamma")?,
            alpha: t.positive("alpha")?.unwrap_or(1.0),
            n,
            eps: t.positive("eps")?.unwrap_or(0.01),
            s,
            mode,
            r: t.uint("r")?.map_or(r_star, |r| r as u32),
            potential,
            potential_coeffs: t.floats("potential_coeffs")?,
            potential_r_amp: t.float("potential_r_amp")?.unwrap_or(defaults.r_amp),
            potential_sigma: t.float("potential_sigma")?.unwrap_or(defaults.sigma),
            potential_delta: t.float("potential_delta")?.unwrap_or(defaults.delta),
            potential_m_decay: t.float("potential_m_decay")?.unwrap_or(defaults.m_decay),
            mass: t.float("mass")?,
            power: t.uint("power")?.unwrap_or(4) as u32,
            coeff: t.float("coeff")?.unwrap_or(1.0),
            nls_psi: t.uint("nls_psi")?.unwrap_or(2) as u32,
            nls_psi_bar: t.uint("nls_psi_bar")?.unwrap_or(2) as u32,
            k_psi: t.float("k_psi")?.unwrap_or(1.0),
            k_phi: t.float("k_phi")?.unwrap_or(1.0),
            k_cross: t.float("k_cross")?.unwrap_or(0.5),
            frequencies: t.floats("frequencies")?,
            perturbation: t.string("perturbation")?.map(|p| self.base.join(p)),
            dt: t.positive("dt")?.unwrap_or(0.01),
            tol: t.positive("tol")?.unwrap_or(1e-14),
            stride: t.uint("stride")?.unwrap_or(10) as usize,
            eps_list: t.floats("eps_list")?,
            seeds: t.uints("seeds")?.unwrap_or_else(|| vec![seed]),
            c: t.positive("c")?.unwrap_or(1.0),
            horizon_exponent: t.float("horizon_exponent")?.unwrap_or(2.0),
            profile_decay: t.float("profile_decay")?.unwrap_or(s + 1.0),
            t_final: t.float("t_final")?,
            torus_every: t.uint("torus_every")?.unwrap_or(0) as usize,
            samples: t.uint("samples")?.unwrap_or(100) as usize,
            gamma_grid: t.floats("gamma_grid")?,
            node_cap: t.uint("node_cap")?.unwrap_or(50_000_000),
            out_dir: t.string("out_dir")?.map_or_else(|| PathBuf::from("runs"), PathBuf::from),
        };
        cfg.check(cmd)?;
        Ok(cfg)
    }
}

impl RunConfig {
    /// Cross-field and per-subcommand requirements.
    fn check(&self, cmd: Subcommand) -> Result<(), CliError> {
        if self.stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if self.model == Model::Custom && cmd != Subcommand::Report {
            let f = self.frequencies.as_ref().ok_or_else(|| invalid("frequencies", "required for the custom model"))?;
            if f.is_empty() || f.iter().any(|w| !(*w > 0.0)) {
                return Err(invalid("frequencies", "must be a nonempty list of positive numbers"));
            }
            if self.perturbation.is_none() {
                return Err(invalid("perturbation", "required for the custom model"));
            }
        }
        if self.model == Model::NlsDd && !(1..=3).contains(&self.d) {
            return Err(invalid("d", "must be 1, 2 or 3"));
        }
        if self.model == Model::NlwPeriodic || self.model == Model::NlwDirichlet {
            if self.power < 3 {
                return Err(invalid("power", "must be at least 3"));
            }
        }
        if self.nls_psi + self.nls_psi_bar < 3 {
            return Err(invalid("nls_psi", "nonlinearity must have total degree at least 3"));
        }
        let need_gamma = match cmd {
            Subcommand::Normalize | Subcommand::ScanResonances => true,
            Subcommand::DriftExperiment => self.torus_every > 0,
            _ => false,
        };
        if need_gamma && self.gamma.is_none() {
            return Err(invalid("gamma", "required"));
        }
        match cmd {
            Subcommand::ScanResonances if self.r == 0 => return Err(invalid("r", "must be at least 1")),
            Subcommand::MeasureEstimate => {
                if self.samples < 30 {
                    return Err(invalid("samples", "need at least 30"));
                }
                let g = self.gamma_grid.as_ref().ok_or_else(|| invalid("gamma_grid", "required"))?;
                if g.is_empty() || g.iter().any(|x| !(*x > 0.0)) {
                    return Err(invalid("gamma_grid", "must be a nonempty list of positive numbers"));
                }
                if !matches!(self.model, Model::Nls1dDirichlet | Model::NlwPeriodic | Model::NlsDd) {
                    return Err(invalid("model", "measure-estimate needs nls1d_dirichlet, nlw_periodic or nls_dd"));
                }
            }
            Subcommand::DriftExperiment => {
                let e = self.eps_list.as_ref().ok_or_else(|| invalid("eps_list", "required"))?;
                if e.is_empty() || e.iter().any(|x| !(*x > 0.0)) {
                    return Err(invalid("eps_list", "must be a nonempty list of positive numbers"));
                }
                if self.seeds.is_empty() {
                    return Err(invalid("seeds", "must not be empty"));
                }
            }
            Subcommand::Simulate => {
                if let Some(t) = self.t_final {
                    if !t.is_finite() {
                        return Err(invalid("t_final", "must be finite"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

struct Typed<'a>(&'a BTreeMap<String, Value>);

impl Typed<'_> {
    fn string(&self, k: &str) -> Result<Option<String>, CliError> {
        match self.0.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(invalid(k, format!("expected a string, got {v}"))),
        }
    }

    fn float(&self, k: &str) -> Result<Option<f64>, CliError> {
        match self.0.get(k) {
            None => Ok(None),
            Some(v) => as_f64(v).map(Some).ok_or_else(|| invalid(k, format!("expected a number, got {v}"))),
        }
    }

    fn positive(&self, k: &str) -> Result<Option<f64>, CliError> {
        match self.float(k)? {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(invalid(k, format!("must be positive, got {x}"))),
            x => Ok(x),
        }
    }

    fn uint(&self, k: &str) -> Result<Option<u64>, CliError> {
        match self.0.get(k) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => Err(invalid(k, format!("expected a nonnegative integer, got {v}"))),
        }
    }

    fn floats(&self, k: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.0.get(k) {
            None => Ok(None),
            Some(Value::Array(a)) => a.iter().map(|v| as_f64(v).ok_or_else(|| invalid(k, format!("expected numbers, got {v}")))).collect::<Result<_, _>>().map(Some),
            Some(v) => as_f64(v).map(|x| Some(vec![x])).ok_or_else(|| invalid(k, format!("expected a list of numbers, got {v}"))),
        }
    }

    fn uints(&self, k: &str) -> Result<Option<Vec<u64>>, CliError> {
        let bad = |v: &Value| invalid(k, format!("expected nonnegative integers, got {v}"));
        match self.0.get(k) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                    _ => Err(bad(v)),
                })
                .collect::<Result<_, _>>()
                .map(Some),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(vec![*i as u64])),
            Some(v) => Err(bad(v)),
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}
