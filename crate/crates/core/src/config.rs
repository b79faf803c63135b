//! Run configuration: a TOML file with flat physical keys plus `[run]` and
//! `[integrator]` sections, overridden key by key from the command line.
//!
//! ```toml
//! n_atoms = 600
//! g = 3.0
//! cos_theta = 0.04
//!
//! [run]
//! mode = "sweep"
//! hamiltonian = "full"
//! n_tot_max = 6
//! grid = "0.04:0.3:14"
//!
//! [integrator]
//! t_end = 500.0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::IntegratorConfig;
use crate::hamiltonian::HamiltonianKind;
use crate::hilbert::{Mode, Truncation};
use crate::model::{PhysicalParams, Units, DEFAULT_RATIO_THRESHOLD};
use crate::observables::{linspace, SpectrumSettings};

/// What a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// One trajectory from the vacuum, exported as a time series.
    #[default]
    Simulate,
    /// g²(0) and populations across a cosθ grid.
    Sweep,
    /// Interaction-free transmission versus drive detuning Δ.
    Spectrum,
    /// Derived-quantity table and strong-nonlinearity checks.
    Feasibility,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::Simulate => "simulate",
            RunMode::Sweep => "sweep",
            RunMode::Spectrum => "spectrum",
            RunMode::Feasibility => "feasibility",
        }
    }
}

/// Problems with the configuration file or flags.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid grid `{spec}`: {reason}")]
    Grid { spec: String, reason: &'static str },
    #[error("invalid value for `{key}`: {reason}")]
    Value { key: &'static str, reason: String },
}

/// Grid written either as a TOML array or as a string
/// (`"start:stop:count"` or `"a,b,c"`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        match self {
            GridSpec::List(v) => check_grid(v.clone(), &format!("{v:?}")),
            GridSpec::Text(s) => parse_grid(s),
        }
    }
}

fn check_grid(values: Vec<f64>, spec: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |reason| ConfigError::Grid { spec: spec.to_string(), reason };
    if values.is_empty() {
        return Err(err("grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(err("grid values must be finite"));
    }
    Ok(values)
}

/// Parses `"start:stop:count"` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |reason| ConfigError::Grid { spec: spec.to_string(), reason };
    let spec_t = spec.trim();
    if spec_t.contains(':') {
        let parts: Vec<&str> = spec_t.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err("expected start:stop:count"));
        }
        let start: f64 = parts[0].parse().map_err(|_| err("start is not a number"))?;
        let stop: f64 = parts[1].parse().map_err(|_| err("stop is not a number"))?;
        let count: usize = parts[2].parse().map_err(|_| err("count is not a positive integer"))?;
        if count == 0 {
            return Err(err("count must be at least 1"));
        }
        return check_grid(linspace(start, stop, count), spec);
    }
    let values = spec_t
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| err("expected comma-separated numbers"))?;
    check_grid(values, spec)
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_atoms: Option<u64>,
    pub g: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma_e: Option<f64>,
    pub gamma_r: Option<f64>,
    pub chi_bar: Option<f64>,
    pub cos_theta: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub control_rabi: Option<f64>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub mode: Option<RunMode>,
    pub hamiltonian: Option<HamiltonianKind>,
    pub n_tot_max: Option<usize>,
    pub hard_core_pair: Option<bool>,
    pub grid: Option<GridSpec>,
    pub window: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub units: Option<Units>,
    pub threshold: Option<f64>,
    pub threads: Option<usize>,
    pub observables: Option<Vec<String>>,
    pub horizon: Option<f64>,
    pub settle_lifetimes: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub output_interval: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub max_step: Option<f64>,
    pub max_steps: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.to_path_buf(), reason: e.to_string() })?;
        Self::parse(&text, path)
    }

    /// Overlays every key set in `other` onto `self`.
    pub fn merge(mut self, other: ConfigFile) -> Self {
        macro_rules! overlay {
            ($($($field:ident).+),+ $(,)?) => {
                $( if other.$($field).+.is_some() { self.$($field).+ = other.$($field).+; } )+
            };
        }
        overlay!(
            n_atoms, g, kappa, gamma_e, gamma_r, chi_bar, cos_theta, beta, delta, control_rabi,
            run.mode, run.hamiltonian, run.n_tot_max, run.hard_core_pair, run.grid, run.window,
            run.out_dir, run.units, run.threshold, run.threads, run.observables, run.horizon,
            run.settle_lifetimes, run.samples,
            integrator.t_start, integrator.t_end, integrator.output_interval, integrator.rtol,
            integrator.atol, integrator.max_step, integrator.max_steps,
        );
        self
    }
}

/// Observables a trajectory CSV may carry.
pub const TRAJECTORY_OBSERVABLES: [&str; 5] = ["n0", "n1", "n2", "np", "photon"];

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: RunMode,
    pub hamiltonian: HamiltonianKind,
    pub params: PhysicalParams<f64>,
    pub truncation: Truncation,
    pub integrator: IntegratorConfig<f64>,
    /// cosθ values (sweep) or Δ values (spectrum); empty means "mode default".
    pub grid: Vec<f64>,
    pub window: f64,
    pub out_dir: PathBuf,
    pub units: Units,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub observables: Vec<String>,
    pub spectrum: SpectrumSettings<f64>,
}

/// cosθ grid used by `sweep` when none is given.
pub const DEFAULT_SWEEP_GRID: (f64, f64, usize) = (0.04, 0.3, 14);

impl RunConfig {
    /// Resolves a (merged) config, filling unset keys with the blockade
    /// reference parameters and stock settings, and validates it.
    pub fn resolve(file: ConfigFile) -> Result<Self, ConfigError> {
        let base = PhysicalParams::<f64>::blockade_reference();
        let params = PhysicalParams {
            n_atoms: file.n_atoms.unwrap_or(base.n_atoms),
            g: file.g.unwrap_or(base.g),
            kappa: file.kappa.unwrap_or(base.kappa),
            gamma_e: file.gamma_e.unwrap_or(base.gamma_e),
            gamma_r: file.gamma_r.unwrap_or(base.gamma_r),
            chi_bar: file.chi_bar.unwrap_or(base.chi_bar),
            cos_theta: file.cos_theta.unwrap_or(base.cos_theta),
            beta: file.beta.unwrap_or(base.beta),
            delta: file.delta.unwrap_or(base.delta),
            control_rabi: file.control_rabi,
        };
        let run = file.run;
        let mode = run.mode.unwrap_or_default();
        let truncation = Truncation::new(run.n_tot_max.unwrap_or(Truncation::default().n_tot_max))
            .hard_core(run.hard_core_pair.unwrap_or(false));
        let d = IntegratorConfig::<f64>::default();
        let i = file.integrator;
        let integrator = IntegratorConfig {
            t_start: i.t_start.unwrap_or(d.t_start),
            t_end: i.t_end.unwrap_or(d.t_end),
            output_interval: i.output_interval.unwrap_or(d.output_interval),
            rtol: i.rtol.unwrap_or(d.rtol),
            atol: i.atol.unwrap_or(d.atol),
            max_step: i.max_step.unwrap_or(d.max_step),
            max_steps: i.max_steps.unwrap_or(d.max_steps),
            positivity_shift: d.positivity_shift,
        };
        let grid = match &run.grid {
            Some(g) => g.values()?,
            None => Vec::new(),
        };
        let sd = SpectrumSettings::<f64>::default();
        let spectrum = SpectrumSettings {
            settle_lifetimes: run.settle_lifetimes.unwrap_or(sd.settle_lifetimes),
            horizon: run.horizon.unwrap_or(sd.horizon),
            samples: run.samples.unwrap_or(sd.samples),
            window: run.window.unwrap_or(sd.window),
            rtol: i.rtol.unwrap_or(sd.rtol),
            atol: i.atol.unwrap_or(sd.atol),
            threads: run.threads,
        };
        let cfg = RunConfig {
            mode,
            hamiltonian: run.hamiltonian.unwrap_or_default(),
            params,
            truncation,
            integrator,
            grid,
            window: run.window.unwrap_or(0.5),
            out_dir: run.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            units: run.units.unwrap_or_default(),
            threshold: run.threshold.unwrap_or(DEFAULT_RATIO_THRESHOLD),
            threads: run.threads,
            observables: run
                .observables
                .unwrap_or_else(|| TRAJECTORY_OBSERVABLES.iter().map(|s| s.to_string()).collect()),
            spectrum,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let value = |key, reason: String| ConfigError::Value { key, reason };
        self.params.validate().map_err(|e| value("physical parameters", e.to_string()))?;
        self.integrator.validate().map_err(|e| value("integrator", e.to_string()))?;
        if !(self.window > 0.0 && self.window <= 1.0) {
            return Err(value("window", format!("{} is outside (0, 1]", self.window)));
        }
        if !(self.threshold > 0.0) {
            return Err(value("threshold", format!("{} must be positive", self.threshold)));
        }
        if self.threads == Some(0) {
            return Err(value("threads", "must be at least 1".into()));
        }
        if !(self.spectrum.horizon > 0.0 && self.spectrum.settle_lifetimes > 0.0) {
            return Err(value("horizon", "horizon and settle_lifetimes must be positive".into()));
        }
        if self.spectrum.samples < 2 {
            return Err(value("samples", "need at least 2 output samples".into()));
        }
        for o in &self.observables {
            if !TRAJECTORY_OBSERVABLES.contains(&o.as_str()) {
                return Err(value(
                    "observables",
                    format!("unknown observable `{o}` (expected one of {})", TRAJECTORY_OBSERVABLES.join(", ")),
                ));
            }
        }
        if self.mode == RunMode::Sweep {
            if let Some(c) = self.grid.iter().find(|&&c| !(c > 0.0 && c < 1.0)) {
                return Err(value("grid", format!("cos_theta value {c} is outside (0, 1)")));
            }
        }
        if self.mode == RunMode::Spectrum && self.hamiltonian != HamiltonianKind::Eit && self.hamiltonian != HamiltonianKind::Full {
            return Err(value("hamiltonian", "spectrum always uses the interaction-free Hamiltonian".into()));
        }
        if self.truncation.n_tot_max == 0 && self.mode != RunMode::Feasibility {
            return Err(value("n_tot_max", "must be at least 1".into()));
        }
        Ok(())
    }

    /// Sweep grid, falling back to the default cosθ range.
    pub fn sweep_grid(&self) -> Vec<f64> {
        if self.grid.is_empty() {
            let (a, b, n) = DEFAULT_SWEEP_GRID;
            linspace(a, b, n)
        } else {
            self.grid.clone()
        }
    }

    /// Detuning grid, defaulting to 601 points over ±1.5 E₁ (which includes Δ = 0).
    pub fn spectrum_grid(&self, e1: f64) -> Vec<f64> {
        if self.grid.is_empty() {
            let half = if e1.is_finite() && e1 > 0.0 { 1.5 * e1 } else { 10.0 * self.params.kappa.max(1.0) };
            let step = half / 300.0;
            (-300..=300).map(|k| k as f64 * step).collect()
        } else {
            self.grid.clone()
        }
    }

    pub fn observable_modes(&self) -> Vec<Option<Mode>> {
        self.observables
            .iter()
            .map(|o| match o.as_str() {
                "n0" => Some(Mode::B0),
                "n1" => Some(Mode::B1),
                "n2" => Some(Mode::B2),
                "np" => Some(Mode::Pair),
                _ => None,
            })
            .collect()
    }
}
