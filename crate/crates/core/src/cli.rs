//! Command-line front end: resolves the configuration, runs one mode and
//! writes its CSV plus a `.meta.toml` sidecar with the resolved inputs.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 numerical failure.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use log::info;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ConfigFile, GridSpec, IntegratorSection, RunConfig, RunMode, RunSection};
use crate::csv::{Cell, Table};
use crate::dynamics::evolve_schrodinger;
use crate::error::SimError;
use crate::hamiltonian::{build_with_atomic_decay, HamiltonianKind};
use crate::hilbert::Basis;
use crate::model::{derive_params, feasibility_report, DerivedParams, Units};
use crate::observables::{
    find_peaks, full_width_half_max, g2_zero, population_series, sweep_costheta, transmission_spectrum, RunSettings,
};

#[derive(Debug, Parser, Default)]
#[command(name = "polariton-sim", version, about = "Photon blockade with intracavity EIT in a Rydberg ensemble")]
pub struct Cli {
    /// Mode to run (same as --mode).
    #[arg(value_enum)]
    pub command: Option<RunMode>,
    #[arg(long, value_enum)]
    pub mode: Option<RunMode>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub hamiltonian: Option<HamiltonianKind>,
    #[arg(long)]
    pub n_tot_max: Option<usize>,
    /// Restrict the pair mode to at most one quantum.
    #[arg(long)]
    pub hard_core_pair: bool,
    /// cosθ values (sweep) or Δ values (spectrum): "start:stop:count" or "a,b,c".
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub n_atoms: Option<u64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub gamma_e: Option<f64>,
    #[arg(long)]
    pub gamma_r: Option<f64>,
    #[arg(long)]
    pub chi_bar: Option<f64>,
    #[arg(long)]
    pub cos_theta: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub control_rabi: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub output_interval: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    /// Trailing fraction of each trajectory used for time averages.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    /// Minimum ratio for the feasibility checks.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Upper bound on each spectrum run's duration.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Trajectory columns, comma separated (n0, n1, n2, np, photon).
    #[arg(long, value_delimiter = ',')]
    pub observables: Option<Vec<String>>,
}

impl Cli {
    /// The flags as a config overlay.
    pub fn overrides(&self) -> ConfigFile {
        ConfigFile {
            n_atoms: self.n_atoms,
            g: self.g,
            kappa: self.kappa,
            gamma_e: self.gamma_e,
            gamma_r: self.gamma_r,
            chi_bar: self.chi_bar,
            cos_theta: self.cos_theta,
            beta: self.beta,
            delta: self.delta,
            control_rabi: self.control_rabi,
            run: RunSection {
                mode: self.mode.or(self.command),
                hamiltonian: self.hamiltonian,
                n_tot_max: self.n_tot_max,
                hard_core_pair: self.hard_core_pair.then_some(true),
                grid: self.grid.clone().map(GridSpec::Text),
                window: self.window,
                out_dir: self.out_dir.clone(),
                units: self.units,
                threshold: self.threshold,
                threads: self.threads,
                observables: self.observables.clone(),
                horizon: self.horizon,
                settle_lifetimes: None,
                samples: None,
            },
            integrator: IntegratorSection {
                t_end: self.t_end,
                output_interval: self.output_interval,
                rtol: self.rtol,
                atol: self.atol,
                ..Default::default()
            },
        }
    }

    /// Config file (if any) overlaid with the flags.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        if let (Some(a), Some(b)) = (self.command, self.mode) {
            if a != b {
                return Err(ConfigError::Value {
                    key: "mode",
                    reason: format!("positional `{}` contradicts --mode {}", a.name(), b.name()),
                });
            }
        }
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        RunConfig::resolve(base.merge(self.overrides()))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure during {context}: {source}")]
    Numerical { context: String, source: SimError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    fn sim(context: impl Into<String>, e: SimError) -> Self {
        if e.is_numerical() {
            CliError::Numerical { context: context.into(), source: e }
        } else {
            CliError::Config(ConfigError::Value { key: "parameters", reason: e.to_string() })
        }
    }
}

/// Files written by a run and a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    mode: &'static str,
    output: String,
    wall_time_seconds: f64,
    results: BTreeMap<String, f64>,
    config: &'a RunConfig,
    derived: DerivedParams<f64>,
}

/// Path of the metadata file paired with an output file.
pub fn meta_path(output: &Path) -> PathBuf {
    output.with_extension("meta.toml")
}

fn write_outputs(
    cfg: &RunConfig,
    name: &str,
    table: &Table,
    derived: DerivedParams<f64>,
    results: BTreeMap<String, f64>,
    started: Instant,
) -> Result<Vec<PathBuf>, CliError> {
    let csv_path = cfg.out_dir.join(name);
    table.write(&csv_path).map_err(|source| CliError::Io { path: csv_path.clone(), source })?;
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        mode: cfg.mode.name(),
        output: name.to_string(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        results,
        config: cfg,
        derived,
    };
    let text = toml::to_string(&meta).map_err(|e| CliError::Io {
        path: meta_path(&csv_path),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })?;
    let mpath = meta_path(&csv_path);
    std::fs::write(&mpath, text).map_err(|source| CliError::Io { path: mpath.clone(), source })?;
    Ok(vec![csv_path, mpath])
}

fn settings(cfg: &RunConfig) -> RunSettings<f64> {
    RunSettings {
        hamiltonian: cfg.hamiltonian,
        truncation: cfg.truncation,
        integrator: cfg.integrator,
        window: cfg.window,
        threads: cfg.threads,
    }
}

/// Executes the configured mode.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io { path: cfg.out_dir.clone(), source })?;
    let derived = derive_params(&cfg.params).map_err(|e| CliError::sim("parameter derivation", e))?;
    info!("mode {} with {:?}", cfg.mode.name(), cfg.params);
    match cfg.mode {
        RunMode::Simulate => simulate(cfg, derived, started),
        RunMode::Sweep => sweep(cfg, derived, started),
        RunMode::Spectrum => spectrum(cfg, derived, started),
        RunMode::Feasibility => feasibility(cfg, derived, started),
    }
}

fn simulate(cfg: &RunConfig, derived: DerivedParams<f64>, started: Instant) -> Result<RunOutcome, CliError> {
    let basis = Basis::build(cfg.truncation);
    let h = build_with_atomic_decay(cfg.hamiltonian, &derived, &basis);
    let traj = evolve_schrodinger(&h, &basis.vacuum(), &cfg.integrator).map_err(|e| CliError::sim("simulate", e))?;
    let pops = population_series(&traj, &basis, &derived).map_err(|e| CliError::sim("observables", e))?;
    let mut header = vec!["t".to_string(), "norm".to_string()];
    header.extend(cfg.observables.iter().cloned());
    let mut table = Table::new(header);
    for k in 0..traj.len() {
        let mut row: Vec<Cell> = vec![traj.times[k].into(), traj.norms[k].into()];
        for o in &cfg.observables {
            row.push(pops.column(o).expect("validated observable")[k].into());
        }
        table.push(row);
    }
    let g2 = g2_zero(&traj, &basis, cfg.window).map_err(|e| CliError::sim("g2 estimate", e))?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let mut results = BTreeMap::new();
    results.insert("g2".into(), g2.value);
    results.insert("n0_mean".into(), g2.mean_population);
    results.insert("n0_max".into(), max(&pops.n0));
    results.insert("n1_max".into(), max(&pops.n1));
    results.insert("n2_max".into(), max(&pops.n2));
    results.insert("basis_dim".into(), basis.dim() as f64);
    results.insert("accepted_steps".into(), traj.stats.accepted as f64);
    results.insert("rejected_steps".into(), traj.stats.rejected as f64);
    let summary = format!(
        "simulate [{}] dim {}: g2(0) = {:.4e}, <n0> = {:.4e}, max n1 = {:.3e}, max n2 = {:.3e}, {} steps",
        cfg.hamiltonian.name(),
        basis.dim(),
        g2.value,
        g2.mean_population,
        results["n1_max"],
        results["n2_max"],
        traj.stats.accepted
    );
    let files = write_outputs(cfg, "trajectory.csv", &table, derived, results, started)?;
    Ok(RunOutcome { files, summary })
}

fn sweep(cfg: &RunConfig, derived: DerivedParams<f64>, started: Instant) -> Result<RunOutcome, CliError> {
    let grid = cfg.sweep_grid();
    let result = sweep_costheta(&cfg.params, &grid, &settings(cfg)).map_err(|e| CliError::sim("sweep", e))?;
    let mut table = Table::new(["cos_theta", "g2", "n0_mean", "n1_max", "n2_max", "truncation", "window"]);
    for p in &result.points {
        table.push(vec![
            p.x.into(),
            p.g2.into(),
            p.n0_mean.into(),
            p.n1_max.into(),
            p.n2_max.into(),
            p.n_tot_max.into(),
            p.window.into(),
        ]);
    }
    let increasing = result.g2_strictly_increasing();
    let mut results = BTreeMap::new();
    results.insert("points".into(), grid.len() as f64);
    results.insert("g2_strictly_increasing".into(), if increasing { 1.0 } else { 0.0 });
    let summary = format!(
        "sweep [{}] {} points, g2(0) from {:.3e} to {:.3e}, strictly increasing: {increasing}",
        cfg.hamiltonian.name(),
        grid.len(),
        result.points.first().map_or(f64::NAN, |p| p.g2),
        result.points.last().map_or(f64::NAN, |p| p.g2),
    );
    let files = write_outputs(cfg, "sweep.csv", &table, derived, results, started)?;
    Ok(RunOutcome { files, summary })
}

fn spectrum(cfg: &RunConfig, derived: DerivedParams<f64>, started: Instant) -> Result<RunOutcome, CliError> {
    let grid = cfg.spectrum_grid(derived.e1);
    let basis = Basis::build(cfg.truncation);
    let result =
        transmission_spectrum(&derived, &basis, &grid, &cfg.spectrum).map_err(|e| CliError::sim("spectrum", e))?;
    let mut table = Table::new(["delta", "photon_number"]);
    for p in &result.points {
        table.push(vec![p.x.into(), p.photon_mean.into()]);
    }
    let xs = result.xs();
    let ys = result.photon();
    let peaks = find_peaks(&xs, &ys, 1e-3);
    let mut results = BTreeMap::new();
    let mut lines = Vec::new();
    for (k, pk) in peaks.iter().enumerate() {
        results.insert(format!("peak_{k}_delta"), pk.position);
        results.insert(format!("peak_{k}_height"), pk.height);
        let width = full_width_half_max(&xs, &ys, pk.index);
        if let Some(w) = width {
            results.insert(format!("peak_{k}_fwhm"), w);
        }
        lines.push(format!("  Δ = {:.4}  height {:.4e}  fwhm {}", pk.position, pk.height, width.map_or("n/a".into(), |w| format!("{w:.4}"))));
    }
    let t_min = result.points.iter().map(|p| p.t_end).fold(f64::INFINITY, f64::min);
    let t_max = result.points.iter().map(|p| p.t_end).fold(0.0, f64::max);
    results.insert("run_time_min".into(), t_min);
    results.insert("run_time_max".into(), t_max);
    let summary = format!("spectrum {} points, {} peaks:\n{}", grid.len(), peaks.len(), lines.join("\n"));
    let files = write_outputs(cfg, "spectrum.csv", &table, derived, results, started)?;
    Ok(RunOutcome { files, summary })
}

fn feasibility(cfg: &RunConfig, derived: DerivedParams<f64>, started: Instant) -> Result<RunOutcome, CliError> {
    let report =
        feasibility_report(&cfg.params, cfg.units, cfg.threshold).map_err(|e| CliError::sim("feasibility", e))?;
    let mut table = Table::new(["quantity", "value", "unit", "status"]);
    for (name, value, unit, status) in report.csv_rows() {
        table.push(vec![name.into(), value.into(), unit.into(), status.into()]);
    }
    let mut results = BTreeMap::new();
    for c in &report.checks {
        results.insert(c.name.to_string(), c.value);
    }
    let files = write_outputs(cfg, "feasibility.csv", &table, derived, results, started)?;
    Ok(RunOutcome { files, summary: report.to_string() })
}

/// Parses `args`, runs, prints the summary and returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = cli.resolve().map_err(CliError::from).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(out) => {
            // A closed stdout (e.g. piped into `head`) must not turn success into a panic.
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.summary);
            for f in &out.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_keys() {
        let cli = Cli::try_parse_from(["polariton-sim", "sweep", "--cos-theta", "0.2", "--grid", "0.1,0.2", "--n-tot-max", "3"])
            .unwrap();
        let cfg = cli.resolve().unwrap();
        assert_eq!(cfg.mode, RunMode::Sweep);
        assert_eq!(cfg.params.cos_theta, 0.2);
        assert_eq!(cfg.grid, vec![0.1, 0.2]);
        assert_eq!(cfg.truncation.n_tot_max, 3);
    }

    #[test]
    fn negative_grid_values_parse() {
        let cli = Cli::try_parse_from(["polariton-sim", "spectrum", "--grid", "-1:1:3", "--delta", "-0.5"]).unwrap();
        let cfg = cli.resolve().unwrap();
        assert_eq!(cfg.grid, vec![-1.0, 0.0, 1.0]);
        assert_eq!(cfg.params.delta, -0.5);
    }

    #[test]
    fn conflicting_modes_are_config_errors() {
        let cli = Cli::try_parse_from(["polariton-sim", "sweep", "--mode", "simulate"]).unwrap();
        assert!(cli.resolve().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(ConfigError::Value { key: "x", reason: String::new() }).exit_code(), 2);
        assert_eq!(CliError::sim("t", SimError::NonFinite { t: 1.0 }).exit_code(), 3);
        assert_eq!(
            CliError::sim("t", SimError::InvalidParameter { name: "g", value: -1.0, reason: "" }).exit_code(),
            2
        );
        assert_eq!(main_with_args(["polariton-sim", "--cos-theta", "2"]), 2);
        assert_eq!(main_with_args(["polariton-sim", "--no-such-flag"]), 2);
    }

    #[test]
    fn meta_path_pairs_with_output() {
        assert_eq!(meta_path(Path::new("out/sweep.csv")), PathBuf::from("out/sweep.meta.toml"));
    }
}
