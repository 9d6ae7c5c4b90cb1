//! Batch command-line front end.
//!
//! Every command resolves to an [`ExperimentConfig`], either from flags or from
//! a JSON file given with `--config` (flags override file values). Results go
//! to `<output_dir>/<label>.csv` and `<label>.json`, where the label defaults
//! to `<command>-<unix seconds>`. Exit codes: 0 success, 1 invalid input,
//! 2 numerical failure.

use std::ffi::OsString;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{lyapunov_max, MapSystem, Point};
use crate::entropy::{self, bound_report, ks_estimate, EntropyOptions, FitWindow, KsMethod};
use crate::error::{Error, Result};
use crate::measure::{shard_rng, uniform_point};
use crate::phase_space::{CellSet, Partition};
use crate::quantum::{self, DensityOperator, Observable};
use crate::transfer::{self, UlamOperator, UlamSampling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Entropy,
    Bound,
    Correlation,
    InvariantDensity,
    Factorization,
    Lyapunov,
    QuantumMixing,
    WignerCheck,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    IncrementAverage,
    SlopeFit,
}

impl From<MethodArg> for KsMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::IncrementAverage => KsMethod::IncrementAverage,
            MethodArg::SlopeFit => KsMethod::SlopeFit,
        }
    }
}

/// Grid written as `<cells_q>x<cells_p>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub cells_q: usize,
    pub cells_p: usize,
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("grid `{s}` should look like 32x32"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        Ok(Grid { cells_q: a.trim().parse().map_err(|_| bad())?, cells_p: b.trim().parse().map_err(|_| bad())? })
    }
}

impl TryFrom<String> for Grid {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        format!("{}x{}", g.cells_q, g.cells_p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub map: String,
    pub grid: Grid,
    pub depth: usize,
    pub stride: usize,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub label: Option<String>,
    pub method: MethodArg,
    pub window: Option<[usize; 2]>,
    pub miller_madow: bool,
    pub t_max: usize,
    pub t_gap: usize,
    pub sets: usize,
    pub samples_per_cell: usize,
    pub lattice: Option<usize>,
    pub tolerance: f64,
    pub max_iters: usize,
    pub steps: usize,
    pub dim: usize,
    pub ensemble: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: Command::Entropy,
            map: "cat".into(),
            grid: Grid { cells_q: 32, cells_p: 32 },
            depth: 8,
            stride: 1,
            samples: 1_000_000,
            seed: 0,
            output_dir: PathBuf::from("."),
            label: None,
            method: MethodArg::IncrementAverage,
            window: None,
            miller_madow: false,
            t_max: 50,
            t_gap: 10,
            sets: 3,
            samples_per_cell: 1000,
            lattice: None,
            tolerance: 1e-10,
            max_iters: 10_000,
            steps: 100_000,
            dim: 31,
            ensemble: 20,
        }
    }
}

impl ExperimentConfig {
    pub fn map_system(&self) -> Result<MapSystem> {
        self.map.parse()
    }

    pub fn partition(&self) -> Result<Partition> {
        Partition::unit(self.grid.cells_q, self.grid.cells_p)
    }

    /// Checks every field the command reads, with messages naming the flag.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::InvalidArgument(format!("--{name} must be positive")))
            } else {
                Ok(())
            }
        };
        self.map_system()?;
        self.partition()?;
        positive("depth", self.depth)?;
        positive("stride", self.stride)?;
        positive("samples", self.samples)?;
        positive("t-max", self.t_max)?;
        positive("max-iters", self.max_iters)?;
        positive("steps", self.steps)?;
        positive("ensemble", self.ensemble)?;
        if self.sets < 2 {
            return Err(Error::InvalidArgument("--sets must be at least 2".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("--tolerance must be positive".into()));
        }
        if let Some([lo, hi]) = self.window {
            if hi < lo + 2 || hi > self.depth {
                return Err(Error::InvalidArgument(format!("--window {lo},{hi} must span 3 depths within 0..={}", self.depth)));
            }
        }
        if matches!(self.command, Command::QuantumMixing | Command::WignerCheck) {
            if self.dim % 2 == 0 || self.dim < 3 {
                return Err(Error::InvalidArgument(format!("--dim must be odd and at least 3, got {}", self.dim)));
            }
        }
        if let Some(label) = &self.label {
            if label.is_empty() || label.contains(['/', '\\']) {
                return Err(Error::InvalidArgument("--label must be a nonempty file stem".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "grainy", version, about = "Coarse-grained entropy, mixing and Wigner experiments on torus maps")]
pub struct Cli {
    /// Experiment to run; may be omitted when the config file names one.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// baker | cat | standard:K=<k> | rotation:alpha=<a> | doubling
    #[arg(long)]
    pub map: Option<String>,
    /// Partition as <cells_q>x<cells_p>, e.g. 32x32.
    #[arg(long)]
    pub grid: Option<Grid>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Output file stem instead of <command>-<timestamp>.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Fit window as lo,hi.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<[usize; 2]>,
    #[arg(long)]
    pub miller_madow: bool,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub t_gap: Option<usize>,
    /// Number of sets in the factorization product.
    #[arg(long)]
    pub sets: Option<usize>,
    #[arg(long)]
    pub samples_per_cell: Option<usize>,
    /// Use a per_axis × per_axis sub-lattice per cell instead of random samples.
    #[arg(long)]
    pub lattice: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Tangent-map steps for `lyapunov`.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Hilbert-space dimension for quantum commands.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<usize>,
}

fn parse_window(s: &str) -> std::result::Result<[usize; 2], String> {
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("window `{s}` should look like 1,5"))?;
    Ok([parse(lo)?, parse(hi)?])
}

impl Cli {
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                serde_json::from_str::<ExperimentConfig>(&text)?
            }
            None => ExperimentConfig::default(),
        };
        match (self.command, &self.config) {
            (Some(c), _) => cfg.command = c,
            (None, Some(_)) => {}
            (None, None) => return Err(Error::InvalidArgument("no command given; see --help".into())),
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(map, grid, depth, stride, samples, seed, output_dir, method, t_max, t_gap, sets, samples_per_cell, tolerance, max_iters, steps, dim, ensemble);
        if self.label.is_some() {
            cfg.label = self.label;
        }
        if self.lattice.is_some() {
            cfg.lattice = self.lattice;
        }
        if self.window.is_some() {
            cfg.window = self.window;
        }
        cfg.miller_madow |= self.miller_madow;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Writes files through a guard that deletes them unless the run succeeds.
struct Outputs {
    dir: PathBuf,
    stem: String,
    written: Vec<PathBuf>,
    keep: bool,
}

impl Outputs {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(&cfg.output_dir)?;
        let stem = match &cfg.label {
            Some(l) => l.clone(),
            None => {
                let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                format!("{}-{secs}", cfg.command)
            }
        };
        Ok(Outputs { dir: cfg.output_dir.clone(), stem, written: Vec::new(), keep: false })
    }

    fn write(&mut self, suffix: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(format!("{}{suffix}", self.stem));
        self.written.push(path.clone());
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn json(&mut self, cfg: &ExperimentConfig, result: Value) -> Result<()> {
        let doc = json!({ "config": cfg, "result": result });
        self.write(".json", |w| {
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)?;
            Ok(())
        })
    }

    fn finish(mut self) -> Vec<PathBuf> {
        self.keep = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

fn window(cfg: &ExperimentConfig) -> FitWindow {
    match cfg.window {
        Some([lo, hi]) => FitWindow::Range(lo, hi),
        None => FitWindow::Auto,
    }
}

/// Run one experiment and write its artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut out = Outputs::new(cfg)?;
    let summary = match cfg.command {
        Command::Entropy | Command::Bound => run_entropy(cfg, &mut out)?,
        Command::Correlation => run_correlation(cfg, &mut out)?,
        Command::InvariantDensity => run_invariant_density(cfg, &mut out)?,
        Command::Factorization => run_factorization(cfg, &mut out)?,
        Command::Lyapunov => run_lyapunov(cfg, &mut out)?,
        Command::QuantumMixing => run_quantum_mixing(cfg, &mut out)?,
        Command::WignerCheck => run_wigner_check(cfg, &mut out)?,
    };
    Ok(RunOutcome { summary, files: out.finish() })
}

fn run_entropy(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let map = cfg.map_system()?;
    let partition = cfg.partition()?;
    let opts = EntropyOptions { miller_madow: cfg.miller_madow, ..Default::default() };
    let series = entropy::entropy_series_with(&map, &partition, cfg.depth, cfg.stride, cfg.samples, cfg.seed, &opts)?;
    let estimate = ks_estimate(&series, cfg.method.into(), window(cfg))?;
    let report = bound_report(&estimate, &partition);
    out.write(".csv", |w| series.write_csv(w))?;
    if cfg.command == Command::Entropy {
        out.write(".dat", |w| series.write_plot(w))?;
    }
    out.json(cfg, json!({ "series": series, "estimate": estimate, "bound": report }))?;
    let mut line = report.summary();
    if let Some(warning) = &estimate.warning {
        line.push_str(&format!(" warning=\"{warning}\""));
    }
    Ok(line)
}

fn run_correlation(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let map = cfg.map_system()?;
    let partition = cfg.partition()?;
    let a = CellSet::left_half(&partition);
    let b = CellSet::bottom_half(&partition);
    let series = transfer::correlation_series(&map, &partition, &a, &b, cfg.t_max, cfg.samples, cfg.seed)?;
    out.write(".csv", |w| series.write_csv(w))?;
    let tail_from = 10.min(cfg.t_max);
    let tail = series.max_abs_from(tail_from);
    out.json(cfg, json!({ "set_a": "left half", "set_b": "bottom half", "series": series, "max_abs_tail": tail, "tail_from": tail_from }))?;
    Ok(format!("C(0)={:.4} max|C(t>={tail_from})|={tail:.4}", series.values[0]))
}

fn run_invariant_density(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let map = cfg.map_system()?;
    let partition = cfg.partition()?;
    let sampling = match cfg.lattice {
        Some(per_axis) => UlamSampling::Lattice { per_axis },
        None => UlamSampling::Random { samples_per_cell: cfg.samples_per_cell, seed: cfg.seed },
    };
    let op = UlamOperator::build(&map, &partition, sampling)?;
    let density = transfer::fixed_density(&op, cfg.tolerance, cfg.max_iters)?;
    let residual = op.residual(&density);
    let uniformity = density.uniformity_error();
    let lambda2 = transfer::second_eigenvalue_modulus(&op, &density, 200, cfg.seed);
    out.write(".csv", |w| op.write_csv(w))?;
    out.json(cfg, json!({ "sampling": sampling, "density": density, "residual": residual, "uniformity_l1": uniformity, "second_eigenvalue_modulus": lambda2 }))?;
    Ok(format!("uniformity_L1={uniformity:.3e} residual={residual:.3e} lambda2={lambda2:.4}"))
}

/// Alternating bottom and left halves, `k` of them.
pub fn factorization_sets(partition: &Partition, k: usize) -> Vec<CellSet> {
    (0..k).map(|i| if i % 2 == 0 { CellSet::bottom_half(partition) } else { CellSet::left_half(partition) }).collect()
}

fn run_factorization(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let map = cfg.map_system()?;
    let partition = cfg.partition()?;
    let sets = factorization_sets(&partition, cfg.sets);
    let residuals = (0..=cfg.t_gap)
        .map(|t| transfer::factorization_residual(&map, &partition, &sets, t, cfg.samples, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    out.write(".csv", |w| {
        writeln!(w, "t_gap,residual")?;
        for (t, r) in residuals.iter().enumerate() {
            writeln!(w, "{t},{r}")?;
        }
        Ok(())
    })?;
    out.json(cfg, json!({ "sets": "bottom/left halves alternating", "residuals": residuals }))?;
    Ok(format!("residual(t_gap={})={:.4}", cfg.t_gap, residuals[cfg.t_gap]))
}

fn run_lyapunov(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let map = cfg.map_system()?;
    let mut rng = shard_rng(cfg.seed, 0);
    let start = uniform_point(&crate::phase_space::Region::unit_square(), &mut rng);
    let start = if map.dimension() == 1 { Point::new(start.q, 0.0) } else { start };
    let lambda = lyapunov_max(&map, start, cfg.steps, cfg.seed)?;
    out.write(".csv", |w| {
        writeln!(w, "map,q0,p0,steps,lambda")?;
        writeln!(w, "{map},{},{},{},{lambda}", start.q, start.p, cfg.steps)?;
        Ok(())
    })?;
    out.json(cfg, json!({ "start": [start.q, start.p], "lambda_max": lambda }))?;
    Ok(format!("lambda_max={lambda:.4}"))
}

fn run_quantum_mixing(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let sys = quantum::quantized_cat(cfg.dim)?;
    let mut rng = shard_rng(cfg.seed, 0);
    let rho0 = DensityOperator::random_pure(cfg.dim, &mut rng);
    let obs = Observable::position_window(cfg.dim, 0, cfg.dim / 2);
    let sweep = quantum::correlation_sweep(&sys, &rho0, &obs, cfg.t_max)?;
    let star = quantum::stationary_state(&sys, &rho0)?;
    let stationarity = quantum::check_stationarity(&sys, &star);
    out.write(".csv", |w| sweep.write_csv(w))?;
    out.json(cfg, json!({ "observable": format!("position window [0, {})", cfg.dim / 2), "sweep": sweep, "stationarity_residual": stationarity }))?;
    Ok(format!("C(0)={:.4} mean|C|={:.4} fluctuation={:.4} stationarity={stationarity:.2e}", sweep.values[0], sweep.mean_abs, sweep.fluctuation))
}

#[derive(Debug, Clone, Serialize)]
struct WignerRow {
    member: usize,
    stationarity: f64,
    invariance_dephased: f64,
    invariance_generic: f64,
    transport: f64,
    pairing: f64,
}

fn run_wigner_check(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<String> {
    let sys = quantum::quantized_cat(cfg.dim)?;
    let cat = MapSystem::cat();
    let rows = (0..cfg.ensemble)
        .map(|m| -> Result<WignerRow> {
            let mut rng = shard_rng(cfg.seed, m);
            let rho0 = DensityOperator::random_pure(cfg.dim, &mut rng);
            let obs = Observable::random_hermitian(cfg.dim, &mut rng);
            let star = quantum::stationary_state(&sys, &rho0)?;
            Ok(WignerRow {
                member: m,
                stationarity: quantum::check_stationarity(&sys, &star),
                invariance_dephased: quantum::classical_invariance_residual(&star, &cat)?,
                invariance_generic: quantum::classical_invariance_residual(&rho0, &cat)?,
                transport: quantum::wigner_transport_residual(&sys, &rho0, &cat)?,
                pairing: (quantum::expectation_wigner(&rho0, &obs)? - rho0.expectation(&obs)).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |f: fn(&WignerRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let stat = max(|r| r.stationarity);
    let inv = max(|r| r.invariance_dephased);
    let transport = max(|r| r.transport);
    let pairing = max(|r| r.pairing);
    let generic = rows.iter().map(|r| r.invariance_generic).fold(f64::INFINITY, f64::min);
    let passed = stat < 1e-10 && inv < 1e-10 && transport < 1e-10 && pairing < 1e-10 && generic > 1e-3;

    let mut rng = shard_rng(cfg.seed, 0);
    let first = quantum::stationary_state(&sys, &DensityOperator::random_pure(cfg.dim, &mut rng))?;
    let grid = quantum::discrete_wigner(&first)?;
    out.write(".csv", |w| {
        writeln!(w, "member,stationarity,invariance_dephased,invariance_generic,transport,pairing")?;
        for r in &rows {
            writeln!(w, "{},{},{},{},{},{}", r.member, r.stationarity, r.invariance_dephased, r.invariance_generic, r.transport, r.pairing)?;
        }
        Ok(())
    })?;
    out.write("-wigner.csv", |w| grid.write_csv(w))?;
    out.json(
        cfg,
        json!({ "dim": cfg.dim, "seed": cfg.seed, "rows": rows, "max_stationarity": stat, "max_invariance_dephased": inv,
                "min_invariance_generic": generic, "max_transport": transport, "max_pairing": pairing, "all_checks_pass": passed }),
    )?;
    Ok(format!(
        "stationarity={stat:.2e} invariance={inv:.2e} generic_min={generic:.2e} transport={transport:.2e} pairing={pairing:.2e} pass={passed}"
    ))
}

/// Parse arguments, run, print the summary and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = cli.resolve().and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

/// Load a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}
