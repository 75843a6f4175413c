//! Command-line front end. Each subcommand reads an optional JSON config,
//! applies flag overrides, validates everything, computes all outputs in
//! memory, and only then writes them (each file atomically).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{
    boundary_grid, logspace_grid, pacman_domain, pacman_target, Problem, ProblemDomain, DEFAULT_MIN_DIST,
};
use crate::experiments::{
    interval_entry, interval_fit, interval_lawson, pacman_domain_run, IntervalGrid, IntervalMethod, PlanarMethod,
};
use crate::fit::{convergence_sweep, error_curve, write_error_curve_csv, ConvergenceReport, FitError};
use crate::laplace::{self, BoundarySampling, LaplaceError, LaplaceMethod};
use crate::poles::{elliptic_k, fejer_walsh_poles, jacobi_sn, PhiDiagnostics, PoleConfig, PoleError};

/// Output directory used when neither `--out` nor the environment sets one.
pub const DEFAULT_OUT_DIR: &str = "out";
/// Environment variable naming the output directory.
pub const OUT_ENV: &str = "LOGLIGHTNING_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {source}")]
    Config { path: PathBuf, source: serde_json::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid {what} {value:?}: {reason}")]
    Parse { what: &'static str, value: String, reason: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

fn parse_err(what: &'static str, value: &str, reason: impl Into<String>) -> CliError {
    CliError::Parse {
        what,
        value: value.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "loglightning", version, about = "Reciprocal-log approximation and log-lightning Laplace solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a function with a branch point at 0 on a log-spaced interval grid.
    Fit1d(Fit1dArgs),
    /// Fit a function on the pac-man domain with log-lightning or lightning terms.
    Fit2d(Fit2dArgs),
    /// Solve a Dirichlet problem for the Laplace equation.
    Laplace(LaplaceArgs),
    /// Potential-theory and elliptic-function diagnostics.
    Diagnostics(DiagnosticsArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fit1dArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `sqrt`, `pow:<a>` for z^a, or `const:<c>`.
    #[arg(long)]
    pub target: Option<String>,
    /// `hankel`, `confluent`, `fejer_walsh`, or `lightning`.
    #[arg(long)]
    pub poles: Option<String>,
    /// Singularity count, or a sweep `start:end` / `start:step:end`.
    #[arg(long)]
    pub n: Option<String>,
    /// Training grid `lo_exp:hi_exp:M`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Pin power J ≥ 2 (confluent only).
    #[arg(long)]
    pub pin: Option<u32>,
    #[arg(long)]
    pub arnoldi: Option<bool>,
    /// Lawson reweighting steps.
    #[arg(long)]
    pub lawson: Option<usize>,
    /// Confluent location (default n/2).
    #[arg(long)]
    pub s0: Option<f64>,
    /// Hankel prefactor (default n/4).
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Fit2dArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `pacman` or `const:<c>`.
    #[arg(long)]
    pub target: Option<String>,
    /// `log_lightning`, `lightning`, or `both`.
    #[arg(long)]
    pub method: Option<String>,
    /// Total degrees of freedom, or a sweep.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub per_edge: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `lshape` or `square-z3`.
    #[arg(long)]
    pub problem: Option<String>,
    /// `log_lightning`, `lightning`, or `both`.
    #[arg(long)]
    pub method: Option<String>,
    /// Singularities per corner (also the polynomial degree), or a sweep.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub per_edge: Option<usize>,
    #[arg(long)]
    pub pole_scale: Option<f64>,
    /// Field lattice size per axis.
    #[arg(long)]
    pub lattice: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DiagnosticsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// `n` given either as a number or as a range string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CountSpec {
    One(usize),
    Range(String),
}

impl CountSpec {
    pub fn values(&self) -> Result<Vec<usize>, CliError> {
        match self {
            CountSpec::One(n) => Ok(vec![*n]),
            CountSpec::Range(s) => parse_range(s),
        }
    }
}

/// `n`, `start:end`, or `start:step:end` (inclusive).
pub fn parse_range(s: &str) -> Result<Vec<usize>, CliError> {
    let parts: Result<Vec<usize>, _> = s.split(':').map(|p| p.trim().parse::<usize>()).collect();
    let parts = parts.map_err(|e| parse_err("range", s, e.to_string()))?;
    let (start, step, end) = match parts[..] {
        [n] => (n, 1, n),
        [a, b] => (a, 1, b),
        [a, st, b] => (a, st, b),
        _ => return Err(parse_err("range", s, "expected n, a:b, or a:step:b")),
    };
    if step == 0 || start > end {
        return Err(parse_err("range", s, "need step > 0 and start ≤ end"));
    }
    Ok((start..=end).step_by(step).collect())
}

/// `lo_exp:hi_exp:M`.
pub fn parse_grid(s: &str) -> Result<IntervalGrid, CliError> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(parse_err("grid", s, "expected lo_exp:hi_exp:M"));
    }
    let f = |x: &str| x.trim().parse::<f64>().map_err(|e| parse_err("grid", s, e.to_string()));
    let lo = f(p[0])?;
    let hi = f(p[1])?;
    let m = p[2].trim().parse::<usize>().map_err(|e| parse_err("grid", s, e.to_string()))?;
    let g = IntervalGrid {
        lo_exp: lo,
        hi_exp: hi,
        m,
    };
    logspace_grid(lo, hi, m).map_err(|e| parse_err("grid", s, e.to_string()))?;
    Ok(g)
}

/// Named interval target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target1d {
    Sqrt,
    Pow(f64),
    Const(f64),
}

impl Target1d {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let num = |x: &str| x.parse::<f64>().map_err(|e| parse_err("target", s, e.to_string()));
        match s.split_once(':') {
            None if s == "sqrt" => Ok(Target1d::Sqrt),
            Some(("pow", a)) => Ok(Target1d::Pow(num(a)?)),
            Some(("const", c)) => Ok(Target1d::Const(num(c)?)),
            _ => Err(parse_err("target", s, "expected sqrt, pow:<a>, or const:<c>")),
        }
    }

    pub fn eval(self, z: Complex64) -> Complex64 {
        match self {
            Target1d::Sqrt => z.sqrt(),
            Target1d::Pow(a) => z.powf(a),
            Target1d::Const(c) => Complex64::new(c, 0.0),
        }
    }
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fit1dConfig {
    pub target: String,
    pub poles: String,
    pub n: CountSpec,
    pub grid: String,
    pub pin: Option<u32>,
    pub arnoldi: bool,
    pub lawson_steps: usize,
    pub s0: Option<f64>,
    pub scale: Option<f64>,
    pub sigma: f64,
    pub mu: f64,
    pub rho: f64,
}

impl Default for Fit1dConfig {
    fn default() -> Self {
        Self {
            target: "sqrt".into(),
            poles: "hankel".into(),
            n: CountSpec::One(10),
            grid: "-24:0:1000".into(),
            pin: None,
            arnoldi: true,
            lawson_steps: 0,
            s0: None,
            scale: None,
            sigma: 0.5,
            mu: 2.0,
            rho: 1.0,
        }
    }
}

impl Fit1dConfig {
    fn method(&self, n: usize) -> Result<IntervalMethod, CliError> {
        let poles = match self.poles.as_str() {
            "hankel" => PoleConfig::HankelParabola {
                n,
                scale: self.scale.unwrap_or(n as f64 / 4.0),
            },
            "confluent" => {
                let s0 = self.s0.unwrap_or(n as f64 / 2.0);
                match self.pin {
                    Some(pin_power) => PoleConfig::Pinned { n, s0, pin_power },
                    None => PoleConfig::Confluent { n, s0 },
                }
            }
            "fejer_walsh" => PoleConfig::FejerWalsh {
                n,
                sigma: self.sigma,
                mu: self.mu,
                rho: self.rho,
            },
            "lightning" => return Ok(IntervalMethod::Lightning { n }),
            other => {
                return Err(parse_err(
                    "poles",
                    other,
                    "expected hankel, confluent, fejer_walsh, or lightning",
                ))
            }
        };
        if self.pin.is_some() && self.poles != "confluent" {
            return Err(parse_err("pin", &self.poles, "--pin applies to confluent poles only"));
        }
        poles.validate()?;
        if let PoleConfig::FejerWalsh { n, sigma, mu, rho } = poles {
            fejer_walsh_poles(n, sigma, mu, rho)?;
        }
        Ok(IntervalMethod::Log { poles })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fit2dConfig {
    pub target: String,
    pub method: String,
    pub n: CountSpec,
    pub per_edge: usize,
}

impl Default for Fit2dConfig {
    fn default() -> Self {
        Self {
            target: "pacman".into(),
            method: "both".into(),
            n: CountSpec::One(100),
            per_edge: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaplaceConfig {
    pub problem: String,
    pub method: String,
    pub n: CountSpec,
    pub per_edge: usize,
    pub pole_scale: f64,
    pub lattice: usize,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        Self {
            problem: "lshape".into(),
            method: "both".into(),
            n: CountSpec::Range("2:2:20".into()),
            per_edge: laplace::DEFAULT_PER_EDGE,
            pole_scale: laplace::DEFAULT_POLE_SCALE,
            lattice: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub n: usize,
    pub sigma: f64,
    pub mu: f64,
    pub rho: f64,
    /// Largest `n` in the φ identity table.
    pub max_n: usize,
    /// Random off-slit points per (n, σ).
    pub samples: usize,
    pub seed: u64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            n: 8,
            sigma: 0.5,
            mu: 2.0,
            rho: 1.0,
            max_n: 15,
            samples: 100,
            seed: 1,
        }
    }
}

/// Files to write, as (name, contents).
#[derive(Debug, Default)]
pub struct Outputs(pub Vec<(String, Vec<u8>)>);

impl Outputs {
    fn push(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.0.push((name.into(), bytes));
    }

    fn csv(&mut self, name: impl Into<String>, f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<(), CliError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::Serialize(e.to_string()))?;
        self.push(name, buf);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: impl Into<String>, v: &T) -> Result<(), CliError> {
        let s = serde_json::to_vec_pretty(v).map_err(|e| CliError::Serialize(e.to_string()))?;
        self.push(name, s);
        Ok(())
    }

    /// Writes every file via a temporary file renamed into place.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let werr = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Write { path, source }
        };
        std::fs::create_dir_all(dir).map_err(werr(dir))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.0 {
            let path = dir.join(name);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(werr(&path))?;
            std::io::Write::write_all(&mut tmp, bytes).map_err(werr(&path))?;
            tmp.persist(&path).map_err(|e| CliError::Write {
                path: path.clone(),
                source: e.error,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}

fn out_dir(common: &CommonArgs) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn methods<M: Copy>(s: &str, log: M, light: M) -> Result<Vec<(M, &'static str)>, CliError> {
    match s {
        "log_lightning" => Ok(vec![(log, "log_lightning")]),
        "lightning" => Ok(vec![(light, "lightning")]),
        "both" => Ok(vec![(log, "log_lightning"), (light, "lightning")]),
        other => Err(parse_err("method", other, "expected log_lightning, lightning, or both")),
    }
}

fn suffixed(base: &str, ext: &str, method: &str, many: bool) -> String {
    if many {
        format!("{base}_{method}.{ext}")
    } else {
        format!("{base}.{ext}")
    }
}

fn report_csv(outputs: &mut Outputs, name: String, report: &ConvergenceReport) -> Result<(), CliError> {
    outputs.csv(name, |b| report.write_csv(b))
}

pub fn run_fit1d(args: &Fit1dArgs) -> Result<Outputs, CliError> {
    let mut cfg: Fit1dConfig = read_config(args.common.config.as_deref())?;
    if let Some(v) = &args.target {
        cfg.target = v.clone();
    }
    if let Some(v) = &args.poles {
        cfg.poles = v.clone();
    }
    if let Some(v) = &args.n {
        cfg.n = CountSpec::Range(v.clone());
    }
    if let Some(v) = &args.grid {
        cfg.grid = v.clone();
    }
    if args.pin.is_some() {
        cfg.pin = args.pin;
    }
    if let Some(v) = args.arnoldi {
        cfg.arnoldi = v;
    }
    if let Some(v) = args.lawson {
        cfg.lawson_steps = v;
    }
    if args.s0.is_some() {
        cfg.s0 = args.s0;
    }
    if args.scale.is_some() {
        cfg.scale = args.scale;
    }

    let target = Target1d::parse(&cfg.target)?;
    let grid = parse_grid(&cfg.grid)?;
    let ns = cfg.n.values()?;
    let methods = ns.iter().map(|&n| cfg.method(n)).collect::<Result<Vec<_>, _>>()?;
    let f = move |z| target.eval(z);

    let run = |m: &IntervalMethod| {
        if cfg.lawson_steps > 0 {
            interval_lawson(f, m, &grid, cfg.lawson_steps).map(|(r, _)| r)
        } else {
            interval_fit(f, m, &grid, cfg.arnoldi)
        }
    };
    let report = convergence_sweep(&ns, |n| {
        let i = ns.iter().position(|&k| k == n).expect("n comes from the list");
        run(&methods[i]).map(|r| interval_entry(&r))
    })?;
    let last = run(methods.last().expect("ranges are nonempty"))?;
    let curve = error_curve(&last.fit.approx, f, &grid.validation()?).map_err(FitError::from)?;
    let training = logspace_grid(grid.lo_exp, grid.hi_exp, grid.m).map_err(FitError::from)?;

    let mut out = Outputs::default();
    report_csv(&mut out, "report.csv".into(), &report)?;
    out.json("approximant.json", &last.fit.approx)?;
    out.csv("error_curve.csv", |b| write_error_curve_csv(&curve, b))?;
    out.csv("grid.csv", |b| training.write_csv(b))?;
    Ok(out)
}

pub fn run_fit2d(args: &Fit2dArgs) -> Result<Outputs, CliError> {
    let mut cfg: Fit2dConfig = read_config(args.common.config.as_deref())?;
    if let Some(v) = &args.target {
        cfg.target = v.clone();
    }
    if let Some(v) = &args.method {
        cfg.method = v.clone();
    }
    if let Some(v) = &args.n {
        cfg.n = CountSpec::Range(v.clone());
    }
    if let Some(v) = args.per_edge {
        cfg.per_edge = v;
    }
    let target = match cfg.target.split_once(':') {
        None if cfg.target == "pacman" => None,
        Some(("const", c)) => Some(
            c.parse::<f64>()
                .map_err(|e| parse_err("target", &cfg.target, e.to_string()))?,
        ),
        _ => return Err(parse_err("target", &cfg.target, "expected pacman or const:<c>")),
    };
    let f = move |z: Complex64| match target {
        None => pacman_target(z),
        Some(c) => Complex64::new(c, 0.0),
    };
    let ns = cfg.n.values()?;
    if ns[0] < 4 {
        return Err(parse_err("n", &format!("{ns:?}"), "need at least 4 degrees of freedom"));
    }
    let ms = methods(&cfg.method, PlanarMethod::LogLightning, PlanarMethod::Lightning)?;
    let grid = boundary_grid(&pacman_domain(), cfg.per_edge, DEFAULT_MIN_DIST).map_err(FitError::from)?;

    let mut out = Outputs::default();
    let many = ms.len() > 1;
    for (m, name) in ms {
        let report = convergence_sweep(&ns, |n| pacman_domain_run(f, n, m, cfg.per_edge).map(|r| r.1))?;
        let (last, _) = pacman_domain_run(f, *ns.last().expect("nonempty"), m, cfg.per_edge)?;
        let vgrid = crate::domains::validation_boundary_grid(&pacman_domain(), cfg.per_edge, DEFAULT_MIN_DIST)
            .map_err(FitError::from)?;
        let curve = error_curve(&last.approx, f, &vgrid.points).map_err(FitError::from)?;
        report_csv(&mut out, suffixed("report", "csv", name, many), &report)?;
        out.json(suffixed("approximant", "json", name, many), &last.approx)?;
        out.csv(suffixed("error_curve", "csv", name, many), |b| write_error_curve_csv(&curve, b))?;
    }
    out.csv("grid.csv", |b| grid.write_csv(b))?;
    Ok(out)
}

pub fn run_laplace(args: &LaplaceArgs) -> Result<Outputs, CliError> {
    let mut cfg: LaplaceConfig = read_config(args.common.config.as_deref())?;
    if let Some(v) = &args.problem {
        cfg.problem = v.clone();
    }
    if let Some(v) = &args.method {
        cfg.method = v.clone();
    }
    if let Some(v) = &args.n {
        cfg.n = CountSpec::Range(v.clone());
    }
    if let Some(v) = args.per_edge {
        cfg.per_edge = v;
    }
    if let Some(v) = args.pole_scale {
        cfg.pole_scale = v;
    }
    if let Some(v) = args.lattice {
        cfg.lattice = v;
    }
    let problem = Problem::by_name(&cfg.problem)
        .filter(|p| p.dirichlet)
        .ok_or_else(|| parse_err("problem", &cfg.problem, "expected lshape or square-z3"))?;
    let ProblemDomain::Planar(domain) = problem.domain.clone() else {
        unreachable!("Dirichlet problems are planar")
    };
    if !(cfg.pole_scale > 0.0 && cfg.pole_scale.is_finite()) {
        return Err(parse_err("pole_scale", &cfg.pole_scale.to_string(), "must be positive"));
    }
    let ns = cfg.n.values()?;
    let ms = methods(&cfg.method, LaplaceMethod::LogLightning, LaplaceMethod::Lightning)?;
    let sampling = BoundarySampling {
        per_edge: cfg.per_edge,
        min_dist: DEFAULT_MIN_DIST,
    };
    let data = move |z: Complex64| (problem.target)(z).re;
    let grid = boundary_grid(&domain, cfg.per_edge, DEFAULT_MIN_DIST).map_err(FitError::from)?;

    let mut out = Outputs::default();
    let many = ms.len() > 1;
    for (m, name) in ms {
        let solve = |n: usize| -> Result<_, LaplaceError> {
            match m {
                LaplaceMethod::LogLightning => {
                    let t = std::time::Instant::now();
                    let sol = laplace::solve_dirichlet(&domain, data, n, n, cfg.pole_scale, sampling)?;
                    let e = crate::fit::SweepEntry {
                        dof: sol.dof,
                        max_err: sol.boundary_err,
                        boundary_err: sol.boundary_err,
                        runtime_ms: t.elapsed().as_secs_f64() * 1e3,
                    };
                    Ok((sol, e))
                }
                LaplaceMethod::Lightning => laplace::sweep_entry(&domain, data, n, m, sampling),
            }
        };
        let report = convergence_sweep(&ns, |n| {
            solve(n).map(|r| r.1).map_err(|e| match e {
                LaplaceError::Fit(f) => f,
                other => FitError::Invalid(other.to_string()),
            })
        })?;
        let (sol, _) = solve(*ns.last().expect("nonempty"))?;
        report_csv(&mut out, suffixed("report", "csv", name, many), &report)?;
        out.json(suffixed("solution", "json", name, many), &sol)?;
        let mut buf = Vec::new();
        laplace::write_field_csv(&sol, cfg.lattice, cfg.lattice, &mut buf)
            .map_err(|e| CliError::Serialize(e.to_string()))?;
        out.push(suffixed("field", "csv", name, many), buf);
    }
    out.csv("grid.csv", |b| grid.write_csv(b))?;
    Ok(out)
}

/// One row of the φ identity table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiRow {
    pub n: usize,
    pub sigma: f64,
    pub max_rel_residual: f64,
    pub max_abs_phi_slit: f64,
}

/// Random points off the slit `(−∞, 0]` with `|s| ≤ r_max`.
pub fn random_off_slit(rng: &mut impl Rng, count: usize, r_max: f64) -> Vec<Complex64> {
    (0..count)
        .map(|_| loop {
            let r = r_max * rng.gen::<f64>();
            let th = std::f64::consts::PI * (2.0 * rng.gen::<f64>() - 1.0);
            let s = Complex64::from_polar(r, th);
            if r > 0.0 && !(s.im == 0.0 && s.re <= 0.0) {
                break s;
            }
        })
        .collect()
}

pub fn phi_table(max_n: usize, samples: usize, seed: u64) -> Result<Vec<PhiRow>, PoleError> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for sigma in [0.25, 0.5, 1.0] {
            let d = PhiDiagnostics::new(n, sigma)?;
            let pts = random_off_slit(&mut rng, samples, 10.0 * n as f64 * sigma);
            rows.push(PhiRow {
                n,
                sigma,
                max_rel_residual: d.identity_residual(&pts)?,
                max_abs_phi_slit: d.slit_max(1000),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct EllipticReport {
    k_0: f64,
    k_half: f64,
    sn_k_half: f64,
    sn_zero_half: f64,
}

pub fn run_diagnostics(args: &DiagnosticsArgs) -> Result<Outputs, CliError> {
    let mut cfg: DiagnosticsConfig = read_config(args.common.config.as_deref())?;
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.sigma {
        cfg.sigma = v;
    }
    if let Some(v) = args.mu {
        cfg.mu = v;
    }
    if let Some(v) = args.rho {
        cfg.rho = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    let phi = PhiDiagnostics::new(cfg.n, cfg.sigma)?;
    let fw = fejer_walsh_poles(cfg.n, cfg.sigma, cfg.mu, cfg.rho)?;
    let rows = phi_table(cfg.max_n, cfg.samples, cfg.seed)?;
    let k_half = elliptic_k(0.5)?;
    let ell = EllipticReport {
        k_0: elliptic_k(0.0)?,
        k_half,
        sn_k_half: jacobi_sn(Complex64::new(k_half, 0.0), 0.5)?.re,
        sn_zero_half: jacobi_sn(Complex64::new(0.0, 0.0), 0.5)?.re,
    };

    let mut out = Outputs::default();
    out.csv("phi_identity.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    })?;
    out.csv("interp_distances.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["j", "alpha", "exp_alpha"])?;
        for (j, a) in phi.interp_points.iter().enumerate().rev() {
            w.serialize((j + 1, a, a.exp()))?;
        }
        w.flush()?;
        Ok(())
    })?;
    out.csv("fejer_walsh.csv", |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["k", "re_pole", "im_pole", "re_interp", "im_interp"])?;
        for (k, (p, a)) in fw.poles.iter().zip(&fw.interp).enumerate() {
            w.serialize((k + 1, p.re, p.im, a.re, a.im))?;
        }
        w.flush()?;
        Ok(())
    })?;
    out.json("elliptic.json", &ell)?;
    Ok(out)
}

/// Runs a parsed command and writes its outputs.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let (outputs, common) = match &cli.command {
        Command::Fit1d(a) => (run_fit1d(a)?, &a.common),
        Command::Fit2d(a) => (run_fit2d(a)?, &a.common),
        Command::Laplace(a) => (run_laplace(a)?, &a.common),
        Command::Diagnostics(a) => (run_diagnostics(a)?, &a.common),
    };
    outputs.write_all(&out_dir(common))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("10").unwrap(), [10]);
        assert_eq!(parse_range("2:5").unwrap(), [2, 3, 4, 5]);
        assert_eq!(parse_range("2:2:20").unwrap(), [2, 4, 6, 8, 10, 12, 14, 16, 18, 20]);
        assert_eq!(parse_range("4:4:30").unwrap(), [4, 8, 12, 16, 20, 24, 28]);
        for bad in ["", "a", "3:0:9", "9:1", "1:2:3:4"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_grid("-24:0:1000").unwrap();
        assert_eq!((g.lo_exp, g.hi_exp, g.m), (-24.0, 0.0, 1000));
        for bad in ["-24:0", "0:0:10", "-1:0:1", "x:0:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn targets() {
        assert_eq!(Target1d::parse("sqrt").unwrap(), Target1d::Sqrt);
        assert_eq!(Target1d::parse("pow:0.25").unwrap(), Target1d::Pow(0.25));
        assert_eq!(Target1d::parse("const:7").unwrap(), Target1d::Const(7.0));
        assert!(Target1d::parse("cos").is_err());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let r: Result<Fit1dConfig, _> = serde_json::from_str(r#"{"n": 10, "bogus": 1}"#);
        assert!(r.is_err());
        let r: Fit1dConfig = serde_json::from_str(r#"{"n": "4:4:32", "poles": "confluent"}"#).unwrap();
        assert_eq!(r.n.values().unwrap().len(), 8);
        assert_eq!(r.grid, "-24:0:1000");
    }

    #[test]
    fn pin_validation() {
        let cfg = Fit1dConfig {
            poles: "confluent".into(),
            pin: Some(1),
            ..Default::default()
        };
        assert!(cfg.method(8).is_err());
        let cfg = Fit1dConfig {
            poles: "hankel".into(),
            pin: Some(2),
            ..Default::default()
        };
        assert!(cfg.method(8).is_err());
    }

    #[test]
    fn phi_rows_within_bounds() {
        let rows = phi_table(4, 20, 7).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.max_rel_residual < 1e-9 && r.max_abs_phi_slit <= 1.0 + 1e-12));
    }
}
