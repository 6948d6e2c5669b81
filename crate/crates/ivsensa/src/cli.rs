//! Argument parsing and command dispatch.
//!
//! Exit codes: 0 on success, 1 for usage and data errors, 2 when the requested
//! identified set is empty or the data refute the instrument.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ivsensa_core::bisection::{Breakdown, DEFAULT_TOL};
use ivsensa_core::continuous::{
    breakdown_point_continuous, cdf_bounds, default_a_grid, falsification_point_continuous, functional_bounds,
    qte_bounds, refutation_check, FunctionalSpec, SieveConfig,
};
use ivsensa_core::discrete::{self, arm_is_feasible, DiscreteTarget};
use ivsensa_core::distributions::{
    discretize_outcome, estimate_cond_density, estimate_discrete, rescale_outcome, CondDensityTable,
    JointDiscreteDist, DEFAULT_MIN_STRATUM,
};
use ivsensa_core::sensitivity::ModelKind;
use ivsensa_core::{validate_theta_grid, CurvePoint, IdentifiedInterval, SensitivityCurve};

use crate::error::CliError;
use crate::format::{emit_curve, render_table, OutputFormat, Precision};
use crate::grid::parse_grid;
use crate::io::{dataset_to_csv, read_dataset, write_atomic};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "IV_SENSA_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ivsensa", version, about = "Sensitivity analysis for instrumental-variable bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds on a target at one sensitivity level (--theta).
    Bounds(Options),
    /// Bounds over a grid of sensitivity levels (--theta-grid).
    Curve(Options),
    /// Smallest sensitivity level at which the data stop refuting the model.
    FalsificationPoint(Options),
    /// Smallest sensitivity level at which --value enters the bounds.
    Breakdown(Options),
    /// Pointwise bounds on the CDF of Y(--arm) at one sensitivity level.
    CdfBand(Options),
    /// Bounds on the --tau quantile treatment effect.
    Qte(Options),
    /// Checks whether the data refute instrument independence.
    Refute(Options),
    /// Writes the data with y replaced by 1(y <= --quantile empirical quantile).
    Discretize(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// E[Y(1)] - E[Y(0)].
    Ate,
    /// E[Y(1) - Y(0) | X = 1]; binary outcomes only.
    Att,
    /// P(Y(arm) = 1); binary outcomes only.
    Prob,
    /// P(Y(arm) = y).
    Pmf,
    /// E[Y(arm)].
    Mean,
    /// P(Y(arm) <= at).
    Cdf,
    /// Q_{Y(1)}(tau) - Q_{Y(0)}(tau).
    Qte,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    /// Linear programs over the observed outcome support.
    Discrete,
    /// Bernstein-sieve programs over estimated densities.
    Continuous,
}

#[derive(Debug, Clone, Args)]
struct Options {
    /// CSV with columns y, x, z and optionally w.
    #[arg(long)]
    input: PathBuf,
    /// msm, cdep or ks.
    #[arg(long, default_value = "msm", value_parser = parse_model)]
    model: ModelKind,
    /// Sensitivity level in [0, 1]; 0 is the exact instrument model.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Inclusive grid start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    theta_grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Target::Ate)]
    target: Target,
    /// Treatment label for per-arm targets.
    #[arg(long)]
    arm: Option<String>,
    /// Outcome value for --target pmf.
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Outcome value at which --target cdf evaluates the CDF.
    #[arg(long, allow_negative_numbers = true)]
    at: Option<f64>,
    /// Value whose breakdown point is searched for.
    #[arg(long, allow_negative_numbers = true)]
    value: Option<f64>,
    /// Quantile level for QTE bounds.
    #[arg(long)]
    tau: Option<f64>,
    /// Discretize the outcome at this empirical quantile first.
    #[arg(long)]
    quantile: Option<f64>,
    /// Defaults to continuous for cdf, qte and refute, discrete otherwise.
    #[arg(long, value_enum)]
    pipeline: Option<Pipeline>,
    /// Bernstein degree M.
    #[arg(long, default_value_t = 30)]
    degree: usize,
    /// Number N of interior constraint points.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Number L of quadrature nodes.
    #[arg(long, default_value_t = 512)]
    quad: usize,
    /// Also impose the sensitivity constraints at both ends of the support.
    #[arg(long)]
    include_endpoints: bool,
    /// Minimum observations per (x, z) cell for density estimation.
    #[arg(long, default_value_t = DEFAULT_MIN_STRATUM)]
    min_stratum: usize,
    /// Outcome values start:stop:step for CDF bands and QTE inversion.
    #[arg(long, allow_hyphen_values = true)]
    a_grid: Option<String>,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Shortest round-trip numbers instead of six significant digits.
    #[arg(long)]
    exact: bool,
    /// Bisection tolerance on theta.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: ivsensa_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Bounds,
    Curve,
    FalsificationPoint,
    Breakdown,
    CdfBand,
    Qte,
    Refute,
    Discretize,
}

/// A parsed and cross-checked invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub action: Action,
    pub input: PathBuf,
    pub model: ModelKind,
    pub theta: Option<f64>,
    pub theta_grid: Option<Vec<f64>>,
    pub target: Target,
    pub arm: Option<String>,
    pub y: Option<f64>,
    pub at: Option<f64>,
    pub value: Option<f64>,
    pub tau: Option<f64>,
    pub quantile: Option<f64>,
    pub pipeline: Pipeline,
    pub sieve: SieveConfig,
    pub min_stratum: usize,
    /// In outcome units.
    pub a_grid: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub precision: Precision,
    pub tol: f64,
    pub verbosity: u8,
}

/// The text a run produced and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub code: i32,
}

impl Report {
    fn new(text: String, infeasible: bool) -> Self {
        Self {
            text,
            code: if infeasible { EXIT_INFEASIBLE } else { EXIT_OK },
        }
    }
}

impl RunConfig {
    /// Parses arguments (the first one is the program name). Help and version
    /// requests come back as [`CliError::Usage`] too; [`main`] treats them apart.
    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::usage(first_line(&e.to_string())))?;
        Self::from_cli(cli)
    }

    fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (action, o) = match cli.command {
            Command::Bounds(o) => (Action::Bounds, o),
            Command::Curve(o) => (Action::Curve, o),
            Command::FalsificationPoint(o) => (Action::FalsificationPoint, o),
            Command::Breakdown(o) => (Action::Breakdown, o),
            Command::CdfBand(o) => (Action::CdfBand, o),
            Command::Qte(o) => (Action::Qte, o),
            Command::Refute(o) => (Action::Refute, o),
            Command::Discretize(o) => (Action::Discretize, o),
        };
        let target = match action {
            Action::Qte => Target::Qte,
            Action::CdfBand => Target::Cdf,
            _ => o.target,
        };
        let pipeline = o.pipeline.unwrap_or(match (action, target) {
            (Action::Refute, _) | (_, Target::Cdf | Target::Qte) => Pipeline::Continuous,
            _ => Pipeline::Discrete,
        });
        let grid = |spec: &Option<String>, what: &str| {
            spec.as_deref()
                .map(|s| parse_grid(s).map_err(|e| CliError::usage(format!("--{what}: {e}"))))
                .transpose()
        };
        let cfg = RunConfig {
            action,
            theta_grid: grid(&o.theta_grid, "theta-grid")?,
            a_grid: grid(&o.a_grid, "a-grid")?,
            input: o.input,
            model: o.model,
            theta: o.theta,
            target,
            arm: o.arm,
            y: o.y,
            at: o.at,
            value: o.value,
            tau: o.tau,
            quantile: o.quantile,
            pipeline,
            sieve: SieveConfig {
                degree: o.degree,
                grid: o.grid,
                quad: o.quad,
                include_endpoints: o.include_endpoints,
            },
            min_stratum: o.min_stratum,
            output: o.output,
            format: o.format,
            precision: if o.exact { Precision::Exact } else { Precision::Rounded },
            tol: o.tol,
            verbosity: o.verbose,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects flag combinations that do not make sense together.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: &str| Err(CliError::usage(m));
        let continuous = self.pipeline == Pipeline::Continuous;
        match self.action {
            Action::Bounds | Action::CdfBand if self.theta.is_none() => return usage("--theta is required"),
            Action::Curve if self.theta_grid.is_none() => return usage("--theta-grid is required"),
            Action::Qte if self.theta.is_some() == self.theta_grid.is_some() => {
                return usage("qte takes exactly one of --theta and --theta-grid")
            }
            Action::Breakdown if self.value.is_none() => return usage("--value is required"),
            Action::Discretize if self.quantile.is_none() => return usage("--quantile is required"),
            _ => {}
        }
        if matches!(self.action, Action::Bounds | Action::CdfBand) && self.theta_grid.is_some() {
            return usage("--theta-grid belongs to the curve command; use --theta here");
        }
        if self.action == Action::Curve && self.theta.is_some() {
            return usage("curve takes --theta-grid, not --theta");
        }
        if let Some(t) = self.theta {
            if !(0.0..=1.0).contains(&t) {
                return usage("--theta must lie in [0, 1]");
            }
        }
        if let Some(g) = &self.theta_grid {
            validate_theta_grid(g).map_err(|e| CliError::usage(format!("--theta-grid: {e}")))?;
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return usage("--tol must lie in (0, 1)");
        }
        match (self.target, continuous) {
            (Target::Cdf | Target::Qte, false) => {
                return usage("cdf and qte targets need the continuous pipeline")
            }
            (Target::Att | Target::Prob | Target::Pmf | Target::Mean, true) => {
                return usage("att, prob, pmf and mean targets need the discrete pipeline")
            }
            _ => {}
        }
        if continuous && self.quantile.is_some() && self.action != Action::Discretize {
            return usage("--quantile discretizes the outcome and needs the discrete pipeline");
        }
        if self.action == Action::Breakdown && self.target == Target::Qte {
            return usage("breakdown search is not available for qte");
        }
        if matches!(self.target, Target::Mean | Target::Prob | Target::Pmf | Target::Cdf) && self.arm.is_none() {
            return usage("this target needs --arm");
        }
        if self.target == Target::Pmf && self.y.is_none() {
            return usage("--target pmf needs --y");
        }
        if self.target == Target::Cdf && self.action != Action::CdfBand && self.at.is_none() {
            return usage("--target cdf needs --at");
        }
        if self.target == Target::Qte && self.tau.is_none() {
            return usage("--tau is required for qte");
        }
        if continuous {
            self.sieve.validate().map_err(|e| CliError::usage(e.to_string()))?;
        }
        Ok(())
    }
}

fn first_line(s: &str) -> String {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments").trim().to_string()
}

fn arm_index(support: &[String], label: Option<&str>) -> Result<usize, CliError> {
    let label = label.ok_or_else(|| CliError::usage("this target needs --arm"))?;
    support
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| CliError::usage(format!("--arm {label} is not a treatment value ({})", support.join(", "))))
}

/// Plug-in discrete distribution, after optional discretization.
pub fn load_discrete(cfg: &RunConfig) -> Result<JointDiscreteDist, CliError> {
    let mut data = read_dataset(&cfg.input)?;
    if let Some(q) = cfg.quantile {
        data = discretize_outcome(&data, q)?;
    }
    Ok(estimate_discrete(&data, &data.y_support(), &data.x_support(), &data.z_support())?)
}

/// Density table on the rescaled outcome.
pub fn load_density(cfg: &RunConfig) -> Result<CondDensityTable, CliError> {
    let data = read_dataset(&cfg.input)?;
    let (scaled, affine) = rescale_outcome(&data)?;
    Ok(estimate_cond_density(&scaled, affine, cfg.sieve.degree, cfg.min_stratum)?)
}

pub fn discrete_target(cfg: &RunConfig, dist: &JointDiscreteDist) -> Result<DiscreteTarget, CliError> {
    let arm = || arm_index(dist.x_support(), cfg.arm.as_deref());
    Ok(match cfg.target {
        Target::Ate => DiscreteTarget::Ate,
        Target::Att if dist.s_y() != 2 => {
            return Err(CliError::usage("att needs a binary outcome; discretize with --quantile"))
        }
        Target::Att => DiscreteTarget::Att,
        Target::Mean => DiscreteTarget::Mean(arm()?),
        Target::Prob => DiscreteTarget::Prob(arm()?),
        Target::Pmf => {
            let y = cfg.y.expect("validated");
            let idx = dist.y_support().iter().position(|v| (v - y).abs() <= 1e-12).ok_or_else(|| {
                CliError::usage(format!("--y {y} is not an observed outcome value"))
            })?;
            DiscreteTarget::Pmf { arm: arm()?, y: idx }
        }
        Target::Cdf | Target::Qte => unreachable!("rejected by validate"),
    })
}

/// What the continuous pipeline bounds.
#[derive(Debug, Clone)]
pub enum ContinuousTarget {
    Functional(FunctionalSpec),
    Qte { tau: f64, a_grid: Vec<f64> },
}

pub fn continuous_target(cfg: &RunConfig, table: &CondDensityTable) -> Result<ContinuousTarget, CliError> {
    Ok(match cfg.target {
        Target::Ate => ContinuousTarget::Functional(FunctionalSpec::Ate),
        Target::Cdf => ContinuousTarget::Functional(FunctionalSpec::CdfAt {
            arm: arm_index(table.x_support(), cfg.arm.as_deref())?,
            a: table.affine().forward(cfg.at.expect("validated")).clamp(0.0, 1.0),
        }),
        Target::Qte => ContinuousTarget::Qte {
            tau: cfg.tau.expect("validated"),
            a_grid: unit_a_grid(cfg, table)?,
        },
        _ => unreachable!("rejected by validate"),
    })
}

/// `--a-grid` mapped onto the unit interval, or the default grid.
pub fn unit_a_grid(cfg: &RunConfig, table: &CondDensityTable) -> Result<Vec<f64>, CliError> {
    let Some(grid) = &cfg.a_grid else {
        return Ok(default_a_grid());
    };
    let map = table.affine();
    let unit: Vec<f64> = grid.iter().map(|a| map.forward(*a)).collect();
    if unit.iter().any(|u| !(-1e-12..=1.0 + 1e-12).contains(u)) {
        return Err(CliError::usage(format!(
            "--a-grid must lie within the outcome range [{}, {}]",
            map.inverse(0.0),
            map.inverse(1.0)
        )));
    }
    Ok(unit.into_iter().map(|u| u.clamp(0.0, 1.0)).collect())
}

fn discrete_interval(dist: &JointDiscreteDist, kind: ModelKind, theta: f64, t: DiscreteTarget) -> Result<IdentifiedInterval, CliError> {
    Ok(discrete::target_bounds(dist, kind.at(theta)?, t)?)
}

fn continuous_interval(
    table: &CondDensityTable,
    cfg: &RunConfig,
    theta: f64,
    target: &ContinuousTarget,
) -> Result<IdentifiedInterval, CliError> {
    let model = cfg.model.at(theta)?;
    Ok(match target {
        ContinuousTarget::Functional(spec) => functional_bounds(table, model, &cfg.sieve, spec)?,
        ContinuousTarget::Qte { tau, a_grid } => {
            let q = qte_bounds(table, model, &cfg.sieve, *tau, a_grid)?;
            if q.clamped {
                log::info!("theta {theta}: a quantile bound reached the end of the outcome support");
            }
            q.interval
        }
    })
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV}={v} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::usage(format!("cannot start worker threads: {e}")))
}

/// Bounds at every grid point, evaluated in parallel; each point is computed
/// exactly as a single-point call would compute it.
fn curve<F>(grid: &[f64], eval: F) -> Result<SensitivityCurve, CliError>
where
    F: Fn(f64) -> Result<IdentifiedInterval, CliError> + Sync,
{
    let points = thread_pool()?.install(|| {
        grid.par_iter()
            .map(|&theta| Ok(CurvePoint { theta, interval: eval(theta)? }))
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    Ok(SensitivityCurve::new(points)?)
}

fn scalar(name: &str, x: f64, precision: Precision) -> String {
    let v = match precision {
        Precision::Rounded => crate::format::format_number(x),
        Precision::Exact => format!("{x:?}"),
    };
    format!("{name}={v}\n")
}

/// Runs a parsed configuration and returns what to emit, without writing it.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.precision;
    let single = |theta: f64, interval: IdentifiedInterval| {
        Report::new(render_table("theta", &[(theta, interval)], cfg.format, p), !interval.is_feasible())
    };
    let whole_curve = |c: SensitivityCurve| {
        let none = c.points().iter().all(|pt| !pt.interval.is_feasible());
        if none {
            log::warn!("every point of the curve is infeasible");
        }
        Report::new(emit_curve(&c, cfg.format, p), none)
    };
    match (cfg.action, cfg.pipeline) {
        (Action::Discretize, _) => {
            let data = read_dataset(&cfg.input)?;
            let d = discretize_outcome(&data, cfg.quantile.expect("validated"))?;
            Ok(Report::new(dataset_to_csv(&d), false))
        }

        (Action::Bounds | Action::Curve | Action::Qte, Pipeline::Discrete) => {
            let dist = load_discrete(cfg)?;
            let t = discrete_target(cfg, &dist)?;
            match (cfg.theta, &cfg.theta_grid) {
                (Some(theta), _) => Ok(single(theta, discrete_interval(&dist, cfg.model, theta, t)?)),
                (None, Some(grid)) => Ok(whole_curve(curve(grid, |theta| discrete_interval(&dist, cfg.model, theta, t))?)),
                (None, None) => Err(CliError::usage("--theta or --theta-grid is required")),
            }
        }
        (Action::Bounds | Action::Curve | Action::Qte, Pipeline::Continuous) => {
            let table = load_density(cfg)?;
            let t = continuous_target(cfg, &table)?;
            match (cfg.theta, &cfg.theta_grid) {
                (Some(theta), _) => Ok(single(theta, continuous_interval(&table, cfg, theta, &t)?)),
                (None, Some(grid)) => Ok(whole_curve(curve(grid, |theta| continuous_interval(&table, cfg, theta, &t))?)),
                (None, None) => Err(CliError::usage("--theta or --theta-grid is required")),
            }
        }

        (Action::FalsificationPoint, Pipeline::Discrete) => {
            let dist = load_discrete(cfg)?;
            let t = discrete::falsification_point(&dist, cfg.model, cfg.tol)?;
            Ok(Report::new(scalar("falsification_point", t, p), false))
        }
        (Action::FalsificationPoint, Pipeline::Continuous) => {
            let table = load_density(cfg)?;
            let t = falsification_point_continuous(&table, cfg.model, &cfg.sieve, cfg.tol)?;
            Ok(Report::new(scalar("falsification_point", t, p), false))
        }

        (Action::Breakdown, pipeline) => {
            let value = cfg.value.expect("validated");
            let b = match pipeline {
                Pipeline::Discrete => {
                    let dist = load_discrete(cfg)?;
                    let t = discrete_target(cfg, &dist)?;
                    discrete::breakdown_point(&dist, cfg.model, t, value, cfg.tol)?
                }
                Pipeline::Continuous => {
                    let table = load_density(cfg)?;
                    let ContinuousTarget::Functional(spec) = continuous_target(cfg, &table)? else {
                        return Err(CliError::usage("breakdown search is not available for qte"));
                    };
                    breakdown_point_continuous(&table, cfg.model, &cfg.sieve, &spec, value, cfg.tol)?
                }
            };
            Ok(Report::new(
                match b {
                    Breakdown::At(t) => scalar("breakdown_point", t, p),
                    Breakdown::Never => "breakdown_point=never\n".to_string(),
                },
                false,
            ))
        }

        (Action::CdfBand, Pipeline::Discrete) => Err(CliError::usage("cdf-band needs the continuous pipeline")),
        (Action::CdfBand, Pipeline::Continuous) => {
            let table = load_density(cfg)?;
            let arm = arm_index(table.x_support(), cfg.arm.as_deref())?;
            let unit = unit_a_grid(cfg, &table)?;
            let theta = cfg.theta.expect("validated");
            let band = cdf_bounds(&table, cfg.model.at(theta)?, &cfg.sieve, arm, &unit)?;
            let map = table.affine();
            let rows: Vec<_> = unit.iter().map(|u| map.inverse(*u)).zip(band.intervals()).collect();
            Ok(Report::new(render_table("a", &rows, cfg.format, p), !band.is_feasible()))
        }

        (Action::Refute, Pipeline::Discrete) => {
            let dist = load_discrete(cfg)?;
            let model = cfg.model.at(0.0)?;
            let mut refuted = false;
            for arm in 0..dist.s_x() {
                refuted |= !arm_is_feasible(&dist, model, arm)?;
            }
            Ok(Report::new(format!("refuted={refuted}\n"), refuted))
        }
        (Action::Refute, Pipeline::Continuous) => {
            let table = load_density(cfg)?;
            let r = refutation_check(&table, cfg.sieve.quad)?;
            let mut text = format!("refuted={}\n", r.refuted);
            for (label, v) in table.x_support().iter().zip(&r.integrals) {
                text.push_str(&scalar(&format!("integral[{label}]"), *v, p));
            }
            Ok(Report::new(text, r.refuted))
        }
    }
}

/// Executes `cfg` and writes its output to `--output` or `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let report = execute(cfg)?;
    match &cfg.output {
        Some(path) => write_atomic(path, &report.text)?,
        None => stdout.write_all(report.text.as_bytes()).map_err(|source| CliError::Write {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    Ok(report.code)
}

/// Full command-line entry point: parses `args`, runs, and reports errors as a
/// single line on `stderr`. Returns the process exit code.
pub fn main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", first_line(&e.to_string()).trim_start_matches("error: "));
            return EXIT_ERROR;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        crate::logger::init(cfg.verbosity);
        run(&cfg, stdout)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", first_line(&e.to_string()));
            EXIT_ERROR
        }
    }
}
