use clap::{Args, Parser, Subcommand, ValueEnum};
use cuvrp::model::generate::{DemandFamily, MetricFamily};
use cuvrp::TourProvider;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cuvrp", version, about = "Cumulative VRP with stochastic demands: policies, ratio curves and oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a policy on an instance and emit its cost breakdown and trace.
    Run(RunArgs),
    /// Emit approximation-ratio curves as CSV.
    Ratio(RatioArgs),
    /// Solve the discretized ratio LPs.
    Lpverify(LpVerifyArgs),
    /// Compare policies with the lower bound and the brute-force optimum.
    Oracle(OracleArgs),
    /// Generate an instance JSON from a seeded family.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Euclidean,
    Line,
    RandomMetric,
}

impl From<Metric> for MetricFamily {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Euclidean => MetricFamily::Euclidean,
            Metric::Line => MetricFamily::Line,
            Metric::RandomMetric => MetricFamily::RandomMetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Demands {
    Uniform,
    Small,
    Large,
    Mixed,
    TwoPoint,
}

impl From<Demands> for DemandFamily {
    fn from(d: Demands) -> Self {
        match d {
            Demands::Uniform => DemandFamily::Uniform,
            Demands::Small => DemandFamily::Small,
            Demands::Large => DemandFamily::Large,
            Demands::Mixed => DemandFamily::Mixed,
            Demands::TwoPoint => DemandFamily::TwoPoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tours {
    Exact,
    DoubleTree,
    TwoOpt,
}

impl From<Tours> for TourProvider {
    fn from(t: Tours) -> Self {
        match t {
            Tours::Exact => TourProvider::Exact,
            Tours::DoubleTree => TourProvider::DoubleTree,
            Tours::TwoOpt => TourProvider::DoubleTreeTwoOpt,
        }
    }
}

/// An instance file, or a generator spec resolved with the seed.
#[derive(Debug, Clone, Args, Serialize)]
pub struct InstanceArgs {
    /// Instance JSON (points or matrix, demands, a, b, optional Q).
    #[arg(long, conflicts_with = "n")]
    pub instance: Option<PathBuf>,
    /// Number of customers of a generated instance.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub metric: Metric,
    #[arg(long, value_enum, default_value = "mixed")]
    pub demands: Demands,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolicyArgs {
    /// alg1, alg1-lambda0, alg2, alg-s, alg3, alg4, approx1, approx2, approx4,
    /// approx4-tight, approx-s, dispatch, dispatch-cuvrp, optimal-partition,
    /// record-then-<policy>.
    #[arg(long, default_value = "dispatch")]
    pub policy: String,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Tour guarantee assumed by the schedules.
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub tours: Tours,
    /// Go straight to the next customer after a Case 3.1 round trip.
    #[arg(long)]
    pub shortcut_case31: bool,
    /// Cu-VRP dispatch threshold between APPROX.4 and ALG.3.
    #[arg(long, default_value_t = 0.285)]
    pub gamma0: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// CSV of per-trial costs; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON lines of every trial's trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureArg {
    Fig2,
    Fig3,
    Fig6,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RatioArgs {
    #[arg(long, value_enum, default_value = "fig3")]
    pub figure: FigureArg,
    /// Explicit comma-separated gamma values; overrides the range.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub gamma_step: f64,
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulationArg {
    Rays,
    Full,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LpVerifyArgs {
    #[arg(long, default_value_t = 1.444)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Discretization size; must be a multiple of 3.
    #[arg(long = "n", default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "rays")]
    pub formulation: FormulationArg,
    /// Write both programs as text next to this path (suffixed by case).
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
    /// Sweep grid; with --sigmas emits a CSV instead of a single report.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// JSON report (single point) or CSV (sweep); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_delimiter = ',', default_value = "dispatch,approx1,approx2,approx-s,dispatch-cuvrp")]
    pub policies: Vec<String>,
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
