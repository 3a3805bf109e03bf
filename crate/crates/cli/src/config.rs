//! Command-line flags and the resolved configuration echoed into reports.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpsqueeze::domains::GeometryConfig;
use dpsqueeze::levi::LEVI_TOL;
use dpsqueeze::point::{self, Point};
use dpsqueeze::schema::{DomainSpec, MapSpec};
use serde::Serialize;

use crate::report::CliError;

#[derive(Debug, Parser)]
#[command(name = "dpsqueeze", version, about = "Squeezing-function bounds, Levi-form checks and holomorphic maps for general complex ellipsoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check Hermitian symmetry, weights, balance and positivity of a polynomial.
    Validate,
    /// Sampled strong-pseudoconvexity check away from the circle {(0', e^{iθ})}.
    WbCheck,
    /// Restricted Levi eigenvalues at boundary points.
    Levi,
    /// Squeezing-function lower bound at one point.
    Bound,
    /// Bounds at many points (given or sampled), in parallel.
    Sweep,
    /// Sample-based verification of the explicit holomorphic maps.
    MapsVerify,
    /// Slice images and the tangential/nontangential dichotomy of a sequence.
    OrbitTrace,
    /// Uniform bounds over the compact slices K_ε.
    HhrScan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::WbCheck => "wb-check",
            Command::Levi => "levi",
            Command::Bound => "bound",
            Command::Sweep => "sweep",
            Command::MapsVerify => "maps-verify",
            Command::OrbitTrace => "orbit-trace",
            Command::HhrScan => "hhr-scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Method {
    #[serde(rename = "lemma21")]
    #[value(name = "lemma21")]
    Lemma21,
    #[serde(rename = "slice-reduced")]
    #[value(name = "slice-reduced")]
    SliceReduced,
    #[serde(rename = "extreme")]
    #[value(name = "extreme")]
    Extreme,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Domain spec (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Sample count [wb-check 10000, levi 16, sweep 32, maps-verify 1000, hhr-scan 16 per level].
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Tolerance [wb-check, levi 1e-8; maps-verify 1e-9].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value = "lemma21")]
    pub method: Method,
    /// Horosphere radius r of the extreme-point construction.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub r: f64,
    /// Cone radius r'.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub rp: f64,
    /// Cone aperture c.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub c: f64,
    /// Dilation parameter for maps-verify [2].
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Point as comma-separated interleaved re,im values; repeatable.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// JSON file with an array of interleaved points.
    #[arg(long, global = true)]
    pub points: Option<PathBuf>,
    /// Comma-separated ε values for hhr-scan.
    #[arg(long, global = true, default_value = "1,0.5,0.2,0.1,0.05")]
    pub eps_grid: String,
    /// wb-check exclusion radius, measured by σ_Λ(z').
    #[arg(long, global = true, default_value_t = 0.1)]
    pub exclusion: f64,
    /// Map descriptor (JSON) for maps-verify; all maps when absent.
    #[arg(long, global = true)]
    pub map: Option<PathBuf>,
}

/// Everything a run depends on, with defaults filled in.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub spec_path: Option<PathBuf>,
    pub domain: Option<DomainSpec>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub jobs: usize,
    pub method: Method,
    pub r: f64,
    pub rp: f64,
    pub c: f64,
    pub lambda: f64,
    #[serde(serialize_with = "interleaved_points")]
    pub points: Vec<Point>,
    pub eps_grid: Vec<f64>,
    pub exclusion: f64,
    pub map: Option<MapSpec>,
    pub geometry: GeometryConfig,
}

fn interleaved_points<S: serde::Serializer>(pts: &[Point], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(pts.iter().map(|p| point::to_interleaved(p)))
}

impl RunConfig {
    /// Defaults that need no file access; the spec, points and map are
    /// loaded by [`RunConfig::load`].
    pub fn from_opts(command: Command, o: &Opts) -> Self {
        let samples = o.samples.unwrap_or(match command {
            Command::WbCheck => 10_000,
            Command::MapsVerify => 1_000,
            Command::Sweep => 32,
            _ => 16,
        });
        let tol = o.tol.unwrap_or(match command {
            Command::MapsVerify => 1e-9,
            _ => LEVI_TOL,
        });
        Self {
            command,
            spec_path: o.spec.clone(),
            domain: None,
            out: o.out.clone(),
            format: o.format,
            seed: o.seed,
            samples,
            tol,
            jobs: o.jobs.max(1),
            method: o.method,
            r: o.r,
            rp: o.rp,
            c: o.c,
            lambda: o.lambda.unwrap_or(2.0),
            points: Vec::new(),
            eps_grid: Vec::new(),
            exclusion: o.exclusion,
            map: None,
            geometry: GeometryConfig { seed: o.seed, ..GeometryConfig::default() },
        }
    }

    pub fn load(&mut self, o: &Opts) -> Result<(), CliError> {
        self.eps_grid = parse_list(&o.eps_grid, "--eps-grid")?;
        for p in &o.point {
            self.points.push(point::parse_point(p).map_err(|e| CliError::invalid(format!("--point {p}: {e}")))?);
        }
        if let Some(path) = &o.points {
            let raw: Vec<Vec<f64>> = read_json(path)?;
            for v in raw {
                self.points.push(point::from_interleaved(&v).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?);
            }
        }
        if let Some(path) = &o.map {
            self.map = Some(read_json(path)?);
        }
        if let Some(path) = &o.spec {
            self.domain = Some(read_json(path)?);
        }
        Ok(())
    }
}

fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::invalid(format!("{flag} value {t:?}: {e}"))))
        .collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path, &e))
}
