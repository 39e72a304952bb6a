//! `ocs`: optimal object colors from the command line.

mod commands;
mod config;
mod output;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ocs_core::atlas::{Axis, Hemisphere};
use ocs_core::lp::SolverConfig;

use crate::config::{CliError, IlluminantSpec, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "ocs", version, about = "Optimal object colors by linear programming")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Color matching function table (CSV: wavelength, x, y, z). Defaults to
    /// the file in $OCS_DATA_DIR, then the bundled CIE 1931 2 degree table.
    #[arg(long, global = true)]
    cmf: Option<PathBuf>,
    /// EE, munsell:<name>, or a CSV path (wavelength, power).
    #[arg(long, global = true, default_value = "EE")]
    illuminant: IlluminantSpec,
    /// Munsell renotation table used by munsell:<name>.
    #[arg(long, global = true)]
    munsell_data: Option<PathBuf>,
    /// Working wavelength step in nm; rows of the CMF table are decimated.
    #[arg(long, global = true, default_value_t = 1.0)]
    step: f64,
    /// Worker threads for raster sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = SolverConfig::default().optimality_tol)]
    optimality_tol: f64,
    #[arg(long, global = true, default_value_t = SolverConfig::default().constraint_tol)]
    constraint_tol: f64,
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl GlobalArgs {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            cmf_path: self.cmf.clone(),
            illuminant_spec: self.illuminant.to_string(),
            munsell_data: self.munsell_data.clone(),
            step_nm: self.step,
            solver: SolverConfig {
                optimality_tol: self.optimality_tol,
                constraint_tol: self.constraint_tol,
                ..SolverConfig::default()
            },
            threads: self.threads,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convex hull of the spectral locus and its non-convex stretches.
    Hull {
        /// Collinearity tolerance in chromaticity units.
        #[arg(long, default_value_t = ocs_core::hull::DEFAULT_COLLINEARITY_EPS)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Farthest object color along one ray from 50% gray.
    Probe(RayArgs),
    /// Best two-transition color along one ray.
    TwoTrans(RayArgs),
    /// LP optimum versus two-transition optimum for one or more directions.
    Compare {
        /// Direction as theta,phi in radians; repeatable.
        #[arg(long = "dir", value_parser = parse_pair)]
        dirs: Vec<(f64, f64)>,
        /// Number of uniformly random directions to add.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one CSV row per direction.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Transition-count map of one hemisphere.
    Map(MapArgs),
    /// Distance gap between LP and two-transition optima over one hemisphere.
    DiffMap {
        #[command(flatten)]
        map: MapArgs,
        /// Smallest log10(delta) drawn in red.
        #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
        delta_floor: f64,
        /// log10(delta) drawn at full brightness.
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        delta_ceil: f64,
    },
    /// Chromaticities of optima with more than two transitions, both hemispheres.
    Regions {
        #[arg(long, default_value_t = 128)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the points as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Boundary of a constant-X, -Y or -Z section through the solid.
    Slice {
        #[arg(long)]
        axis: Axis,
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Smoothest illuminant with a given chromaticity, as CSV.
    MakeIlluminant {
        #[arg(long, requires = "y", conflicts_with = "munsell")]
        x: Option<f64>,
        #[arg(long, requires = "x")]
        y: Option<f64>,
        #[arg(long)]
        label: Option<String>,
        /// Munsell color name, e.g. "5Y 8/16".
        #[arg(long, required_unless_present = "x")]
        munsell: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks the reference results on the loaded data.
    Repro {
        /// Directory for repro.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RayArgs {
    /// Target tristimulus X,Y,Z.
    #[arg(long, value_parser = parse_triple, required_unless_present = "dir", conflicts_with = "dir")]
    target: Option<[f64; 3]>,
    /// Direction theta,phi in radians around the gray point.
    #[arg(long, value_parser = parse_pair)]
    dir: Option<(f64, f64)>,
    /// JSON output; the reflectance is also written as <stem>.rho.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long, default_value = "upper")]
    hemisphere: Hemisphere,
    /// Raster width and height in pixels.
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value = "ocs-out")]
    out_dir: PathBuf,
    /// File stem; defaults to the command and hemisphere.
    #[arg(long)]
    name: Option<String>,
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v = parse_numbers(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_numbers(s, 2)?;
    Ok((v[0], v[1]))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    let cfg = cli.global.run_config();
    let illum = &cli.global.illuminant;
    match cli.command {
        Command::Hull { eps, out } => commands::hull(cfg, illum, eps, out),
        Command::Probe(a) => commands::probe(cfg, illum, a.target, a.dir, a.out),
        Command::TwoTrans(a) => commands::two_trans(cfg, illum, a.target, a.dir, a.out),
        Command::Compare { dirs, random, seed, out, csv } => {
            commands::compare(cfg, illum, dirs, random, seed, out, csv)
        }
        Command::Map(m) => commands::map(cfg, illum, &m.into(), None),
        Command::DiffMap { map, delta_floor, delta_ceil } => {
            commands::map(cfg, illum, &map.into(), Some((delta_floor, delta_ceil)))
        }
        Command::Regions { size, out, csv } => commands::regions(cfg, illum, size, out, csv),
        Command::Slice { axis, level, samples, out, csv } => {
            commands::slice(cfg, illum, axis, level, samples, out, csv)
        }
        Command::MakeIlluminant { x, y, label, munsell, out } => {
            commands::make_illuminant(cfg, x.zip(y), label, munsell, out)
        }
        Command::Repro { out_dir } => repro::run(cfg, illum, out_dir),
    }
}

impl From<MapArgs> for commands::MapJob {
    fn from(m: MapArgs) -> Self {
        Self { hemisphere: m.hemisphere, size: m.size, out_dir: m.out_dir, name: m.name }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
