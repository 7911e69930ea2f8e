mod commands;
mod config;
mod methods;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lnsum_core::{Axis, Engine};

use config::{config, read_model, CliResult, GridSpec};
use methods::{Method, MethodParams};
use output::Table;

/// Distribution of sums of independent lognormal variables.
#[derive(Debug, Parser)]
#[command(name = "lnsum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy, Default)]
struct GridArgs {
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
    /// Logarithmic spacing.
    #[arg(long, conflicts_with = "grid_linear")]
    grid_log: bool,
    /// Linear spacing.
    #[arg(long)]
    grid_linear: bool,
}

impl GridArgs {
    fn given(&self) -> bool {
        self.grid_min.is_some() || self.grid_max.is_some() || self.grid_count.is_some()
    }

    fn resolve(&self, default: GridSpec) -> GridSpec {
        let min = self.grid_min.unwrap_or(default.min);
        let log = if self.grid_log {
            true
        } else if self.grid_linear {
            false
        } else {
            default.log && min > 0.0
        };
        GridSpec { min, max: self.grid_max.unwrap_or(default.max), count: self.grid_count.unwrap_or(default.count), log }
    }
}

#[derive(Debug, Args, Clone, Copy, Default)]
struct ParamArgs {
    /// Order for Laplace-domain methods (Stehfest, Padé, Zakian).
    #[arg(long = "N")]
    n: Option<usize>,
    /// Term count (arctan fit, series terms, Post-Widder order, Davies terms).
    #[arg(long = "K")]
    k: Option<usize>,
    /// Damping abscissa of the Fourier series.
    #[arg(long = "c")]
    c: Option<f64>,
    /// Half period of the Fourier series.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Frequency spacing of the Davies sum.
    #[arg(long = "d")]
    d: Option<f64>,
    /// Segment count of the piecewise inversion.
    #[arg(long)]
    segments: Option<usize>,
}

impl From<ParamArgs> for MethodParams {
    fn from(p: ParamArgs) -> Self {
        MethodParams { n: p.n, k: p.k, c: p.c, l: p.l, d: p.d, segments: p.segments }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the MGF or characteristic function.
    Transform {
        #[arg(long)]
        model: PathBuf,
        /// One engine, or a comma-separated list to compare engines.
        #[arg(long, alias = "method", default_value = "reduced_range")]
        engine: String,
        /// `s` (real axis) or `omega` (imaginary axis).
        #[arg(long, default_value = "s")]
        axis: String,
        /// Quadrature order for the Gauss-Hermite engines.
        #[arg(long = "N")]
        n: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Recover CDF and PDF with one inversion method.
    Invert {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "davies")]
        method: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Error table for several inversion methods.
    Compare {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated method names.
        #[arg(long, default_value = "davies,gaver,gauss_quadrature,fourier,arctan")]
        method: String,
        #[arg(long, default_value_t = commands::DEFAULT_MC_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Data behind figures 1 to 6.
    Figures {
        id: u8,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        segments: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Segment plan and fitted arctan terms.
    Segments {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = methods::DEFAULT_SEGMENTS)]
        segments: usize,
        #[arg(long = "K", default_value_t = methods::DEFAULT_ARCTAN_TERMS)]
        k: usize,
    },
    /// Monte Carlo draws of the sum.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

const INVERT_GRID: GridSpec = GridSpec { min: 0.1, max: 10.0, count: 50, log: true };
const TRANSFORM_GRID: GridSpec = GridSpec { min: 0.01, max: 100.0, count: 41, log: true };

fn list<T, F: Fn(&str) -> CliResult<T>>(text: &str, f: F) -> CliResult<Vec<T>> {
    let items: Vec<T> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(f).collect::<CliResult<_>>()?;
    if items.is_empty() {
        return Err(config("empty list"));
    }
    Ok(items)
}

fn run(cli: Cli) -> CliResult<Table> {
    match cli.command {
        Command::Transform { model, engine, axis, n, grid } => {
            let m = read_model(&model)?;
            let axis: Axis = axis.parse()?;
            let engines = list(&engine, |s| Ok(s.parse::<Engine>()?))?;
            let g = grid.resolve(TRANSFORM_GRID).points()?;
            commands::transform(&m, &g, axis, &engines, n.unwrap_or_else(commands::default_order))
        }
        Command::Invert { model, method, params, grid } => {
            let m = read_model(&model)?;
            let g = grid.resolve(INVERT_GRID).points()?;
            commands::invert(&m, &g, method.parse()?, params.into())
        }
        Command::Compare { model, method, samples, seed, params, grid } => {
            let m = read_model(&model)?;
            let methods = list(&method, str::parse::<Method>)?;
            let g = grid.resolve(INVERT_GRID).points()?;
            commands::compare(&m, &g, &methods, params.into(), samples, seed)
        }
        Command::Figures { id, n, k, segments, grid } => {
            let spec = grid.given().then(|| grid.resolve(commands::default_grid(id)));
            let params = MethodParams { k, segments, ..MethodParams::default() };
            commands::figure(id, spec, n.unwrap_or_else(commands::default_order), params)
        }
        Command::Segments { model, segments, k } => commands::segments(&read_model(&model)?, segments, k),
        Command::Mc { model, samples, seed } => commands::mc(&read_model(&model)?, samples, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli).and_then(|t| t.emit(out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lnsum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
