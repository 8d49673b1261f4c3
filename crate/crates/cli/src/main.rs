use std::f64::consts::LN_2;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gsteer::io::read_cm;
use gsteer::scan::{scan_bounds, scan_regions, write_bounds_csv, write_regions_csv, GridAxis};
use gsteer::twomode::{key_rates, resolved_separability};
use gsteer::verify::run_all;
use gsteer::{
    bona_fide_check, classify_two_mode, entanglement_renyi2, is_ppt, purity_profile,
    sample_gaussian, steering_report, CovarianceMatrix, Direction, Error,
};
use serde_json::{json, Value};

mod config;
mod output;

use config::{FileConfig, Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "gsteer", version, about = "Gaussian EPR steering of bipartite covariance matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Configuration file (TOML); defaults to the file named by GSTEER_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Positivity and eigenvalue tolerance.
    #[arg(long, global = true, value_name = "R", allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Steering report for a covariance-matrix file.
    Report {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Key rates in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Two-mode region classification over a (μ_A, μ_B) grid at fixed η.
    ScanRegions {
        #[arg(long, value_name = "R")]
        eta: Option<f64>,
        /// Grid applied to both purity axes.
        #[arg(long, value_name = "MIN:MAX:STEPS")]
        grid: Option<String>,
    },
    /// Steerability against entanglement along the pure and extremal families.
    ScanBounds {
        /// Grid of the extremal parameter s.
        #[arg(long, value_name = "MIN:MAX:STEPS")]
        grid: Option<String>,
        #[arg(long, value_name = "R")]
        s_max: Option<f64>,
        /// Local variance of the extremal states.
        #[arg(long, value_name = "R")]
        a: Option<f64>,
    },
    /// Run the randomized property suites.
    Verify {
        /// Random cases per suite.
        #[arg(long, value_name = "N")]
        cases: Option<usize>,
        /// Samples per Monte Carlo state.
        #[arg(long, value_name = "N")]
        samples: Option<usize>,
    },
    /// Draw phase-space samples of a state.
    Sample {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_name = "N")]
        samples: Option<usize>,
    },
}

enum Failure {
    Verification(String),
    Unphysical(String),
    Parse(String),
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Unphysical(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Config(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Unphysical(m) | Failure::Parse(m) | Failure::Config(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Structural(_) => Failure::Parse(e.to_string()),
            _ => Failure::Unphysical(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(cfg: &RunConfig, text: &str) -> Outcome {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn load_physical(path: &Path, tol: f64) -> Result<CovarianceMatrix, Failure> {
    let sigma = read_cm(path)?;
    let check = bona_fide_check(&sigma, tol);
    if !check.verdict.accepted() {
        return Err(Failure::Unphysical(format!(
            "bona fide violation: σ + iΩ has eigenvalue {:.6e} below -{:.1e}",
            check.min_eigenvalue, check.tolerance
        )));
    }
    Ok(sigma)
}

fn report_value(sigma: &CovarianceMatrix, cfg: &RunConfig) -> Result<Value, Failure> {
    let check = bona_fide_check(sigma, cfg.tol);
    let report = steering_report(sigma)?;
    let unit = if cfg.bits { "bits" } else { "nats" };
    let rates: Vec<Value> = key_rates(&report)
        .iter()
        .map(|k| {
            json!({
                "reconciliation": k.reconciliation,
                "rate": if cfg.bits { k.nats / LN_2 } else { k.nats },
                "unit": unit,
            })
        })
        .collect();
    let ppt = is_ppt(sigma, cfg.tol);
    // PPT decides separability when either party holds a single mode.
    let separable = (sigma.n_a() == 1 || sigma.n_b() == 1).then_some(ppt);
    let two_mode = sigma.n_a() == 1 && sigma.n_b() == 1;
    let (classification, entanglement) = if two_mode {
        let p = purity_profile(sigma)?;
        let label = classify_two_mode(&p);
        let class = json!({
            "mu_a": p.mu_a,
            "mu_b": p.mu_b,
            "mu": p.mu,
            "eta": p.eta,
            "eta_0": p.eta_0(),
            "eta_s": p.eta_s(),
            "eta_e": p.eta_e(),
            "physicality": label.physicality,
            "separability": label.separability,
            "resolved_separability": resolved_separability(sigma, cfg.tol),
            "steer_a_to_b": label.steer_a_to_b,
            "steer_b_to_a": label.steer_b_to_a,
        });
        (class, serde_json::to_value(entanglement_renyi2(sigma)?).expect("plain data"))
    } else {
        (Value::Null, Value::Null)
    };
    Ok(json!({
        "n_a": sigma.n_a(),
        "n_b": sigma.n_b(),
        "bona_fide": check,
        "steering": report,
        "marginal": {
            "a_to_b": report.marginal(Direction::AToB, cfg.tol),
            "b_to_a": report.marginal(Direction::BToA, cfg.tol),
        },
        "ppt": ppt,
        "separable": separable,
        "classification": classification,
        "key_rates": rates,
        "entanglement": entanglement,
    }))
}

fn cmd_report(input: &Path, cfg: &RunConfig) -> Outcome {
    let sigma = load_physical(input, cfg.tol)?;
    let value = report_value(&sigma, cfg)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => output::to_json(&value),
        Format::Csv => output::flatten_csv(&value),
    };
    emit(cfg, &text)
}

fn config_error(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

const DEFAULT_REGION_GRID: &str = "0.005:1:200";

fn cmd_scan_regions(cfg: &RunConfig) -> Outcome {
    let axis = match cfg.grid {
        Some(g) => g,
        None => GridAxis::parse(DEFAULT_REGION_GRID).expect("valid default grid"),
    };
    let cells = scan_regions(cfg.eta, &axis, &axis).map_err(config_error)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_regions_csv(&cells, &mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Json => {
            let rows: Vec<Value> = cells
                .iter()
                .map(|c| {
                    json!({
                        "mu_a": c.profile.mu_a,
                        "mu_b": c.profile.mu_b,
                        "eta": c.profile.eta,
                        "physicality": c.label.physicality,
                        "separability": c.label.separability,
                        "steer_a_to_b": c.label.steer_a_to_b,
                        "steer_b_to_a": c.label.steer_b_to_a,
                        "g_a_to_b": c.g_a_to_b,
                        "g_b_to_a": c.g_b_to_a,
                        "g_sym": c.g_sym(),
                    })
                })
                .collect();
            output::to_json(&rows)
        }
    };
    emit(cfg, &text)
}

const DEFAULT_S_MAX: f64 = 10.0;
const DEFAULT_S_STEPS: usize = 100;

fn cmd_scan_bounds(cfg: &RunConfig) -> Outcome {
    let s_max = cfg.s_max.or(cfg.grid.map(|g| g.max)).unwrap_or(DEFAULT_S_MAX);
    let axis = match cfg.grid {
        Some(g) => g,
        None => GridAxis::new(1.0, s_max, DEFAULT_S_STEPS).map_err(config_error)?,
    };
    if axis.max > s_max {
        return Err(Failure::Config(format!(
            "s grid reaches {} beyond s_max = {s_max}",
            axis.max
        )));
    }
    if !(cfg.a >= s_max) {
        return Err(Failure::Config(format!("a = {} must be at least s_max = {s_max}", cfg.a)));
    }
    let rows = scan_bounds(&axis, cfg.a).map_err(config_error)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_bounds_csv(&rows, &mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Json => output::to_json(&rows),
    };
    emit(cfg, &text)
}

fn cmd_verify(cfg: &RunConfig) -> Outcome {
    if cfg.format == Some(Format::Csv) {
        return Err(Failure::Config("verify writes JSON only".into()));
    }
    let summary = run_all(&cfg.suite);
    emit(cfg, &output::to_json(&summary))?;
    if summary.passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "verification failed: {}",
            summary.failing().join(", ")
        )))
    }
}

fn cmd_sample(input: &Path, cfg: &RunConfig) -> Outcome {
    let sigma = load_physical(input, cfg.tol)?;
    let batch = sample_gaussian(&sigma, cfg.samples, cfg.seed)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            batch.write_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Json => {
            let rows: Vec<&[f64]> = batch.rows().collect();
            output::to_json(&json!({
                "seed": batch.seed(),
                "dim": batch.dim(),
                "samples": rows,
            }))
        }
    };
    emit(cfg, &text)
}

fn run(cli: Cli) -> Outcome {
    let file = FileConfig::discover(cli.common.config.as_deref()).map_err(Failure::Config)?;
    let mut flags = Overrides {
        tol: cli.common.tol,
        seed: cli.common.seed,
        format: cli.common.format,
        output: cli.common.output.clone(),
        ..Overrides::default()
    };
    match &cli.command {
        Command::Report { bits, .. } => flags.bits = *bits,
        Command::ScanRegions { eta, grid } => {
            flags.eta = *eta;
            flags.grid = grid.clone();
        }
        Command::ScanBounds { grid, s_max, a } => {
            flags.grid = grid.clone();
            flags.s_max = *s_max;
            flags.a = *a;
        }
        Command::Verify { cases, samples } => {
            flags.cases = *cases;
            flags.mc_samples = *samples;
        }
        Command::Sample { samples, .. } => flags.samples = *samples,
    }
    let cfg = RunConfig::resolve(file, flags).map_err(Failure::Config)?;
    log::debug!("resolved configuration {cfg:?}");
    match &cli.command {
        Command::Report { input, .. } => cmd_report(input, &cfg),
        Command::ScanRegions { .. } => cmd_scan_regions(&cfg),
        Command::ScanBounds { .. } => cmd_scan_bounds(&cfg),
        Command::Verify { .. } => cmd_verify(&cfg),
        Command::Sample { input, .. } => cmd_sample(input, &cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gsteer: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
