//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use gsteer::scan::GridAxis;
use gsteer::verify::SuiteConfig;
use serde::Deserialize;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "GSTEER_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub bits: Option<bool>,
    pub eta: Option<f64>,
    pub grid: Option<String>,
    pub s_max: Option<f64>,
    pub a: Option<f64>,
    pub samples: Option<usize>,
    pub cases: Option<usize>,
    pub mc_states: Option<usize>,
    pub mc_samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    /// The file named by `explicit`, else by the environment, else empty.
    pub fn discover(explicit: Option<&Path>) -> Result<Self, String> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub bits: bool,
    pub eta: Option<f64>,
    pub grid: Option<String>,
    pub s_max: Option<f64>,
    pub a: Option<f64>,
    pub samples: Option<usize>,
    pub cases: Option<usize>,
    pub mc_samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: f64,
    pub seed: u64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub bits: bool,
    pub eta: f64,
    pub grid: Option<GridAxis>,
    pub s_max: Option<f64>,
    pub a: f64,
    pub samples: usize,
    pub suite: SuiteConfig,
}

pub const DEFAULT_ETA: f64 = 0.5;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_A: f64 = 1e8;

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, String> {
        let defaults = SuiteConfig::default();
        let tol = flags.tol.or(file.tol).unwrap_or(gsteer::DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(format!("tolerance must be positive, got {tol}"));
        }
        let grid = match flags.grid.or(file.grid) {
            Some(g) => Some(GridAxis::parse(&g).map_err(|e| e.to_string())?),
            None => None,
        };
        let seed = flags.seed.or(file.seed).unwrap_or(defaults.seed);
        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err("sample count must be positive".into());
        }
        let suite = SuiteConfig {
            cases: flags.cases.or(file.cases).unwrap_or(defaults.cases),
            mc_states: file.mc_states.unwrap_or(defaults.mc_states),
            mc_samples: flags.mc_samples.or(file.mc_samples).unwrap_or(defaults.mc_samples),
            seed,
            tol,
        };
        if suite.cases == 0 || suite.mc_states == 0 {
            return Err("suite case counts must be positive".into());
        }
        if suite.mc_samples < 10_000 {
            return Err(format!(
                "Monte Carlo checks need at least 10000 samples, got {}",
                suite.mc_samples
            ));
        }
        Ok(Self {
            tol,
            seed,
            format: flags.format.or(file.format),
            output: flags.output.or(file.output),
            bits: flags.bits || file.bits.unwrap_or(false),
            eta: flags.eta.or(file.eta).unwrap_or(DEFAULT_ETA),
            grid,
            s_max: flags.s_max.or(file.s_max),
            a: flags.a.or(file.a).unwrap_or(DEFAULT_A),
            samples,
            suite,
        })
    }
}
