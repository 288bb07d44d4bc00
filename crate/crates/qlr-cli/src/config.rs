//! Run configuration shared by every subcommand. Precedence is
//! flags > config file > defaults; the file comes from `--config` or,
//! when the flag is absent, the QLR_CONFIG environment variable.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

use qlr_core::GridConfig;

/// Which lifting answers a distance or bound query.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// plain lifting: d(f,g)(x,α) sups over the α-ball
    Q,
    /// reflexive lifting: the self-variation is cancelled
    Qr,
    /// valuation lifting: interval image measured by diameter
    Pv,
    /// locally-Lipschitz pointwise model
    Ll,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Q => "q",
            Model::Qr => "qr",
            Model::Pv => "pv",
            Model::Ll => "ll",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// All-optional mirror of [`RunConfig`] for the TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<Model>,
    resolution: Option<usize>,
    radii: Option<Vec<f64>>,
    tolerance: Option<f64>,
    seed: Option<u64>,
    format: Option<Format>,
}

/// Flag-level overrides collected by the argument parser.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<Model>,
    pub resolution: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub resolution: usize,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::Q,
            resolution: 1001,
            radii: vec![0.0, 0.1, 1.0, FRAC_PI_2],
            tolerance: 1e-9,
            seed: 7,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    pub fn load(config_flag: Option<&Path>, ov: &Overrides) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let path: Option<PathBuf> = config_flag
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("QLR_CONFIG").map(PathBuf::from));
        if let Some(p) = path {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            let file: FileConfig = toml::from_str(&text)
                .with_context(|| format!("invalid config file {}", p.display()))?;
            if let Some(v) = file.model {
                cfg.model = v;
            }
            if let Some(v) = file.resolution {
                cfg.resolution = v;
            }
            if let Some(v) = file.radii {
                cfg.radii = v;
            }
            if let Some(v) = file.tolerance {
                cfg.tolerance = v;
            }
            if let Some(v) = file.seed {
                cfg.seed = v;
            }
            if let Some(v) = file.format {
                cfg.format = v;
            }
        }
        if let Some(v) = ov.model {
            cfg.model = v;
        }
        if let Some(v) = ov.resolution {
            cfg.resolution = v;
        }
        if let Some(v) = &ov.radii {
            cfg.radii = v.clone();
        }
        if let Some(v) = ov.tolerance {
            cfg.tolerance = v;
        }
        if let Some(v) = ov.seed {
            cfg.seed = v;
        }
        if let Some(v) = ov.format {
            cfg.format = v;
        }
        if cfg.resolution < 3 {
            bail!("resolution must be at least 3, got {}", cfg.resolution);
        }
        if !(cfg.tolerance > 0.0) {
            bail!("tolerance must be positive, got {}", cfg.tolerance);
        }
        if cfg.radii.is_empty() {
            bail!("at least one probe radius is required");
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> GridConfig {
        GridConfig {
            points: self.resolution,
            window: GridConfig::default().window,
            radii: self.radii.clone(),
        }
    }
}
