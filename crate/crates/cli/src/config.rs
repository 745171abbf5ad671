use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use fockforge::fock::Cutoff;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("n_max must be at least 1")]
    Cutoff,
    #[error("margin {margin} exceeds n_max {n_max}")]
    Margin { margin: usize, n_max: usize },
    #[error("bad margin {0:?}: expected an integer or \"auto\"")]
    MarginSyntax(String),
    #[error("{0}")]
    Grid(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginSetting {
    Auto,
    Fixed(usize),
}

impl MarginSetting {
    /// `ceil(n_max / 4)` for `Auto`.
    pub fn resolve(self, cutoff: Cutoff) -> usize {
        match self {
            Self::Auto => cutoff.default_margin(),
            Self::Fixed(m) => m,
        }
    }
}

impl FromStr for MarginSetting {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| ConfigError::MarginSyntax(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_max: usize,
    pub margin: MarginSetting,
    pub tolerance: f64,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_max: 36,
            margin: MarginSetting::Auto,
            tolerance: 1e-6,
            seed: 7,
            output_format: OutputFormat::Json,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ConfigError::Tolerance(self.tolerance));
        }
        let cutoff = Cutoff::new(self.n_max).map_err(|_| ConfigError::Cutoff)?;
        let margin = self.margin.resolve(cutoff);
        if margin > self.n_max {
            return Err(ConfigError::Margin {
                margin,
                n_max: self.n_max,
            });
        }
        Ok(())
    }

    /// Panics on an unvalidated config.
    pub fn cutoff(&self) -> Cutoff {
        Cutoff::new(self.n_max).expect("validated config")
    }

    pub fn margin(&self) -> usize {
        self.margin.resolve(self.cutoff())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            n_max: self.n_max,
            margin: self.margin(),
            tolerance: self.tolerance,
            seed: self.seed,
        }
    }
}

/// Resolved configuration written at the top of every output body.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n_max: usize,
    pub margin: usize,
    pub tolerance: f64,
    pub seed: u64,
}
