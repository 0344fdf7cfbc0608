//! Experiment configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use igsub::subordinator::SubordinatorSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Seed used when neither the config file nor `--seed` gives one.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Which subordinator family `simulate` draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Plain,
    Tempered,
    Floored,
    PureDrift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubordinatorConfig {
    pub family: FamilyName,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub beta0: f64,
}

impl Default for SubordinatorConfig {
    fn default() -> Self {
        Self {
            family: FamilyName::Plain,
            alpha: 0.5,
            theta: None,
            epsilon: None,
            beta0: 0.0,
        }
    }
}

impl SubordinatorConfig {
    pub fn to_spec(&self) -> Result<SubordinatorSpec, CliError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("subordinator.{name} is required for {:?}", self.family)))
        };
        let spec = match self.family {
            FamilyName::Plain => SubordinatorSpec::plain(self.alpha)?,
            FamilyName::Tempered => SubordinatorSpec::tempered(self.alpha, need(self.theta, "theta")?)?,
            FamilyName::Floored => SubordinatorSpec::floored(self.alpha, need(self.epsilon, "epsilon")?)?,
            FamilyName::PureDrift => return Ok(SubordinatorSpec::pure_drift(self.beta0)?),
        };
        Ok(spec.with_drift(self.beta0)?)
    }
}

/// What `simulate` writes out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    /// Jump epochs and sizes of the subordinator.
    Subordinator,
    /// Brownian motion on the subordinator clock.
    SubordinatedBm,
    /// Fractional Brownian motion on a plain subordinator clock.
    TimeChangedFbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub process: Process,
    pub horizon: f64,
    /// Evaluation grid for the time-changed processes; defaults to 101
    /// evenly spaced points on `[0, horizon]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            process: Process::Subordinator,
            horizon: 10.0,
            time_grid: None,
            hurst: None,
        }
    }
}

impl SimulateConfig {
    pub fn resolved_time_grid(&self) -> Vec<f64> {
        self.time_grid
            .clone()
            .unwrap_or_else(|| (0..=100).map(|k| self.horizon * k as f64 / 100.0).collect())
    }
}

/// Grid overrides for the verification suites.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
}

/// Parameter overrides for the fBm suites.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FbmConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_scale() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from("igsub-out")
}

/// Fully resolved configuration. `out` and `threads` describe where and how
/// a run executes, not what it computes, so reports leave them out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Overrides every Monte Carlo sample count when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default = "default_scale")]
    pub tolerance_scale: f64,
    #[serde(default = "default_out", skip_serializing)]
    pub out: PathBuf,
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub subordinator: SubordinatorConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub fbm: FbmConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: None,
            seed: DEFAULT_SEED,
            paths: None,
            tolerance_scale: 1.0,
            out: default_out(),
            threads: None,
            subordinator: SubordinatorConfig::default(),
            simulate: SimulateConfig::default(),
            grid: GridConfig::default(),
            fbm: FbmConfig::default(),
        }
    }
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub paths: Option<usize>,
    pub tolerance_scale: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self, CliError> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(t) = o.threads {
            self.threads = Some(t);
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(p) = o.paths {
            self.paths = Some(p);
        }
        if let Some(s) = o.tolerance_scale {
            self.tolerance_scale = s;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tolerance_scale > 0.0 && self.tolerance_scale.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerance_scale must be positive, got {}",
                self.tolerance_scale
            )));
        }
        if self.paths == Some(0) {
            return Err(CliError::Config("paths must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Monte Carlo sample count: the override if present, else `default`.
    pub fn paths_or(&self, default: usize) -> usize {
        self.paths.unwrap_or(default)
    }
}
