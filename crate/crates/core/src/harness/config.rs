use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::environments::EnvironmentSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Oppm,
    Optoppm,
    OptoppmMulti,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 3] = [Self::Oppm, Self::Optoppm, Self::OptoppmMulti];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Oppm => "oppm",
            Self::Optoppm => "optoppm",
            Self::OptoppmMulti => "optoppm_multi",
        }
    }

    pub fn default_lags(&self) -> Vec<usize> {
        match self {
            Self::OptoppmMulti => vec![4, 5, 6],
            _ => vec![4],
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

pub const DEFAULT_HORIZON: u64 = 100_000;

fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

fn default_epsilon() -> f64 {
    0.1
}

fn one() -> f64 {
    1.0
}

/// One experiment: an environment, an algorithm and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Legend / file stem; defaults to `<environment>_<algorithm>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub environment: EnvironmentSpec,
    pub algorithm: AlgorithmKind,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub c_preset: f64,
    #[serde(default = "one")]
    pub c1_preset: f64,
    #[serde(default = "one")]
    pub c2_preset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lags: Option<Vec<usize>>,
    /// Initial horizon guess of the expert layer; defaults to `2d + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hedge_t_guess: Option<u64>,
    /// Record every `stride` rounds (plus powers of ten and the last round)
    /// instead of every 100.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<u64>,
    /// Starting pair; drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_pair: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(environment: EnvironmentSpec, algorithm: AlgorithmKind) -> Self {
        Self {
            name: None,
            environment,
            algorithm,
            horizon: DEFAULT_HORIZON,
            seed: 0,
            epsilon: default_epsilon(),
            c_preset: 1.0,
            c1_preset: 1.0,
            c2_preset: 1.0,
            lags: None,
            hedge_t_guess: None,
            record_stride: None,
            initial_pair: None,
            csv_path: None,
            svg_path: None,
        }
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{}_{}", self.environment.kind, self.algorithm))
    }

    pub fn effective_lags(&self) -> Vec<usize> {
        self.lags.clone().unwrap_or_else(|| self.algorithm.default_lags())
    }

    pub fn effective_t_guess(&self) -> u64 {
        self.hedge_t_guess.unwrap_or(2 * self.effective_lags().len() as u64 + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.record_stride == Some(0) {
            return bad("record_stride must be at least 1".into());
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("c_preset", self.c_preset),
            ("c1_preset", self.c1_preset),
            ("c2_preset", self.c2_preset),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        let lags = self.effective_lags();
        if lags.is_empty() || lags.contains(&0) {
            return bad(format!("lags must be non-empty and >= 1, got {lags:?}"));
        }
        if self.algorithm == AlgorithmKind::Optoppm && lags.len() != 1 {
            return bad(format!("optoppm takes exactly one lag, got {lags:?}"));
        }
        if self.algorithm == AlgorithmKind::OptoppmMulti && self.effective_t_guess() <= lags.len() as u64 {
            return bad("hedge_t_guess must exceed the number of predictors".into());
        }
        if let Some((x, y)) = self.initial_pair {
            let r = self.environment.radius();
            if !(x.abs() <= r && y.abs() <= r) {
                return bad(format!("initial pair ({x}, {y}) lies outside [-{r}, {r}]^2"));
            }
        }
        self.environment.validate()
    }

    /// Whether round `t` is written to the trace.
    pub fn is_checkpoint(&self, t: u64) -> bool {
        let stride = self.record_stride.unwrap_or(100);
        t == self.horizon || t.is_multiple_of(stride) || is_power_of_ten(t)
    }
}

pub fn is_power_of_ten(mut t: u64) -> bool {
    if t == 0 {
        return false;
    }
    while t.is_multiple_of(10) {
        t /= 10;
    }
    t == 1
}
