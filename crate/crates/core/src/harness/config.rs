//! Run configuration and its `key = value` text format.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. The
//! same keys are accepted as command-line overrides.

use std::path::{Path, PathBuf};

use crate::env::EnvKind;
use crate::error::{Error, Result};
use crate::es::EsConfig;
use crate::eval::EvaluationStrategy;
use crate::policy::NetworkTopology;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub env: EnvKind,
    pub strategy: EvaluationStrategy,
    pub gating: bool,
    pub hidden: usize,
    pub generations: u64,
    pub n_pairs: usize,
    pub sigma: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub max_steps: u64,
    pub seed: u64,
    pub replications: u64,
    pub out_dir: PathBuf,
    pub parallel_replications: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let es = EsConfig::default();
        RunConfig {
            env: EnvKind::Hopper,
            strategy: EvaluationStrategy::PairedBehavior,
            gating: false,
            hidden: 16,
            generations: 300,
            n_pairs: 40,
            sigma: es.sigma,
            learning_rate: es.learning_rate,
            weight_decay: es.weight_decay,
            max_steps: 500,
            seed: 0,
            replications: 5,
            out_dir: PathBuf::from("runs"),
            parallel_replications: false,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("invalid value {value:?} for {key}: {e}")))
}

fn parse_flag(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid value {value:?} for {key}: expected on/off"
        ))),
    }
}

impl RunConfig {
    /// Sets one key. Unknown keys are configuration errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "env" => self.env = value.parse()?,
            "strategy" => self.strategy = value.parse()?,
            "gating" => self.gating = parse_flag(key, value)?,
            "hidden" => self.hidden = parse_value(key, value)?,
            "generations" => self.generations = parse_value(key, value)?,
            "pairs" | "n_pairs" => self.n_pairs = parse_value(key, value)?,
            "sigma" => self.sigma = parse_value(key, value)?,
            "lr" | "learning_rate" => self.learning_rate = parse_value(key, value)?,
            "weight_decay" => self.weight_decay = parse_value(key, value)?,
            "max_steps" | "max-steps" => self.max_steps = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "replications" => self.replications = parse_value(key, value)?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "parallel_replications" => self.parallel_replications = parse_flag(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a config file's lines on top of `self`.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{} line {}: expected \"key = value\", got {line:?}",
                    path.display(),
                    i + 1
                ))
            })?;
            self.set(key, value).map_err(|e| match e {
                Error::Config(msg) => {
                    Error::Config(format!("{} line {}: {msg}", path.display(), i + 1))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = RunConfig::default();
        config.apply_text(&text, path)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("hidden", self.hidden as u64),
            ("generations", self.generations),
            ("pairs", self.n_pairs as u64),
            ("max_steps", self.max_steps),
            ("replications", self.replications),
        ];
        for (name, v) in positive {
            if v < 1 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        self.topology()?;
        self.es_config(self.seed).validate()
    }

    pub fn topology(&self) -> Result<NetworkTopology> {
        NetworkTopology::new(
            self.env.obs_dim(),
            self.hidden,
            self.env.action_dim(),
            self.gating,
        )
    }

    pub fn es_config(&self, seed: u64) -> EsConfig {
        EsConfig {
            sigma: self.sigma,
            learning_rate: self.learning_rate,
            n_pairs: self.n_pairs,
            weight_decay: self.weight_decay,
            seed,
            ..EsConfig::default()
        }
    }

    /// Seed of replication `r`.
    pub fn replication_seed(&self, r: u64) -> u64 {
        self.seed.wrapping_add(r)
    }

    /// Short name used in summaries, e.g. `hopper-paired-gated`.
    pub fn label(&self) -> String {
        format!(
            "{}-{}-{}",
            self.env,
            self.strategy,
            if self.gating { "gated" } else { "standard" }
        )
    }
}
