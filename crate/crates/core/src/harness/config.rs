//! Flat `key = value` experiment files, keys named after the CLI flags.
//!
//! ```text
//! # pilot run
//! n-grid = 16, 32, 64
//! replicates = 300
//! seed = 7
//! metrics = d_k, w1
//! moments = 1, 2
//! format = csv
//! out = results/rates.csv
//! ```

use std::path::{Path, PathBuf};

use super::{ExperimentConfig, Metric};
use crate::{Error, Result};

fn list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| Error::invalid(format!("{key}: {s:?}: {e}")))
        })
        .collect()
}

impl ExperimentConfig {
    /// Applies one setting; keys accept `-` or `_` separators.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "n-grid" => self.n_grid = list(value, key)?,
            "replicates" => {
                self.replicates = value
                    .parse()
                    .map_err(|e| Error::invalid(format!("replicates: {e}")))?
            }
            "seed" => {
                self.master_seed = value
                    .parse()
                    .map_err(|e| Error::invalid(format!("seed: {e}")))?
            }
            "metrics" => {
                self.metrics = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<Metric>)
                    .collect::<Result<_>>()?
            }
            "moments" => self.moment_orders = list(value, key)?,
            "format" => self.output_format = value.parse()?,
            "out" => self.output_path = Some(PathBuf::from(value)),
            "svg" => self.svg_path = Some(PathBuf::from(value)),
            other => return Err(Error::invalid(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key, value)
                .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_kv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_text(&text)
    }
}
