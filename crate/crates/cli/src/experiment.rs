//! Configuration loading, command-line overrides and the audit header.

use std::path::Path;

use anyhow::{bail, Context, Result};
use dirloc::config::ExperimentConfig;
use dirloc::presets;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<usize>,
    pub snr_db: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub grid_res_m: Option<f64>,
    pub methods: Option<Vec<String>>,
}

/// Effective configuration of one command after overrides.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    /// SNR list given on the command line, if any.
    pub snr_override: Option<Vec<f64>>,
}

impl Experiment {
    pub fn load(source: &str, overrides: &Overrides) -> Result<Self> {
        let mut config = if presets::json(source).is_some() {
            presets::config(source)?
        } else {
            let path = Path::new(source);
            if !path.exists() {
                bail!(
                    "`{source}` is neither a bundled preset ({}) nor an existing file",
                    presets::NAMES.join(", ")
                );
            }
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)
                .with_context(|| format!("invalid configuration {}", path.display()))?
        };
        if let Some(t) = overrides.trials {
            config.experiment.trials = t;
        }
        if let Some(s) = overrides.seed {
            config.experiment.seed = s;
        }
        if let Some(r) = overrides.grid_res_m {
            config.search.resolution_m = r;
        }
        if let Some(m) = &overrides.methods {
            config.experiment.methods = m.clone();
        }
        if let Some(snr) = &overrides.snr_db {
            if snr.is_empty() {
                bail!("--snr needs at least one value");
            }
            config.experiment.snr_db = snr.clone();
            config.crlb.snr_db = snr.clone();
        }
        config.validate().context("invalid configuration after overrides")?;
        Ok(Self {
            config,
            snr_override: overrides.snr_db.clone(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.config.experiment.seed
    }

    /// SHA-256 of the effective configuration JSON, lowercase hex.
    pub fn config_hash(&self) -> String {
        Sha256::digest(self.config.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Comment line that starts every output file.
    pub fn header(&self) -> String {
        format!(
            "# dirloc {} config={} config_sha256={} seed={}",
            env!("CARGO_PKG_VERSION"),
            self.config.name,
            self.config_hash(),
            self.seed()
        )
    }
}
