//! Experiment configuration files.
//!
//! ```toml
//! seed = 7
//! symbols_per_point = 1000000
//! snr_mode = "receive"                  # or "reference"
//! snr_sweep_db = { start = 0.0, stop = 25.0, step = 1.0 }   # or a list
//!
//! [path_loss]
//! alpha = 2.0
//! d_ref = 1.0                           # default 1 m
//!
//! [sender]
//! scheme = "qam16_circ"                 # or scheme_file = "sender.toml"
//! key = "identity"                      # or "random:<seed>" or "i0,i1,..."
//!
//! [[receivers]]
//! label = "intended"
//! scheme = "qam16_circ"
//! distance_m = 10.0
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::sweep_points;
use crate::channel::PathLossModel;
use crate::constellation::{ConstellationScheme, MappingKey};
use crate::error::{Error, Result};

pub const MIN_SYMBOLS_PER_POINT: u64 = 10_000;
pub const DEFAULT_SYMBOLS_PER_POINT: u64 = 1_000_000;

fn default_symbols() -> u64 {
    DEFAULT_SYMBOLS_PER_POINT
}

/// How the sweep values are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrMode {
    /// Sweep values are the SNR each receiver sees.
    #[default]
    Receive,
    /// Sweep values are the SNR at `d_ref`; each receiver's SNR follows
    /// from its distance through the path-loss model.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            SweepSpec::List(v) => Ok(v.clone()),
            SweepSpec::Range { start, stop, step } => sweep_points(*start, *stop, *step),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenderSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub distance_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_symbols")]
    pub symbols_per_point: u64,
    #[serde(default)]
    pub snr_mode: SnrMode,
    pub snr_sweep_db: SweepSpec,
    pub path_loss: PathLossModel,
    pub sender: SenderSpec,
    pub receivers: Vec<ReceiverSpec>,
}

/// A receiver with its scheme loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct Receiver {
    pub label: String,
    pub scheme: ConstellationScheme,
    pub distance_m: f64,
}

/// A validated configuration with every scheme resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub seed: u64,
    pub symbols_per_point: u64,
    pub snr_mode: SnrMode,
    pub sweep_db: Vec<f64>,
    pub path_loss: PathLossModel,
    pub sender: ConstellationScheme,
    pub receivers: Vec<Receiver>,
}

impl Experiment {
    /// Receive-side SNR for sweep point `snr_db` at `distance_m`.
    pub fn effective_snr_db(&self, snr_db: f64, distance_m: f64) -> Result<f64> {
        match self.snr_mode {
            SnrMode::Receive => Ok(snr_db),
            SnrMode::Reference => PathLossModel {
                snr_ref_db: snr_db,
                ..self.path_loss
            }
            .snr_at_distance(distance_m),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|source| Error::Toml {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Validates the configuration and loads every scheme. Scheme files are
    /// looked up relative to `base_dir` when given.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<Experiment> {
        if self.symbols_per_point < MIN_SYMBOLS_PER_POINT {
            return Err(Error::Config(format!(
                "symbols_per_point must be at least {MIN_SYMBOLS_PER_POINT}, got {}",
                self.symbols_per_point
            )));
        }
        let sweep_db = self.snr_sweep_db.points().map_err(|e| Error::Config(e.to_string()))?;
        if sweep_db.is_empty() {
            return Err(Error::Config("SNR sweep is empty".into()));
        }
        if sweep_db.iter().any(|s| !s.is_finite()) || sweep_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("SNR sweep must be finite and strictly increasing".into()));
        }
        self.path_loss.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.receivers.is_empty() {
            return Err(Error::Config("at least one receiver is required".into()));
        }

        let sender = resolve_scheme(
            "sender",
            self.sender.scheme.as_deref(),
            self.sender.scheme_file.as_deref(),
            self.sender.key.as_deref(),
            base_dir,
        )?;
        let mut seen = HashSet::new();
        let mut receivers = Vec::with_capacity(self.receivers.len());
        for r in &self.receivers {
            if r.label.is_empty() || r.label.contains([',', '\n', '"']) {
                return Err(Error::Config(format!("invalid receiver label `{}`", r.label)));
            }
            if !seen.insert(r.label.as_str()) {
                return Err(Error::Config(format!("duplicate receiver label `{}`", r.label)));
            }
            let scheme = resolve_scheme(
                &r.label,
                r.scheme.as_deref(),
                r.scheme_file.as_deref(),
                r.key.as_deref(),
                base_dir,
            )?;
            if scheme.bits_per_symbol() > sender.bits_per_symbol() {
                return Err(Error::Config(format!(
                    "receiver `{}` carries more bits per symbol than the sender",
                    r.label
                )));
            }
            self.path_loss
                .loss_db(r.distance_m)
                .map_err(|e| Error::Config(format!("receiver `{}`: {e}", r.label)))?;
            receivers.push(Receiver {
                label: r.label.clone(),
                scheme,
                distance_m: r.distance_m,
            });
        }
        Ok(Experiment {
            seed: self.seed,
            symbols_per_point: self.symbols_per_point,
            snr_mode: self.snr_mode,
            sweep_db,
            path_loss: self.path_loss,
            sender,
            receivers,
        })
    }
}

/// Parses a key reference: `identity`, `random:<seed>`, or an explicit
/// comma-separated permutation.
pub fn parse_key_spec(text: &str, order: usize) -> Result<MappingKey> {
    let text = text.trim();
    if text == "identity" {
        return Ok(MappingKey::identity(order));
    }
    if let Some(seed) = text.strip_prefix("random:") {
        let seed = seed
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidKey(format!("bad seed in `{text}`")))?;
        return MappingKey::random(order, seed);
    }
    MappingKey::parse_for_order(text, order)
}

fn resolve_scheme(
    who: &str,
    name: Option<&str>,
    file: Option<&Path>,
    key: Option<&str>,
    base_dir: Option<&Path>,
) -> Result<ConstellationScheme> {
    let err = |e: Error| Error::Config(format!("{who}: {e}"));
    let base = match (name, file) {
        (Some(name), None) => ConstellationScheme::standard_by_name(name).map_err(err)?,
        (None, Some(file)) => {
            let path = match base_dir {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.to_path_buf(),
            };
            ConstellationScheme::load(&path).map_err(err)?
        }
        _ => return Err(Error::Config(format!("{who}: give exactly one of `scheme` or `scheme_file`"))),
    };
    match key {
        None => Ok(base),
        Some(k) => {
            let key = parse_key_spec(k, base.order()).map_err(err)?;
            base.with_key(key).map_err(err)
        }
    }
}
