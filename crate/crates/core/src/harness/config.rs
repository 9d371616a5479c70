//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::dataset::{self, ExemplarSet, SynthSpec};
use crate::dla::DlaConfig;
use crate::lstm::LstmTrainConfig;
use crate::representation::{EncoderConfig, SksPolicy};

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Bundled,
    Synth,
    Csv(PathBuf),
}

impl DatasetSource {
    pub fn parse(s: &str) -> Self {
        match s.trim() {
            "bundled" => Self::Bundled,
            "synth" => Self::Synth,
            path => Self::Csv(PathBuf::from(path)),
        }
    }

    fn as_config_value(&self) -> String {
        match self {
            Self::Bundled => "bundled".into(),
            Self::Synth => "synth".into(),
            Self::Csv(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `None` means "the experiment's own default".
    pub dataset: Option<DatasetSource>,
    pub has_header: bool,
    /// Generator parameters; `seed` is taken from [`ExperimentConfig::seed`].
    pub synth: SynthSpec,
    pub scale_digits: u32,
    pub dla: DlaConfig,
    pub sks: usize,
    pub sks_sweep: Vec<usize>,
    pub extent_sweep: Vec<usize>,
    pub hidden_size: usize,
    pub vocab_size: usize,
    pub lstm: LstmTrainConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            has_header: false,
            synth: SynthSpec::default(),
            scale_digits: 2,
            dla: DlaConfig::default(),
            sks: 1,
            sks_sweep: vec![1, 5, 10],
            extent_sweep: vec![60, 80, 100],
            hidden_size: 20,
            vocab_size: 5,
            lstm: LstmTrainConfig::default(),
            seed: 7,
            out: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Validation(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| invalid(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, HarnessError> {
    value.split(',').map(|v| parse_num(key, v.trim())).collect()
}

fn join(list: &[usize]) -> String {
    list.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "dataset" => self.dataset = Some(DatasetSource::parse(value)),
            "has_header" => self.has_header = parse_num(key, value)?,
            "synth_n" => self.synth.n = parse_num(key, value)?,
            "synth_arity" => self.synth.arity = parse_num(key, value)?,
            "synth_classes" => self.synth.n_classes = parse_num(key, value)?,
            "synth_jitter" => self.synth.jitter = parse_num(key, value)?,
            "scale_digits" => self.scale_digits = parse_num(key, value)?,
            "learning_extent" => self.dla.learning_extent = parse_num(key, value)?,
            "time_limit" => self.dla.time_limit = parse_num(key, value)?,
            "store_threshold" => self.dla.store_threshold = parse_num(key, value)?,
            "initial_permanence" => self.dla.initial_permanence = parse_num(key, value)?,
            "tolerance" => self.dla.tolerance = parse_num(key, value)?,
            "sks" => self.sks = parse_num(key, value)?,
            "sks_sweep" => self.sks_sweep = parse_list(key, value)?,
            "extent_sweep" => self.extent_sweep = parse_list(key, value)?,
            "hidden_size" => self.hidden_size = parse_num(key, value)?,
            "vocab_size" => self.vocab_size = parse_num(key, value)?,
            "learning_rate" => self.lstm.learning_rate = parse_num(key, value)?,
            "l2_strength" => self.lstm.l2_strength = parse_num(key, value)?,
            "clip_value" => self.lstm.clip_value = parse_num(key, value)?,
            "softmax_temperature" => self.lstm.softmax_temperature = parse_num(key, value)?,
            "epochs" => self.lstm.epochs = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(invalid(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        EncoderConfig::new(self.scale_digits).map_err(|e| invalid(e.to_string()))?;
        self.dla.validate().map_err(|e| invalid(e.to_string()))?;
        SksPolicy::new(self.sks).map_err(|e| invalid(e.to_string()))?;
        if self.sks_sweep.is_empty() || self.sks_sweep.contains(&0) {
            return Err(invalid("sks_sweep must be a nonempty list of values >= 1"));
        }
        if self.extent_sweep.is_empty() || self.extent_sweep.contains(&0) {
            return Err(invalid(
                "extent_sweep must be a nonempty list of values >= 1",
            ));
        }
        if self.hidden_size == 0 || self.vocab_size == 0 {
            return Err(invalid("hidden_size and vocab_size must be >= 1"));
        }
        self.lstm.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(())
    }

    pub fn encoder(&self) -> EncoderConfig {
        EncoderConfig::new(self.scale_digits).expect("validated")
    }

    pub fn synth_spec(&self) -> SynthSpec {
        SynthSpec {
            seed: self.seed,
            ..self.synth.clone()
        }
    }

    pub fn lstm_config(&self) -> LstmTrainConfig {
        LstmTrainConfig {
            seed: self.seed,
            ..self.lstm.clone()
        }
    }

    /// Loads the configured dataset, or `fallback` when none is set.
    pub fn load_dataset(&self, fallback: DatasetSource) -> Result<ExemplarSet, HarnessError> {
        match self.dataset.clone().unwrap_or(fallback) {
            DatasetSource::Bundled => Ok(dataset::bundled_threat_sample()),
            DatasetSource::Synth => Ok(self.synth_spec().generate()?),
            DatasetSource::Csv(path) => Ok(dataset::load_csv(path, self.has_header)?),
        }
    }

    /// Every setting except `out`, one `key = value` per line in a fixed
    /// order. Parsing this text yields the same configuration.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(d) = &self.dataset {
            kv("dataset", d.as_config_value());
        }
        kv("has_header", self.has_header.to_string());
        kv("synth_n", self.synth.n.to_string());
        kv("synth_arity", self.synth.arity.to_string());
        kv("synth_classes", self.synth.n_classes.to_string());
        kv("synth_jitter", self.synth.jitter.to_string());
        kv("scale_digits", self.scale_digits.to_string());
        kv("learning_extent", self.dla.learning_extent.to_string());
        kv("time_limit", self.dla.time_limit.to_string());
        kv("store_threshold", self.dla.store_threshold.to_string());
        kv(
            "initial_permanence",
            self.dla.initial_permanence.to_string(),
        );
        kv("tolerance", self.dla.tolerance.to_string());
        kv("sks", self.sks.to_string());
        kv("sks_sweep", join(&self.sks_sweep));
        kv("extent_sweep", join(&self.extent_sweep));
        kv("hidden_size", self.hidden_size.to_string());
        kv("vocab_size", self.vocab_size.to_string());
        kv("learning_rate", self.lstm.learning_rate.to_string());
        kv("l2_strength", self.lstm.l2_strength.to_string());
        kv("clip_value", self.lstm.clip_value.to_string());
        kv(
            "softmax_temperature",
            self.lstm.softmax_temperature.to_string(),
        );
        kv("epochs", self.lstm.epochs.to_string());
        kv("seed", self.seed.to_string());
        s
    }

    /// SHA-256 of [`ExperimentConfig::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
