//! Labeled feature rows: CSV loading/saving, the bundled threat-event sample
//! and a seeded synthetic incident generator.
//!
//! Rows are `label,f1,...,fk`. Row order is load order and is meaningful
//! downstream: the memory consumes exemplars as a temporal stream.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("line {row}: expected {expected} features, found {found}")]
    ArityMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {row}, column {column}: `{cell}` is not a number")]
    InvalidNumber {
        row: usize,
        column: usize,
        cell: String,
    },
    #[error("line {row}, column {column}: value is not finite")]
    NonFinite { row: usize, column: usize },
    #[error("line {row}: row has a label but no features")]
    MissingFeatures { row: usize },
    #[error("line {row}: empty label")]
    EmptyLabel { row: usize },
    #[error("label `{0}` cannot be written as CSV (contains a comma or line break)")]
    UnwritableLabel(String),
    #[error("invalid exemplar: {0}")]
    InvalidExemplar(String),
    #[error("invalid generator arguments: {0}")]
    InvalidCounts(String),
}

/// One labeled feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct Exemplar {
    label: String,
    features: Vec<f64>,
}

impl Exemplar {
    pub fn new(label: impl Into<String>, features: Vec<f64>) -> Result<Self, DatasetError> {
        let label = label.into();
        if label.trim().is_empty() {
            return Err(DatasetError::InvalidExemplar("empty label".into()));
        }
        if features.is_empty() {
            return Err(DatasetError::InvalidExemplar(format!(
                "`{label}` has no features"
            )));
        }
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::InvalidExemplar(format!(
                "`{label}` feature {i} is not finite"
            )));
        }
        Ok(Self { label, features })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }
}

/// An ordered collection of exemplars sharing one arity.
#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarSet {
    exemplars: Vec<Exemplar>,
    arity: usize,
    classes: Vec<String>,
}

impl ExemplarSet {
    /// Builds a set, checking that every exemplar has the arity of the first.
    pub fn new(exemplars: Vec<Exemplar>) -> Result<Self, DatasetError> {
        let first = exemplars.first().ok_or(DatasetError::EmptyDataset)?;
        let arity = first.features.len();
        let mut classes: Vec<String> = Vec::new();
        for (i, ex) in exemplars.iter().enumerate() {
            if ex.features.len() != arity {
                return Err(DatasetError::ArityMismatch {
                    row: i + 1,
                    expected: arity,
                    found: ex.features.len(),
                });
            }
            if !classes.iter().any(|c| c == &ex.label) {
                classes.push(ex.label.clone());
            }
        }
        Ok(Self {
            exemplars,
            arity,
            classes,
        })
    }

    pub fn exemplars(&self) -> &[Exemplar] {
        &self.exemplars
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Distinct labels in first-appearance order.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.exemplars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    /// Number of exemplars per class, in `classes()` order.
    pub fn class_counts(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| self.exemplars.iter().filter(|e| &e.label == c).count())
            .collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Exemplar> {
        self.exemplars.iter()
    }
}

impl<'a> IntoIterator for &'a ExemplarSet {
    type Item = &'a Exemplar;
    type IntoIter = std::slice::Iter<'a, Exemplar>;

    fn into_iter(self) -> Self::IntoIter {
        self.exemplars.iter()
    }
}

/// Reads a label-first CSV file.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<ExemplarSet, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(&text, has_header)
}

/// Parses CSV text; row numbers in errors are 1-based file line numbers.
pub fn parse_csv(text: &str, has_header: bool) -> Result<ExemplarSet, DatasetError> {
    let mut exemplars = Vec::new();
    let mut arity: Option<usize> = None;
    let skip = usize::from(has_header);

    for (idx, line) in text.lines().enumerate().skip(skip) {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let label = cells.next().unwrap_or_default().trim();
        if label.is_empty() {
            return Err(DatasetError::EmptyLabel { row });
        }
        let mut features = Vec::new();
        for (c, cell) in cells.enumerate() {
            let column = c + 2;
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| DatasetError::InvalidNumber {
                row,
                column,
                cell: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::NonFinite { row, column });
            }
            features.push(value);
        }
        if features.is_empty() {
            return Err(DatasetError::MissingFeatures { row });
        }
        match arity {
            None => arity = Some(features.len()),
            Some(expected) if expected != features.len() => {
                return Err(DatasetError::ArityMismatch {
                    row,
                    expected,
                    found: features.len(),
                })
            }
            Some(_) => {}
        }
        exemplars.push(Exemplar {
            label: label.to_string(),
            features,
        });
    }

    if exemplars.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    ExemplarSet::new(exemplars)
}

/// Renders the set as CSV with six significant digits per feature.
pub fn to_csv(set: &ExemplarSet) -> Result<String, DatasetError> {
    let mut out = String::new();
    for ex in set {
        if ex.label.contains([',', '\n', '\r']) {
            return Err(DatasetError::UnwritableLabel(ex.label.clone()));
        }
        out.push_str(&ex.label);
        for v in &ex.features {
            let _ = write!(out, ",{}", format_sig6(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn save_csv(set: &ExemplarSet, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let text = to_csv(set)?;
    fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Formats `v` rounded to six significant digits, printed in its shortest form.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    format!("{rounded}")
}

// Threat-event feature rows for a vehicle pass, two machine excavations and
// manual digging. Ten statistical features each.
const THREAT_SAMPLE: [(&str, [f64; 10]); 4] = [
    (
        "Vehicle passing",
        [2.02, 49.78, 40.75, 2.42, 4.57, 0.27, 0.08, 0.03, 0.06, 20.0],
    ),
    (
        "Machine excavation",
        [0.31, 46.78, 48.39, 1.58, 2.45, 0.35, 0.06, 0.02, 0.03, 34.0],
    ),
    (
        "Machine excavation",
        [0.17, 40.01, 55.23, 1.27, 2.73, 0.52, 0.05, 0.01, 0.01, 36.0],
    ),
    (
        "Manual digging",
        [25.97, 0.81, 9.37, 39.77, 6.61, 6.21, 7.91, 1.85, 1.47, 22.0],
    ),
];

/// The four-row pipeline threat-event sample shipped with the crate.
pub fn bundled_threat_sample() -> ExemplarSet {
    let exemplars = THREAT_SAMPLE
        .iter()
        .map(|(label, features)| Exemplar {
            label: (*label).to_string(),
            features: features.to_vec(),
        })
        .collect();
    ExemplarSet::new(exemplars).expect("bundled sample is well-formed")
}

/// Incident-cause names used for synthetic classes; classes beyond the list
/// are named `class-<k>`.
const INCIDENT_CAUSES: [&str; 6] = [
    "Corrosion",
    "Excavation damage",
    "Material failure",
    "Equipment failure",
    "Natural force damage",
    "Incorrect operation",
];

/// Default jitter half-width (feature units) of the synthetic generator.
pub const DEFAULT_SYNTH_JITTER: f64 = 0.02;

/// Parameters of the synthetic incident generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub arity: usize,
    pub n_classes: usize,
    /// Half-width of the uniform jitter added to each centroid element.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 190,
            arity: 10,
            n_classes: 3,
            jitter: DEFAULT_SYNTH_JITTER,
            seed: 7,
        }
    }
}

impl SynthSpec {
    /// Generates the set.
    ///
    /// Feature `f` has magnitude scale `50 * 10^(-3 f / (arity - 1))`, so the
    /// columns span three decades like real threat-event features. Each class
    /// draws a centroid uniformly in `[0, scale)` per column; exemplar `i`
    /// belongs to class `i mod n_classes` and adds jitter uniform in
    /// `[-jitter, jitter]`. Values are rounded to two decimals.
    pub fn generate(&self) -> Result<ExemplarSet, DatasetError> {
        if self.n_classes < 1 || self.n < self.n_classes {
            return Err(DatasetError::InvalidCounts(format!(
                "need n >= n_classes >= 1, got n={} n_classes={}",
                self.n, self.n_classes
            )));
        }
        if self.arity < 1 {
            return Err(DatasetError::InvalidCounts("arity must be >= 1".into()));
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(DatasetError::InvalidCounts(format!(
                "jitter must be finite and >= 0, got {}",
                self.jitter
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let scales: Vec<f64> = (0..self.arity)
            .map(|f| {
                if self.arity == 1 {
                    50.0
                } else {
                    50.0 * 10f64.powf(-3.0 * f as f64 / (self.arity - 1) as f64)
                }
            })
            .collect();
        let centroids: Vec<Vec<f64>> = (0..self.n_classes)
            .map(|_| scales.iter().map(|s| s * rng.gen::<f64>()).collect())
            .collect();
        let labels: Vec<String> = (0..self.n_classes)
            .map(|k| match INCIDENT_CAUSES.get(k) {
                Some(name) => (*name).to_string(),
                None => format!("class-{}", k + 1),
            })
            .collect();

        let exemplars = (0..self.n)
            .map(|i| {
                let class = i % self.n_classes;
                let features = centroids[class]
                    .iter()
                    .map(|c| {
                        let j = if self.jitter > 0.0 {
                            rng.gen_range(-self.jitter..=self.jitter)
                        } else {
                            0.0
                        };
                        // `+ 0.0` folds negative zero
                        ((c + j) * 100.0).round() / 100.0 + 0.0
                    })
                    .collect();
                Exemplar {
                    label: labels[class].clone(),
                    features,
                }
            })
            .collect();
        ExemplarSet::new(exemplars)
    }
}

/// Deterministic synthetic incident set with the default jitter.
pub fn synth_incident_set(
    n: usize,
    arity: usize,
    n_classes: usize,
    seed: u64,
) -> Result<ExemplarSet, DatasetError> {
    SynthSpec {
        n,
        arity,
        n_classes,
        jitter: DEFAULT_SYNTH_JITTER,
        seed,
    }
    .generate()
}
