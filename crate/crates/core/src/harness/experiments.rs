use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::{DatasetSource, ExperimentConfig, HarnessError, TrendSeries};
use crate::classifier::{assign_label, mapca, MapcaReport};
use crate::dataset::{to_csv, Exemplar, ExemplarSet};
use crate::dla::{DlaConfig, MemoryStore};
use crate::lstm::{init_params, sample, train, FeatureBinner};
use crate::representation::{apply_sks, decode, encode, EncoderConfig, IntegerChunk, SksPolicy};

fn encode_set(set: &ExemplarSet, enc: EncoderConfig) -> Result<Vec<IntegerChunk>, HarnessError> {
    set.iter()
        .map(|ex| encode(ex.features(), enc).map_err(HarnessError::from))
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn config_text(cfg: &ExperimentConfig) -> String {
    format!("{}# config_hash = {}\n", cfg.canonical(), cfg.hash())
}

/// Side-by-side DLA / LSTM predictions on a labeled set.
#[derive(Debug, Clone)]
pub struct Exp1Report {
    /// Every candidate of the recall pass, decoded and labeled.
    pub dla_rows: Vec<Exemplar>,
    pub lstm_rows: Vec<Exemplar>,
    /// Selected chunks of the recall pass scored against the stream.
    pub dla_recall: MapcaReport,
    pub lstm_loss_trace: Vec<f64>,
    pub scale_digits: u32,
    pub seed: u64,
    pub config_hash: String,
}

impl Exp1Report {
    pub fn dla_classes(&self) -> Vec<&str> {
        distinct_labels(&self.dla_rows)
    }

    pub fn lstm_classes(&self) -> Vec<&str> {
        distinct_labels(&self.lstm_rows)
    }

    pub fn to_text(&self) -> String {
        let prec = self.scale_digits as usize;
        let block = |out: &mut String, title: &str, rows: &[Exemplar]| {
            let _ = writeln!(out, "{title}:");
            for r in rows {
                out.push_str(r.label());
                for v in r.features() {
                    let _ = write!(out, "\t{v:.prec$}");
                }
                out.push('\n');
            }
        };
        let mut out = String::new();
        block(&mut out, "DLA", &self.dla_rows);
        block(&mut out, "LSTM", &self.lstm_rows);
        let _ = writeln!(
            out,
            "# dla_rows = {} ({} classes), lstm_rows = {} ({} classes)",
            self.dla_rows.len(),
            self.dla_classes().len(),
            self.lstm_rows.len(),
            self.lstm_classes().len()
        );
        let _ = writeln!(
            out,
            "# dla_recall_mapca = {:.4} ({}/{})",
            self.dla_recall.accuracy_percent, self.dla_recall.hits, self.dla_recall.n_z
        );
        if let Some(last) = self.lstm_loss_trace.last() {
            let _ = writeln!(out, "# lstm_final_loss = {last:.6}");
        }
        let _ = writeln!(out, "# seed = {}", self.seed);
        let _ = writeln!(out, "# config_hash = {}", self.config_hash);
        out
    }
}

fn distinct_labels(rows: &[Exemplar]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for r in rows {
        if !out.contains(&r.label()) {
            out.push(r.label());
        }
    }
    out
}

/// Presents the encoded set to the memory once, then replays it and reports
/// every recalled candidate. The LSTM is trained on the binned rows and
/// sampled once, primed with the first token of the last row.
pub fn run_experiment1(cfg: &ExperimentConfig) -> Result<Exp1Report, HarnessError> {
    cfg.validate()?;
    let data = cfg.load_dataset(DatasetSource::Bundled)?;
    let enc = cfg.encoder();
    let policy = SksPolicy::new(cfg.sks).map_err(HarnessError::from)?;
    let chunks = apply_sks(&encode_set(&data, enc)?, policy);

    let mut store = MemoryStore::new(cfg.dla.clone())?;
    let stream: Vec<IntegerChunk> = chunks.iter().chain(&chunks).cloned().collect();
    let predictions = store.run_episode(&stream)?;
    let recall = &predictions[predictions.len() - chunks.len()..];

    let mut dla_rows = Vec::new();
    for p in recall {
        for cand in &p.candidates {
            let features = decode(cand, enc);
            let label = assign_label(&features, &data)?;
            dla_rows.push(Exemplar::new(label, features)?);
        }
    }
    let observed: Vec<Vec<f64>> = chunks.iter().map(|c| decode(c, enc)).collect();
    let selected: Vec<Vec<f64>> = recall.iter().map(|p| decode(&p.selected, enc)).collect();
    let dla_recall = mapca(&observed, &selected, cfg.dla.tolerance)?;

    let binner = FeatureBinner::fit(data.iter().map(|e| e.features()), cfg.vocab_size)
        .ok_or_else(|| HarnessError::Validation("cannot bin an empty dataset".into()))?;
    let corpus: Vec<Vec<usize>> = data.iter().map(|e| binner.tokenize(e.features())).collect();
    let lstm_cfg = cfg.lstm_config();
    let params = init_params(cfg.hidden_size, cfg.vocab_size, cfg.seed)?;
    let trained = train(params, &corpus, &lstm_cfg)?;
    let last = corpus.last().expect("nonempty dataset");
    let mut tokens = vec![last[0]];
    tokens.extend(sample(
        &trained.params,
        &tokens,
        data.arity() - 1,
        lstm_cfg.softmax_temperature,
        cfg.seed,
    )?);
    let lstm_features = binner.detokenize(&tokens);
    let lstm_label = assign_label(&lstm_features, &data)?;
    let lstm_rows = vec![Exemplar::new(lstm_label, lstm_features)?];

    Ok(Exp1Report {
        dla_rows,
        lstm_rows,
        dla_recall,
        lstm_loss_trace: trained.loss_trace,
        scale_digits: cfg.scale_digits,
        seed: cfg.seed,
        config_hash: cfg.hash(),
    })
}

/// Writes `report.txt`, `dla_rows.csv`, `lstm_rows.csv` and `config.txt`.
pub fn write_experiment1(
    report: &Exp1Report,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<(), HarnessError> {
    create_dir(dir)?;
    write_file(&dir.join("report.txt"), &report.to_text())?;
    write_file(
        &dir.join("dla_rows.csv"),
        &to_csv(&ExemplarSet::new(report.dla_rows.clone())?)?,
    )?;
    write_file(
        &dir.join("lstm_rows.csv"),
        &to_csv(&ExemplarSet::new(report.lstm_rows.clone())?)?,
    )?;
    write_file(&dir.join("config.txt"), &config_text(cfg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: usize,
    pub mapca: MapcaReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// `SKS` or `l_ext`.
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub config_hash: String,
}

impl SweepReport {
    pub fn accuracy(&self, value: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.value == value)
            .map(|r| r.mapca.accuracy_percent)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# parameter = {}", self.parameter);
        let _ = writeln!(out, "# seed = {}", self.seed);
        let _ = writeln!(out, "# config_hash = {}", self.config_hash);
        let _ = writeln!(out, "{},mapca_percent,hits,n_z", self.parameter);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.4},{},{}",
                r.value, r.mapca.accuracy_percent, r.mapca.hits, r.mapca.n_z
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: SweepReport,
    /// One per sweep row, same order.
    pub trends: Vec<TrendSeries>,
}

/// Skips, replays and scores one configuration.
///
/// Each prediction is made for the chunk arriving at that step and scored
/// against it in decoded feature space. Trend points are
/// `(1-based position in the unskipped stream, first unit of the selected
/// chunk)`.
pub fn sweep_point(
    chunks: &[IntegerChunk],
    dla: &DlaConfig,
    sks: usize,
    enc: EncoderConfig,
    label: &str,
) -> Result<(MapcaReport, TrendSeries), HarnessError> {
    let policy = SksPolicy::new(sks)?;
    let retained = apply_sks(chunks, policy);
    if retained.len() < 2 {
        return Err(HarnessError::Validation(format!(
            "SKS {sks} leaves {} of {} chunks; at least 2 are needed to score",
            retained.len(),
            chunks.len()
        )));
    }
    let mut store = MemoryStore::new(dla.clone())?;
    let predictions = store.run_episode(&retained)?;

    let observed: Vec<Vec<f64>> = retained[1..].iter().map(|c| decode(c, enc)).collect();
    let predicted: Vec<Vec<f64>> = predictions
        .iter()
        .map(|p| decode(&p.selected, enc))
        .collect();
    let report = mapca(&observed, &predicted, dla.tolerance)?;

    let points = predictions
        .iter()
        .enumerate()
        .map(|(i, p)| (((i + 1) * sks + 1) as u64, p.selected.units()[0]))
        .collect();
    let trend = TrendSeries::new(label, points).expect("steps increase with i");
    Ok((report, trend))
}

fn assemble(
    parameter: &str,
    values: &[usize],
    results: Vec<(MapcaReport, TrendSeries)>,
    cfg: &ExperimentConfig,
) -> SweepOutcome {
    let (rows, trends) = values
        .iter()
        .zip(results)
        .map(|(&value, (mapca, trend))| (SweepRow { value, mapca }, trend))
        .unzip();
    SweepOutcome {
        report: SweepReport {
            parameter: parameter.to_string(),
            rows,
            seed: cfg.seed,
            config_hash: cfg.hash(),
        },
        trends,
    }
}

/// Accuracy and trend per skip-sequence step, learning extent held fixed.
pub fn run_experiment2(cfg: &ExperimentConfig) -> Result<SweepOutcome, HarnessError> {
    cfg.validate()?;
    let data = cfg.load_dataset(DatasetSource::Synth)?;
    let enc = cfg.encoder();
    let chunks = encode_set(&data, enc)?;
    let results = cfg
        .sks_sweep
        .par_iter()
        .map(|&sks| sweep_point(&chunks, &cfg.dla, sks, enc, &format!("SKS={sks}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble("SKS", &cfg.sks_sweep, results, cfg))
}

/// Accuracy and trend per learning extent at the configured SKS (default 1).
pub fn run_experiment3(cfg: &ExperimentConfig) -> Result<SweepOutcome, HarnessError> {
    cfg.validate()?;
    let data = cfg.load_dataset(DatasetSource::Synth)?;
    let enc = cfg.encoder();
    let chunks = encode_set(&data, enc)?;
    let results = cfg
        .extent_sweep
        .par_iter()
        .map(|&l_ext| {
            let dla = DlaConfig {
                learning_extent: l_ext,
                ..cfg.dla.clone()
            };
            sweep_point(&chunks, &dla, cfg.sks, enc, &format!("l_ext={l_ext}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble("l_ext", &cfg.extent_sweep, results, cfg))
}

/// Writes `sweep.csv`, one `trend_<param>_<value>.csv` per row (plus `.svg`
/// when asked) and `config.txt`.
pub fn write_sweep(
    outcome: &SweepOutcome,
    cfg: &ExperimentConfig,
    dir: &Path,
    svg: bool,
) -> Result<(), HarnessError> {
    create_dir(dir)?;
    write_file(&dir.join("sweep.csv"), &outcome.report.to_csv())?;
    let tag = outcome.report.parameter.to_lowercase();
    for (row, trend) in outcome.report.rows.iter().zip(&outcome.trends) {
        let stem = format!("trend_{tag}_{}", row.value);
        write_file(&dir.join(format!("{stem}.csv")), &trend.to_csv())?;
        if svg {
            write_file(&dir.join(format!("{stem}.svg")), &trend.to_svg())?;
        }
    }
    write_file(&dir.join("config.txt"), &config_text(cfg))
}

/// Reads an unlabeled numeric matrix, one comma-separated row per line.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>, HarnessError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|_| {
                        HarnessError::Validation(format!(
                            "line {}: `{}` is not a number",
                            i + 1,
                            c.trim()
                        ))
                    })
                })
                .collect()
        })
        .collect()
}
