use pdla::dataset::{bundled_threat_sample, synth_incident_set};
use pdla::harness::{sweep_point, ExperimentConfig};
use pdla::representation::{encode, EncoderConfig, IntegerChunk};
use pdla::{DlaConfig, MemoryStore};

fn encoded(set: &pdla::ExemplarSet, enc: EncoderConfig) -> Vec<IntegerChunk> {
    set.iter()
        .map(|e| encode(e.features(), enc).unwrap())
        .collect()
}

#[test]
fn bundled_episode_recalls_first_row() {
    let enc = EncoderConfig::default();
    let chunks = encoded(&bundled_threat_sample(), enc);
    let mut store = MemoryStore::new(DlaConfig::default()).unwrap();
    let preds = store.run_episode(&chunks).unwrap();
    assert_eq!(preds.len(), 3);
    // only one chunk is in memory at the first prediction
    assert_eq!(preds[0].selected, chunks[0]);
    assert_eq!(store.len(), 4);
}

#[test]
fn sweep_point_needs_two_retained_chunks() {
    let enc = EncoderConfig::default();
    let chunks = encoded(&bundled_threat_sample(), enc);
    assert!(sweep_point(&chunks, &DlaConfig::default(), 4, enc, "x").is_err());
    let (report, trend) = sweep_point(&chunks, &DlaConfig::default(), 3, enc, "x").unwrap();
    assert_eq!(trend.points.len(), 1);
    assert_eq!(trend.points[0].0, 4);
    assert_eq!(report.n_z, chunks[0].len());
}

#[test]
fn trend_steps_follow_the_original_stream() {
    let enc = EncoderConfig::default();
    let chunks = encoded(&synth_incident_set(40, 10, 3, 7).unwrap(), enc);
    let (_, trend) = sweep_point(&chunks, &DlaConfig::default(), 5, enc, "s5").unwrap();
    let steps: Vec<u64> = trend.points.iter().map(|p| p.0).collect();
    assert_eq!(steps, vec![6, 11, 16, 21, 26, 31, 36]);
}

#[test]
fn changing_seed_changes_the_synthetic_run() {
    let a = ExperimentConfig::default();
    let b = ExperimentConfig {
        seed: 8,
        ..ExperimentConfig::default()
    };
    assert_ne!(a.hash(), b.hash());
    let ra = pdla::harness::run_experiment2(&a).unwrap();
    let rb = pdla::harness::run_experiment2(&b).unwrap();
    assert_ne!(ra.trends[0].points, rb.trends[0].points);
}
