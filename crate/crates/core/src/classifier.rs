//! Prediction scoring and label assignment.

use thiserror::Error;

use crate::dataset::ExemplarSet;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty observation matrix")]
    Empty,
    #[error("tolerance must be finite and > 0, got {0}")]
    InvalidTolerance(f64),
    #[error("predicted arity {found} does not match reference arity {expected}")]
    ArityMismatch { expected: usize, found: usize },
}

/// Outcome of a MAPCA evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MapcaReport {
    /// Elements with `|y - yhat| < tol`.
    pub hits: usize,
    /// Total element count.
    pub n_z: usize,
    pub tol: f64,
    pub accuracy_percent: f64,
}

/// Mean absolute percentage classification accuracy over matching matrices.
///
/// Every element pair counts as a hit when `|y - yhat| < tol` (strictly);
/// the score is `100 * hits / n_z` with `n_z` the total element count.
pub fn mapca(y: &[Vec<f64>], yhat: &[Vec<f64>], tol: f64) -> Result<MapcaReport, ClassifierError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ClassifierError::InvalidTolerance(tol));
    }
    if y.len() != yhat.len() {
        return Err(ClassifierError::ShapeMismatch(format!(
            "{} observed rows vs {} predicted rows",
            y.len(),
            yhat.len()
        )));
    }
    let mut hits = 0;
    let mut n_z = 0;
    for (row, (obs, pred)) in y.iter().zip(yhat).enumerate() {
        if obs.len() != pred.len() {
            return Err(ClassifierError::ShapeMismatch(format!(
                "row {row}: {} observed vs {} predicted",
                obs.len(),
                pred.len()
            )));
        }
        hits += obs
            .iter()
            .zip(pred)
            .filter(|(a, b)| (*a - *b).abs() < tol)
            .count();
        n_z += obs.len();
    }
    if n_z == 0 {
        return Err(ClassifierError::Empty);
    }
    Ok(MapcaReport {
        hits,
        n_z,
        tol,
        accuracy_percent: 100.0 * hits as f64 / n_z as f64,
    })
}

/// Label of the reference exemplar nearest in L1; the earliest wins ties.
pub fn assign_label<'a>(
    predicted: &[f64],
    reference: &'a ExemplarSet,
) -> Result<&'a str, ClassifierError> {
    if reference.is_empty() {
        return Err(ClassifierError::Empty);
    }
    if predicted.len() != reference.arity() {
        return Err(ClassifierError::ArityMismatch {
            expected: reference.arity(),
            found: predicted.len(),
        });
    }
    let mut best: Option<(f64, &str)> = None;
    for ex in reference {
        let dist: f64 = ex
            .features()
            .iter()
            .zip(predicted)
            .map(|(a, b)| (a - b).abs())
            .sum();
        if best.is_none_or(|(d, _)| dist < d) {
            best = Some((dist, ex.label()));
        }
    }
    Ok(best.expect("nonempty reference").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{bundled_threat_sample, Exemplar};

    fn row(v: &[f64]) -> Vec<Vec<f64>> {
        vec![v.to_vec()]
    }

    #[test]
    fn mapca_cases() {
        let r = mapca(&row(&[1.0, 2.0, 3.0]), &row(&[1.0, 2.0, 3.0]), 0.05).unwrap();
        assert_eq!(r.accuracy_percent, 100.0);
        let r = mapca(
            &row(&[1.0, 2.0, 3.0, 4.0]),
            &row(&[1.01, 2.2, 3.0, 4.0]),
            0.05,
        )
        .unwrap();
        assert_eq!((r.hits, r.n_z), (3, 4));
        assert_eq!(r.accuracy_percent, 75.0);
        // |5.05 - 5| is 0.04999.. in binary; use values with an exact gap
        let r = mapca(&row(&[5.0]), &row(&[5.25]), 0.25).unwrap();
        assert_eq!(r.accuracy_percent, 0.0);
    }

    #[test]
    fn mapca_errors() {
        assert!(matches!(
            mapca(&row(&[1.0]), &row(&[1.0, 2.0]), 0.1),
            Err(ClassifierError::ShapeMismatch(_))
        ));
        assert!(matches!(
            mapca(&[vec![1.0]], &[], 0.1),
            Err(ClassifierError::ShapeMismatch(_))
        ));
        assert_eq!(mapca(&[], &[], 0.1), Err(ClassifierError::Empty));
        assert_eq!(
            mapca(&row(&[1.0]), &row(&[1.0]), 0.0),
            Err(ClassifierError::InvalidTolerance(0.0))
        );
    }

    #[test]
    fn labels_by_nearest_exemplar() {
        let sample = bundled_threat_sample();
        for ex in &sample {
            assert_eq!(assign_label(ex.features(), &sample).unwrap(), ex.label());
        }
        let digging = [25.97, 0.81, 9.37, 39.77, 6.61, 6.21, 7.91, 1.85, 1.47, 22.0];
        assert_eq!(assign_label(&digging, &sample).unwrap(), "Manual digging");
        assert!(matches!(
            assign_label(&[1.0], &sample),
            Err(ClassifierError::ArityMismatch {
                expected: 10,
                found: 1
            })
        ));
    }

    #[test]
    fn ties_go_to_earliest() {
        let set = ExemplarSet::new(vec![
            Exemplar::new("first", vec![0.0]).unwrap(),
            Exemplar::new("second", vec![10.0]).unwrap(),
            Exemplar::new("third", vec![4.0]).unwrap(),
        ])
        .unwrap();
        // distance 2 to #1 and #3
        assert_eq!(assign_label(&[2.0], &set).unwrap(), "first");
    }
}
