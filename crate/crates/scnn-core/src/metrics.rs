//! Evaluation quantities: RMS reconstruction error, thresholded sparsity,
//! sparsity area, and classification accuracy.

use crate::error::{Result, ScnnError};
use crate::tensor::Matrix;

/// sqrt of the mean squared entrywise difference.
pub fn rms_error(x: &Matrix, x_rec: &Matrix) -> Result<f64> {
    if x.rows() != x_rec.rows() || x.cols() != x_rec.cols() {
        return Err(ScnnError::ShapeMismatch {
            op: "rms_error",
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: x_rec.rows(),
            right_cols: x_rec.cols(),
        });
    }
    let count = (x.rows() * x.cols()) as f64;
    Ok((x.sub(x_rec)?.sq_sum() / count).sqrt())
}

/// Fraction of code entries at or below a magnitude threshold:
/// 1 − #{|u| > th} / (n·m). Entries exactly at the threshold count as
/// sparse (strict inequality), so exact zeros are always sparse.
pub fn sparsity_value(codes: &Matrix, th: f64) -> f64 {
    let total = (codes.rows() * codes.cols()) as f64;
    let above = codes.data().iter().filter(|v| v.abs() > th).count() as f64;
    1.0 - above / total
}

/// Sparsity values sampled over an ascending threshold grid.
#[derive(Debug, Clone)]
pub struct SparsityCurve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

/// Samples the sparsity value on `points` equispaced thresholds covering
/// [0, 0.5].
pub fn sparsity_curve(codes: &Matrix, points: usize) -> SparsityCurve {
    assert!(points >= 2, "need at least two curve points");
    let thresholds: Vec<f64> = (0..points)
        .map(|i| 0.5 * i as f64 / (points - 1) as f64)
        .collect();
    let values = thresholds
        .iter()
        .map(|&th| sparsity_value(codes, th))
        .collect();
    SparsityCurve { thresholds, values }
}

fn validate_curve(curve: &SparsityCurve) -> Result<()> {
    if curve.thresholds.len() != curve.values.len() {
        return Err(ScnnError::LengthMismatch {
            what: "sparsity curve",
            left: curve.thresholds.len(),
            right: curve.values.len(),
        });
    }
    if curve.thresholds.len() < 2 {
        return Err(ScnnError::InvalidParam(
            "sparsity curve needs at least 2 points".into(),
        ));
    }
    if curve.thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScnnError::InvalidParam(
            "sparsity curve thresholds must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Trapezoidal integral of the curve, normalized by the threshold span so a
/// constant curve integrates to its value.
pub fn sparsity_area(curve: &SparsityCurve) -> Result<f64> {
    let raw = sparsity_area_raw(curve)?;
    let span = curve.thresholds.last().unwrap() - curve.thresholds[0];
    Ok(raw / span)
}

/// Unnormalized trapezoidal integral of the curve.
pub fn sparsity_area_raw(curve: &SparsityCurve) -> Result<f64> {
    validate_curve(curve)?;
    let mut area = 0.0;
    for i in 1..curve.thresholds.len() {
        let dt = curve.thresholds[i] - curve.thresholds[i - 1];
        area += dt * (curve.values[i] + curve.values[i - 1]) * 0.5;
    }
    Ok(area)
}

/// Fraction of matching labels.
pub fn accuracy(pred: &[u8], truth: &[u8]) -> Result<f64> {
    if pred.is_empty() {
        return Err(ScnnError::EmptyInput("accuracy over empty labels".into()));
    }
    if pred.len() != truth.len() {
        return Err(ScnnError::LengthMismatch {
            what: "accuracy labels",
            left: pred.len(),
            right: truth.len(),
        });
    }
    let correct = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / pred.len() as f64)
}

pub fn error_rate(pred: &[u8], truth: &[u8]) -> Result<f64> {
    Ok(1.0 - accuracy(pred, truth)?)
}
