//! Linear multi-class classifier head for sparse codes: one-vs-rest
//! L2-regularized hinge loss trained by deterministic epoch-based
//! subgradient descent (step 1/(reg·t) at update t).

use rand::Rng;

use crate::error::{Result, ScnnError};
use crate::tensor::{dot, Matrix, SeededRng};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    /// K×m, one weight row per class.
    weights: Matrix,
    biases: Vec<f64>,
    reg: f64,
}

impl LinearClassifier {
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn reg(&self) -> f64 {
        self.reg
    }

    pub fn classes(&self) -> usize {
        self.weights.rows()
    }
}

#[derive(Debug, Clone)]
pub struct SvmTrainReport {
    /// Sum over classes of the one-vs-rest objective after each epoch.
    pub epoch_objectives: Vec<f64>,
    /// Objective of the returned (best-epoch) parameters.
    pub best_objective: f64,
    /// Classes with no training examples; they are still trained against
    /// the rest, but the caller should treat them as a warning.
    pub empty_classes: Vec<usize>,
}

fn binary_objective(codes: &Matrix, y: &[f64], w: &[f64], b: f64, reg: f64) -> f64 {
    let n = codes.rows() as f64;
    let hinge: f64 = (0..codes.rows())
        .map(|i| (1.0 - y[i] * (dot(w, codes.row(i)) + b)).max(0.0))
        .sum();
    // the bias is a regularized augmented weight
    0.5 * reg * (w.iter().map(|v| v * v).sum::<f64>() + b * b) + hinge / n
}

/// Trains K one-vs-rest hinge classifiers with Pegasos-style subgradient
/// steps and a fixed per-seed shuffle; the parameters from the epoch with
/// the lowest objective are kept, so the returned objective never exceeds
/// the first epoch's.
pub fn svm_fit(
    codes: &Matrix,
    labels: &[u8],
    classes: usize,
    reg: f64,
    epochs: usize,
    seed: u64,
) -> Result<(LinearClassifier, SvmTrainReport)> {
    let n = codes.rows();
    let m = codes.cols();
    if labels.len() != n {
        return Err(ScnnError::LengthMismatch {
            what: "svm labels",
            left: labels.len(),
            right: n,
        });
    }
    if classes < 2 {
        return Err(ScnnError::InvalidParam("need at least 2 classes".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l as usize >= classes) {
        return Err(ScnnError::InvalidParam(format!(
            "label {bad} outside 0..{classes}"
        )));
    }
    if n < classes {
        return Err(ScnnError::InvalidParam(format!(
            "need at least {classes} rows, got {n}"
        )));
    }
    if !(reg > 0.0) || epochs == 0 {
        return Err(ScnnError::InvalidParam(
            "reg must be > 0 and epochs >= 1".into(),
        ));
    }

    let mut counts = vec![0usize; classes];
    for &l in labels {
        counts[l as usize] += 1;
    }
    let empty_classes: Vec<usize> = (0..classes).filter(|&c| counts[c] == 0).collect();

    let mut weights = Matrix::zeros(classes, m);
    let mut biases = vec![0.0; classes];
    let mut epoch_objectives = vec![0.0; epochs];
    let mut best_objective = 0.0;

    for class in 0..classes {
        let mut rng = SeededRng::new(seed ^ class as u64);
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l as usize == class { 1.0 } else { -1.0 })
            .collect();
        let mut w = vec![0.0; m];
        let mut b = 0.0;
        let mut t: u64 = 0;
        let mut order: Vec<usize> = (0..n).collect();
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        for epoch in 0..epochs {
            // Fisher-Yates from the per-class stream
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            for &i in &order {
                t += 1;
                let eta = 1.0 / (reg * t as f64);
                let row = codes.row(i);
                let margin = y[i] * (dot(&w, row) + b);
                let decay = 1.0 - eta * reg;
                for v in &mut w {
                    *v *= decay;
                }
                b *= decay;
                if margin < 1.0 {
                    for (v, &xi) in w.iter_mut().zip(row) {
                        *v += eta * y[i] * xi;
                    }
                    b += eta * y[i];
                }
            }
            let obj = binary_objective(codes, &y, &w, b, reg);
            epoch_objectives[epoch] += obj;
            if best.as_ref().map_or(true, |(f, _, _)| obj < *f) {
                best = Some((obj, w.clone(), b));
            }
        }
        let (obj, bw, bb) = best.expect("epochs >= 1");
        best_objective += obj;
        weights.row_mut(class).copy_from_slice(&bw);
        biases[class] = bb;
    }

    Ok((
        LinearClassifier {
            weights,
            biases,
            reg,
        },
        SvmTrainReport {
            epoch_objectives,
            best_objective,
            empty_classes,
        },
    ))
}

/// argmax of the class scores w_k·u + b_k, ties resolved toward the lowest
/// class index.
pub fn svm_predict(model: &LinearClassifier, codes: &Matrix) -> Result<Vec<u8>> {
    if codes.cols() != model.weights.cols() {
        return Err(ScnnError::ShapeMismatch {
            op: "svm_predict",
            left_rows: codes.rows(),
            left_cols: codes.cols(),
            right_rows: model.weights.rows(),
            right_cols: model.weights.cols(),
        });
    }
    let mut out = Vec::with_capacity(codes.rows());
    for i in 0..codes.rows() {
        let row = codes.row(i);
        let mut best_class = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for class in 0..model.weights.rows() {
            let score = dot(model.weights.row(class), row) + model.biases[class];
            if score > best_score {
                best_score = score;
                best_class = class;
            }
        }
        out.push(best_class as u8);
    }
    Ok(out)
}
