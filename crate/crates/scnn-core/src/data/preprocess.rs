//! Row centering, pixel-range remapping, missing-pixel corruption,
//! additive Gaussian noise, and block-average downsampling.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, ScnnError};
use crate::tensor::{Matrix, SeededRng};

/// Subtracts each row's mean so every signal has zero mean.
pub fn center_rows(x: &Matrix) -> Matrix {
    let mut out = x.clone();
    let cols = x.cols() as f64;
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let mean: f64 = row.iter().sum::<f64>() / cols;
        for v in row {
            *v -= mean;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RemapReport {
    /// Input range was (near-)degenerate; output is the target midpoint.
    pub degenerate: bool,
    /// Input already sat inside [lo, hi]; likely a double remap.
    pub already_in_range: bool,
}

/// Affine map of the observed value range onto [lo, hi]: the data minimum
/// lands on `lo`, the maximum on `hi`. A constant input maps to the
/// midpoint; an input already inside [lo, hi] is flagged.
pub fn remap_pixels(x: &Matrix, lo: f64, hi: f64) -> (Matrix, RemapReport) {
    assert!(hi > lo, "target range must be non-empty");
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in x.data() {
        min = min.min(v);
        max = max.max(v);
    }
    let mut report = RemapReport::default();
    if min >= lo && max <= hi {
        report.already_in_range = true;
    }
    if max - min < 1e-12 {
        report.degenerate = true;
        let mid = (lo + hi) / 2.0;
        return (x.map(|_| mid), report);
    }
    let scale = (hi - lo) / (max - min);
    (x.map(|v| lo + (v - min) * scale), report)
}

/// Which pixels a corruption pass zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionMask {
    /// Row-major N×p flags, true where a pixel was zeroed.
    pub mask: Vec<bool>,
    pub rows: usize,
    pub cols: usize,
    pub fraction: f64,
    pub seed: u64,
}

impl CorruptionMask {
    pub fn is_zeroed(&self, r: usize, c: usize) -> bool {
        self.mask[r * self.cols + c]
    }
}

/// Zeroes exactly round(fraction·p) pixels per row, positions uniform
/// without replacement, independently per row.
pub fn corrupt_missing(
    x: &Matrix,
    fraction: f64,
    rng: &mut SeededRng,
) -> Result<(Matrix, CorruptionMask)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(ScnnError::InvalidParam(format!(
            "corruption fraction {fraction} outside [0, 1]"
        )));
    }
    let p = x.cols();
    let per_row = (fraction * p as f64).round() as usize;
    let mut out = x.clone();
    let mut mask = vec![false; x.rows() * p];
    let mut positions: Vec<usize> = (0..p).collect();
    for r in 0..x.rows() {
        // partial Fisher-Yates: the first per_row entries are the sample
        for i in 0..per_row {
            let j = rng.gen_range(i..p);
            positions.swap(i, j);
        }
        let row = out.row_mut(r);
        for &c in &positions[..per_row] {
            row[c] = 0.0;
            mask[r * p + c] = true;
        }
        positions.sort_unstable();
    }
    Ok((
        out,
        CorruptionMask {
            mask,
            rows: x.rows(),
            cols: p,
            fraction,
            seed: rng.seed(),
        },
    ))
}

/// Adds white Gaussian noise of standard deviation `sigma`.
pub fn add_gaussian_noise(x: &Matrix, sigma: f64, rng: &mut SeededRng) -> Result<Matrix> {
    if !(sigma >= 0.0) {
        return Err(ScnnError::InvalidParam(format!(
            "noise sigma {sigma} must be >= 0"
        )));
    }
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    let data = x
        .data()
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + sigma * z
        })
        .collect();
    Matrix::from_vec(x.rows(), x.cols(), data)
}

/// Block-averages each row (a side×side image) down by `factor`, e.g.
/// 28×28 → 14×14 with factor 2.
pub fn downsample_rows(x: &Matrix, side: usize, factor: usize) -> Result<Matrix> {
    if side * side != x.cols() {
        return Err(ScnnError::InvalidParam(format!(
            "rows of length {} are not {side}x{side} images",
            x.cols()
        )));
    }
    if factor == 0 || side % factor != 0 {
        return Err(ScnnError::InvalidParam(format!(
            "factor {factor} does not divide side {side}"
        )));
    }
    if factor == 1 {
        return Ok(x.clone());
    }
    let out_side = side / factor;
    let norm = 1.0 / (factor * factor) as f64;
    let mut out = Matrix::zeros(x.rows(), out_side * out_side);
    for n in 0..x.rows() {
        let row = x.row(n);
        let orow = out.row_mut(n);
        for br in 0..out_side {
            for bc in 0..out_side {
                let mut acc = 0.0;
                for dr in 0..factor {
                    for dc in 0..factor {
                        acc += row[(br * factor + dr) * side + bc * factor + dc];
                    }
                }
                orow[br * out_side + bc] = acc * norm;
            }
        }
    }
    Ok(out)
}
