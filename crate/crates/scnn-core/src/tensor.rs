//! Dense row-major matrices, norms, and seeded randomness.
//!
//! Signals live in rows: a dataset of N signals of dimension p is an N×p
//! matrix. All arithmetic is plain f64 with a fixed evaluation order, so any
//! computation is bit-reproducible for identical inputs.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ScnnError};

/// Dense f64 matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        assert!(rows > 0 && cols > 0, "matrix dims must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data, rejecting bad lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if rows == 0 || cols == 0 {
            return Err(ScnnError::InvalidParam(format!(
                "matrix dims must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(ScnnError::InvalidParam(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ScnnError::MalformedData(
                "matrix contains non-finite entries".into(),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Convenience constructor for fixtures.
    pub fn from_rows(rows: &[&[f64]]) -> Matrix {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Standard product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(ScnnError::ShapeMismatch {
                op: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in arow.iter().enumerate() {
                let brow = other.row(k);
                for (o, &bkj) in orow.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        }
        Ok(out)
    }

    /// `self * otherᵀ`; both operands row-major, so this is a dot product of
    /// contiguous rows and the fastest product we have.
    pub fn mul_nt(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(ScnnError::ShapeMismatch {
                op: "mul_nt",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out.data[i * other.rows..(i + 1) * other.rows];
            for (j, o) in orow.iter_mut().enumerate() {
                *o = dot(arow, other.row(j));
            }
        }
        Ok(out)
    }

    /// `selfᵀ * other`.
    pub fn mul_tn(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(ScnnError::ShapeMismatch {
                op: "mul_tn",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for i in 0..self.rows {
            let arow = self.row(i);
            let brow = other.row(i);
            for (k, &aik) in arow.iter().enumerate() {
                let orow = &mut out.data[k * other.cols..(k + 1) * other.cols];
                for (o, &bij) in orow.iter_mut().zip(brow) {
                    *o += aik * bij;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        self.map(|v| v * c)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ScnnError::ShapeMismatch {
                op,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.sq_sum().sqrt()
    }

    /// Sum of squared entries (squared Frobenius norm).
    pub fn sq_sum(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>()
    }

    /// Sum of absolute values of all entries.
    pub fn abs_sum(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            let v = self.data[i * self.cols + j];
            s += v * v;
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Largest eigenvalue of a symmetric PSD matrix by power iteration.
    ///
    /// The start vector is the normalized all-ones vector; if the iteration
    /// stagnates without meeting `tol` (the start can be orthogonal to the
    /// top eigenvector, or map into the kernel), a second deterministic
    /// start (an index ramp) is tried and the larger estimate wins. The
    /// estimate is clamped into the exact eigenvalue bracket for symmetric
    /// matrices, max_i a_ii ≤ λ_max ≤ max_i Σ_j |a_ij|, which also makes the
    /// result exact for diagonal input.
    pub fn spectral_norm(&self, tol: f64, max_iter: usize) -> Result<f64> {
        if self.rows != self.cols {
            return Err(ScnnError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let (est_a, ok_a) = self.power_iterate(&vec![1.0; n], tol, max_iter);
        let est = if ok_a {
            est_a
        } else {
            let ramp: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
            let (est_b, _) = self.power_iterate(&ramp, tol, max_iter);
            est_a.max(est_b)
        };
        let max_diag = (0..n).fold(0.0f64, |m, i| m.max(self.data[i * n + i]));
        let gershgorin = (0..n).fold(0.0f64, |m, i| {
            m.max(self.row(i).iter().map(|v| v.abs()).sum())
        });
        Ok(est.max(max_diag).min(gershgorin).max(0.0))
    }

    fn power_iterate(&self, start: &[f64], tol: f64, max_iter: usize) -> (f64, bool) {
        let norm0 = norm2(start);
        if norm0 == 0.0 {
            return (0.0, false);
        }
        let mut v: Vec<f64> = start.iter().map(|x| x / norm0).collect();
        let mut prev: Option<f64> = None;
        for _ in 0..max_iter {
            let av = self.matvec(&v);
            let lambda = dot(&av, &v);
            let av_norm = norm2(&av);
            if av_norm < 1e-300 {
                // start vector sits in the kernel; cannot make progress
                return (lambda.max(0.0), false);
            }
            if let Some(p) = prev {
                if (lambda - p).abs() <= tol * lambda.abs().max(1e-300) {
                    return (lambda, true);
                }
            }
            prev = Some(lambda);
            for (vi, &ai) in v.iter_mut().zip(&av) {
                *vi = ai / av_norm;
            }
        }
        (prev.unwrap_or(0.0), false)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Seeded, stream-stable random generator. Identical seed and call sequence
/// give identical output on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for a sub-task, per-task seed `seed ^ index`.
    pub fn derive(&self, index: u64) -> SeededRng {
        SeededRng::new(self.seed ^ index)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Matrix with entries drawn uniformly from [-1, 1], row-major draw order.
pub fn uniform_init(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
    assert!(rows > 0 && cols > 0, "matrix dims must be positive");
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    Matrix { rows, cols, data }
}
