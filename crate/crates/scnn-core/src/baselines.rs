//! Reference methods the network is measured against: PCA, a
//! Sparsenet-style dictionary learner whose inference re-runs optimization,
//! and an exact coordinate-descent solver for the convex code subproblem
//! (test oracle).

use crate::error::{Result, ScnnError};
use crate::model::{project_columns_unit_ball, soft_threshold};
use crate::tensor::{uniform_init, Matrix, SeededRng};

/// PCA basis fitted to row-signals.
#[derive(Debug, Clone)]
pub struct PcaModel {
    mean: Vec<f64>,
    /// p×k, orthonormal columns ordered by descending eigenvalue.
    components: Matrix,
}

impl PcaModel {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &Matrix {
        &self.components
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the orthonormal eigenvector columns, unordered.
fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let mut work = a.clone();
    let mut vectors = Matrix::identity(n);
    let scale = a.frobenius_norm().max(1e-300);
    for _sweep in 0..50 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += work.get(i, j) * work.get(i, j);
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = work.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (work.get(q, q) - work.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = work.get(k, p);
                    let akq = work.get(k, q);
                    work.set(k, p, c * akp - s * akq);
                    work.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = work.get(p, k);
                    let aqk = work.get(q, k);
                    work.set(p, k, c * apk - s * aqk);
                    work.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = vectors.get(k, p);
                    let vkq = vectors.get(k, q);
                    vectors.set(k, p, c * vkp - s * vkq);
                    vectors.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let values = (0..n).map(|i| work.get(i, i)).collect();
    (values, vectors)
}

fn column_means(x: &Matrix) -> Vec<f64> {
    let n = x.rows() as f64;
    let mut means = vec![0.0; x.cols()];
    for r in 0..x.rows() {
        for (m, v) in means.iter_mut().zip(x.row(r)) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    means
}

fn center_by(x: &Matrix, mean: &[f64]) -> Matrix {
    let mut out = x.clone();
    for r in 0..out.rows() {
        for (v, m) in out.row_mut(r).iter_mut().zip(mean) {
            *v -= m;
        }
    }
    out
}

/// Top-k principal directions of the mean-centered covariance.
///
/// Components are ordered by descending eigenvalue. Sign is pinned by making
/// the largest-magnitude entry of each component positive, so the fit is
/// deterministic.
pub fn pca_fit(x: &Matrix, k: usize) -> Result<PcaModel> {
    let (n, p) = (x.rows(), x.cols());
    if k == 0 || k > p {
        return Err(ScnnError::InvalidParam(format!(
            "component count k={k} must be in 1..={p}"
        )));
    }
    if n < 2 {
        return Err(ScnnError::InvalidParam(format!(
            "PCA needs at least 2 rows, got {n}"
        )));
    }
    let mean = column_means(x);
    let centered = center_by(x, &mean);
    let cov = centered.mul_tn(&centered)?.scale(1.0 / (n as f64 - 1.0));
    let (values, vectors) = symmetric_eigen(&cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("finite eigenvalues")
    });
    let mut components = Matrix::zeros(p, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        // sign convention: largest-magnitude entry positive
        let mut best = 0usize;
        for i in 1..p {
            if vectors.get(i, idx).abs() > vectors.get(best, idx).abs() {
                best = i;
            }
        }
        let flip = if vectors.get(best, idx) < 0.0 {
            -1.0
        } else {
            1.0
        };
        for i in 0..p {
            components.set(i, col, flip * vectors.get(i, idx));
        }
    }
    Ok(PcaModel { mean, components })
}

/// Coefficients of the centered signals in the principal basis, N×k.
pub fn pca_project(model: &PcaModel, x: &Matrix) -> Result<Matrix> {
    if x.cols() != model.components.rows() {
        return Err(ScnnError::ShapeMismatch {
            op: "pca_project",
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: model.components.rows(),
            right_cols: model.components.cols(),
        });
    }
    center_by(x, &model.mean).matmul(&model.components)
}

/// Projection onto the principal subspace mapped back to signal space.
pub fn pca_reconstruct(model: &PcaModel, x: &Matrix) -> Result<Matrix> {
    let coeffs = pca_project(model, x)?;
    let mut rec = coeffs.mul_nt(&model.components)?;
    for r in 0..rec.rows() {
        for (v, m) in rec.row_mut(r).iter_mut().zip(&model.mean) {
            *v += m;
        }
    }
    Ok(rec)
}

/// Sparsenet-style model: a dictionary plus the scale and weight of its
/// log(1+a²) sparsity penalty.
#[derive(Debug, Clone)]
pub struct SparsenetModel {
    dict: Matrix,
    sigma: f64,
    lambda: f64,
}

impl SparsenetModel {
    pub fn dict(&self) -> &Matrix {
        &self.dict
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SparsenetCaps {
    /// Outer alternations during fitting.
    pub outer_max: usize,
    /// Gradient steps per code phase (also the inference cap).
    pub code_max: usize,
    /// Gradient steps per dictionary phase.
    pub dict_max: usize,
    /// Relative energy-change stop tolerance.
    pub rtol: f64,
    pub seed: u64,
}

impl Default for SparsenetCaps {
    fn default() -> Self {
        SparsenetCaps {
            outer_max: 30,
            code_max: 80,
            dict_max: 80,
            rtol: 1e-6,
            seed: 0,
        }
    }
}

/// 0.5‖X − U·Dᵀ‖² + λ·Σ log(1 + (u/σ)²).
pub fn sparsenet_energy(x: &Matrix, codes: &Matrix, dict: &Matrix, lambda: f64, sigma: f64) -> f64 {
    let residual = x.sub(&codes.mul_nt(dict).expect("dims")).expect("dims");
    let penalty: f64 = codes
        .data()
        .iter()
        .map(|&u| {
            let a = u / sigma;
            (1.0 + a * a).ln()
        })
        .sum();
    0.5 * residual.sq_sum() + lambda * penalty
}

/// Gradient of the Sparsenet energy with respect to the codes:
/// −(X − U·Dᵀ)·D + 2λu/(σ² + u²) entrywise.
pub fn sparsenet_code_grad(
    x: &Matrix,
    codes: &Matrix,
    dict: &Matrix,
    lambda: f64,
    sigma: f64,
) -> Matrix {
    let residual = x.sub(&codes.mul_nt(dict).expect("dims")).expect("dims");
    let mut grad = residual.matmul(dict).expect("dims").scale(-1.0);
    for r in 0..grad.rows() {
        let crow = codes.row(r);
        for (g, &u) in grad.row_mut(r).iter_mut().zip(crow) {
            *g += 2.0 * lambda * u / (sigma * sigma + u * u);
        }
    }
    grad
}

/// Backtracking gradient descent: each step halves until the energy does
/// not increase, and the accepted step size seeds the next iteration.
/// Returns the final iterate and the energy at every visited iterate.
fn line_search_descend(
    start: &Matrix,
    max_iter: usize,
    rtol: f64,
    energy: impl Fn(&Matrix) -> f64,
    gradient: impl Fn(&Matrix) -> Matrix,
    project: impl Fn(Matrix) -> Matrix,
) -> (Matrix, Vec<f64>) {
    let mut current = start.clone();
    let mut f = energy(&current);
    let mut history = vec![f];
    let mut step = 1.0;
    for _ in 0..max_iter {
        let grad = gradient(&current);
        let gnorm = grad.max_abs();
        if gnorm <= 1e-15 {
            break;
        }
        let mut accepted = None;
        for _ in 0..50 {
            let candidate = project(current.sub(&grad.scale(step)).expect("dims"));
            let fc = energy(&candidate);
            if fc <= f {
                accepted = Some((candidate, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, fc)) = accepted else {
            break;
        };
        let change = (f - fc).abs() / f.abs().max(1e-12);
        current = candidate;
        f = fc;
        history.push(f);
        step *= 2.0;
        if change < rtol {
            break;
        }
    }
    (current, history)
}

/// Energy after initialization and after each alternation of a fit.
#[derive(Debug, Clone)]
pub struct SparsenetReport {
    pub alternation_energies: Vec<f64>,
}

/// Alternating minimization of the Sparsenet energy: codes by backtracking
/// gradient descent with the dictionary fixed, then the dictionary likewise
/// with columns clipped to the unit ball. The energy never increases across
/// alternations.
pub fn sparsenet_fit(
    x: &Matrix,
    atoms: usize,
    lambda: f64,
    sigma: f64,
    caps: SparsenetCaps,
) -> Result<(SparsenetModel, SparsenetReport)> {
    if atoms == 0 {
        return Err(ScnnError::InvalidParam("atoms must be >= 1".into()));
    }
    if !(sigma > 0.0) {
        return Err(ScnnError::InvalidParam(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let (n, p) = (x.rows(), x.cols());
    let mut rng = SeededRng::new(caps.seed);
    let mut codes = uniform_init(n, atoms, &mut rng);
    let mut dict = project_columns_unit_ball(&uniform_init(p, atoms, &mut rng));
    let mut prev = sparsenet_energy(x, &codes, &dict, lambda, sigma);
    let mut alternation_energies = vec![prev];
    for _ in 0..caps.outer_max {
        codes = line_search_descend(
            &codes,
            caps.code_max,
            caps.rtol,
            |u| sparsenet_energy(x, u, &dict, lambda, sigma),
            |u| sparsenet_code_grad(x, u, &dict, lambda, sigma),
            |u| u,
        )
        .0;
        dict = line_search_descend(
            &dict,
            caps.dict_max,
            caps.rtol,
            |d| sparsenet_energy(x, &codes, d, lambda, sigma),
            |d| {
                let residual = x.sub(&codes.mul_nt(d).expect("dims")).expect("dims");
                residual.mul_tn(&codes).expect("dims").scale(-1.0)
            },
            |d| project_columns_unit_ball(&d),
        )
        .0;
        let energy = sparsenet_energy(x, &codes, &dict, lambda, sigma);
        if !energy.is_finite() {
            return Err(ScnnError::NonFiniteEnergy {
                step: "sparsenet alternation".into(),
            });
        }
        alternation_energies.push(energy);
        if (prev - energy).abs() / prev.abs().max(1e-12) < caps.rtol {
            break;
        }
        prev = energy;
    }
    Ok((
        SparsenetModel {
            dict,
            sigma,
            lambda,
        },
        SparsenetReport {
            alternation_energies,
        },
    ))
}

/// Test-time inference: re-runs code optimization from zero codes with the
/// dictionary fixed. This is the per-input learning process a linear
/// encoder avoids. Returns the codes and the objective history.
pub fn sparsenet_infer(
    model: &SparsenetModel,
    x: &Matrix,
    caps: SparsenetCaps,
) -> Result<(Matrix, Vec<f64>)> {
    if x.cols() != model.dict.rows() {
        return Err(ScnnError::ShapeMismatch {
            op: "sparsenet_infer",
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: model.dict.rows(),
            right_cols: model.dict.cols(),
        });
    }
    let codes0 = Matrix::zeros(x.rows(), model.dict.cols());
    Ok(line_search_descend(
        &codes0,
        caps.code_max,
        caps.rtol,
        |u| sparsenet_energy(x, u, &model.dict, model.lambda, model.sigma),
        |u| sparsenet_code_grad(x, u, &model.dict, model.lambda, model.sigma),
        |u| u,
    ))
}

/// Exact coordinate descent for the convex per-row code subproblem
///   (1/p)‖x − D·uᵀ‖² + (1/m)‖u − t‖² + (2λ/m)‖u‖₁
/// iterated until the largest coordinate change drops below 1e-12. Each
/// coordinate update is the closed-form scalar soft-threshold solve. Only
/// meant as a test oracle, hence the m ≤ 10 guard.
pub fn lasso_oracle(
    x_row: &[f64],
    dict: &Matrix,
    target_row: &[f64],
    lambda: f64,
) -> Result<Vec<f64>> {
    let p = dict.rows();
    let m = dict.cols();
    if m > 10 {
        return Err(ScnnError::InvalidParam(format!(
            "lasso oracle is for tests only, m={m} exceeds 10"
        )));
    }
    if x_row.len() != p {
        return Err(ScnnError::LengthMismatch {
            what: "lasso oracle signal",
            left: x_row.len(),
            right: p,
        });
    }
    if target_row.len() != m {
        return Err(ScnnError::LengthMismatch {
            what: "lasso oracle target",
            left: target_row.len(),
            right: m,
        });
    }
    let pf = p as f64;
    let mf = m as f64;
    let col_sq: Vec<f64> = (0..m)
        .map(|k| (0..p).map(|i| dict.get(i, k).powi(2)).sum())
        .collect();
    let mut u = vec![0.0; m];
    // residual r = x − D·uᵀ, maintained incrementally
    let mut residual: Vec<f64> = x_row.to_vec();
    let shrink = 2.0 * lambda / mf;
    for _sweep in 0..200_000 {
        let mut max_change = 0.0f64;
        for k in 0..m {
            let old = u[k];
            let mut dot = 0.0;
            for i in 0..p {
                dot += (residual[i] + dict.get(i, k) * old) * dict.get(i, k);
            }
            let linear = 2.0 / pf * dot + 2.0 / mf * target_row[k];
            let quad = 2.0 / pf * col_sq[k] + 2.0 / mf;
            let new = soft_threshold(linear, shrink) / quad;
            if new != old {
                for i in 0..p {
                    residual[i] += dict.get(i, k) * (old - new);
                }
                u[k] = new;
            }
            max_change = max_change.max((new - old).abs());
        }
        if max_change < 1e-12 {
            break;
        }
    }
    Ok(u)
}
