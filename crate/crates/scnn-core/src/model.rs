//! The sparse-coding network: energy, gradients, proximal code updates,
//! closed-form learning rates, the alternating training loop, and the
//! trained linear encoder/decoder.
//!
//! The model couples three blocks over a data matrix X (N×p):
//!   - codes U (N×m), one sparse code per signal,
//!   - a reconstruction dictionary (p×m, columns constrained to the unit
//!     ball) decoding codes back to signals,
//!   - a projection dictionary (m×p) encoding signals to codes in one
//!     linear step.
//!
//! Training minimizes
//!   (1/p)‖X − U·Dᵀ‖² + (1/m)‖U − X·Cᵀ‖² + (2λ/m)·Σ|u|
//! by alternating a proximal (soft-threshold) update of U with projected
//! gradient updates of the two dictionaries.

use crate::error::{Result, ScnnError};
use crate::tensor::{uniform_init, Matrix, SeededRng};

/// Which magnitude the proximal step shrinks by.
///
/// `Consistent` uses eta_u·(2λ/m), the proximal operator of the actual
/// l1 weight in the energy. `LiteralLambda` shrinks by λ itself, matching a
/// literal reading of the update rule; kept for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    #[default]
    Consistent,
    LiteralLambda,
}

/// How the learning-rate denominators are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RateOpts {
    /// Use the Frobenius norm instead of the spectral norm for the code
    /// learning rate denominator.
    pub eta_u_frobenius: bool,
    /// Use squared Frobenius norms of the Gram matrices for the dictionary
    /// learning rates instead of their spectral norms. The spectral form is
    /// the step 1/L for the exact Lipschitz constant L and is the default;
    /// the squared-Frobenius form is kept for replication runs.
    pub verbatim_gram_rates: bool,
}

#[derive(Debug, Clone)]
pub struct Hyperparams {
    /// Sparsity weight λ ≥ 0.
    pub lambda: f64,
    /// Number of atoms m (hidden nodes).
    pub atoms: usize,
    /// Outer iteration cap.
    pub t_max: usize,
    /// Inner iteration caps for the code / dictionary / projection phases.
    pub inner_u_max: usize,
    pub inner_d_max: usize,
    pub inner_c_max: usize,
    /// Outer stop tolerance on the relative change of the feed-forward error.
    pub rtol: f64,
    /// Inner stop tolerance on the relative change of each phase objective.
    pub inner_rtol: f64,
    pub seed: u64,
    pub threshold_mode: ThresholdMode,
    pub rate_opts: RateOpts,
}

impl Hyperparams {
    pub fn new(lambda: f64, atoms: usize, seed: u64) -> Hyperparams {
        Hyperparams {
            lambda,
            atoms,
            t_max: 50,
            inner_u_max: 1000,
            inner_d_max: 500,
            inner_c_max: 500,
            rtol: 1e-4,
            inner_rtol: 1e-6,
            seed,
            threshold_mode: ThresholdMode::Consistent,
            rate_opts: RateOpts::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ScnnError::InvalidParam(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if self.atoms == 0 {
            return Err(ScnnError::InvalidParam("atoms must be >= 1".into()));
        }
        if self.t_max == 0
            || self.inner_u_max == 0
            || self.inner_d_max == 0
            || self.inner_c_max == 0
        {
            return Err(ScnnError::InvalidParam(
                "iteration caps must be >= 1".into(),
            ));
        }
        if !(self.rtol > 0.0) || !(self.inner_rtol >= 0.0) {
            return Err(ScnnError::InvalidParam(
                "rtol must be > 0 and inner_rtol >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// A trained network: decoder dictionary, encoder dictionary, and the λ it
/// was trained with (reused as the encode-time shrinkage).
#[derive(Debug, Clone, PartialEq)]
pub struct ScnnModel {
    reconstruction: Matrix,
    projection: Matrix,
    lambda: f64,
}

impl ScnnModel {
    pub fn new(reconstruction: Matrix, projection: Matrix, lambda: f64) -> Result<ScnnModel> {
        if reconstruction.rows() != projection.cols() || reconstruction.cols() != projection.rows()
        {
            return Err(ScnnError::ShapeMismatch {
                op: "ScnnModel::new",
                left_rows: reconstruction.rows(),
                left_cols: reconstruction.cols(),
                right_rows: projection.rows(),
                right_cols: projection.cols(),
            });
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(ScnnError::InvalidParam(format!(
                "model lambda must be finite and >= 0, got {lambda}"
            )));
        }
        for j in 0..reconstruction.cols() {
            let norm = reconstruction.col_norm(j);
            if norm > 1.0 + 1e-12 {
                return Err(ScnnError::InvalidParam(format!(
                    "reconstruction dictionary column {j} has norm {norm} > 1"
                )));
            }
        }
        Ok(ScnnModel {
            reconstruction,
            projection,
            lambda,
        })
    }

    /// Decoder weights, p×m.
    pub fn reconstruction(&self) -> &Matrix {
        &self.reconstruction
    }

    /// Encoder weights, m×p.
    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Signal dimension p.
    pub fn signal_dim(&self) -> usize {
        self.reconstruction.rows()
    }

    /// Atom count m.
    pub fn atom_count(&self) -> usize {
        self.reconstruction.cols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    /// Reconstruction + code-agreement quadratic terms.
    pub e1: f64,
    /// Sparsity term (2λ/m)·Σ|u|.
    pub e2: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIterations,
}

/// Energy values recorded after one outer training step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEnergy {
    pub step: usize,
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
    /// Feed-forward error (1/p)‖X − X·Cᵀ·Dᵀ‖², the quantity the outer stop
    /// condition watches.
    pub feedforward: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub outer_steps_run: usize,
    pub final_energy: f64,
    /// Feed-forward error per outer step.
    pub energy_history: Vec<f64>,
    pub stopped_by: StopReason,
    pub step_records: Vec<StepEnergy>,
    /// Codes for the training set at the last outer step.
    pub final_codes: Matrix,
}

/// Per-phase iterate objectives, for convergence diagnostics and tests.
#[derive(Debug, Clone)]
pub struct UpdateTrace {
    /// Objective at every visited iterate, including the last.
    pub objectives: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

/// sign(v)·max(|v|−lambda, 0).
#[inline]
pub fn soft_threshold(v: f64, lambda: f64) -> f64 {
    let mag = v.abs() - lambda;
    if mag > 0.0 {
        v.signum() * mag
    } else {
        0.0
    }
}

/// Rescales every column with L2 norm above 1 back onto the unit sphere;
/// columns already inside the ball are untouched.
pub fn project_columns_unit_ball(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for j in 0..m.cols() {
        let norm = m.col_norm(j);
        if norm > 1.0 {
            let inv = 1.0 / norm;
            for i in 0..m.rows() {
                out.set(i, j, out.get(i, j) * inv);
            }
        }
    }
    out
}

/// Full energy split into its smooth part e1 and sparsity part e2.
pub fn energy(
    x: &Matrix,
    codes: &Matrix,
    dict: &Matrix,
    proj: &Matrix,
    lambda: f64,
) -> Result<EnergyTerms> {
    let p = x.cols() as f64;
    let m = codes.cols() as f64;
    let recon_residual = x.sub(&codes.mul_nt(dict)?)?;
    let code_residual = codes.sub(&x.mul_nt(proj)?)?;
    let e1 = recon_residual.sq_sum() / p + code_residual.sq_sum() / m;
    let e2 = 2.0 * lambda / m * codes.abs_sum();
    Ok(EnergyTerms {
        e1,
        e2,
        total: e1 + e2,
    })
}

/// Gradient of the smooth energy part with respect to the codes:
/// −(2/p)·(X − U·Dᵀ)·D + (2/m)·(U − X·Cᵀ).
pub fn code_grad_smooth(
    x: &Matrix,
    codes: &Matrix,
    dict: &Matrix,
    proj: &Matrix,
) -> Result<Matrix> {
    let p = x.cols() as f64;
    let m = codes.cols() as f64;
    let recon_residual = x.sub(&codes.mul_nt(dict)?)?;
    let code_residual = codes.sub(&x.mul_nt(proj)?)?;
    recon_residual
        .matmul(dict)?
        .scale(-2.0 / p)
        .add(&code_residual.scale(2.0 / m))
}

/// Gradient of the reconstruction term with respect to the dictionary:
/// −(2/p)·(X − U·Dᵀ)ᵀ·U.
pub fn dict_grad(x: &Matrix, codes: &Matrix, dict: &Matrix) -> Result<Matrix> {
    let p = x.cols() as f64;
    let recon_residual = x.sub(&codes.mul_nt(dict)?)?;
    Ok(recon_residual.mul_tn(codes)?.scale(-2.0 / p))
}

/// Gradient of the code-agreement term with respect to the projection:
/// −(2/m)·(U − X·Cᵀ)ᵀ·X.
pub fn proj_grad(x: &Matrix, codes: &Matrix, proj: &Matrix) -> Result<Matrix> {
    let m = codes.cols() as f64;
    let code_residual = codes.sub(&x.mul_nt(proj)?)?;
    Ok(code_residual.mul_tn(x)?.scale(-2.0 / m))
}

#[derive(Debug, Clone, Copy)]
pub struct LearningRates {
    pub eta_u: f64,
    pub eta_d: f64,
    pub eta_c: f64,
    /// True when a degenerate denominator was clamped at 1e-12.
    pub clamped: bool,
}

fn guarded_rate(numerator: f64, denominator: f64) -> (f64, bool) {
    if denominator < 1e-12 {
        (numerator / 1e-12, true)
    } else {
        (numerator / denominator, false)
    }
}

/// Norm statistic of a symmetric PSD Gram matrix, per the configured mode.
fn gram_stat(gram: &Matrix, verbatim_squared_frobenius: bool) -> f64 {
    if verbatim_squared_frobenius {
        gram.sq_sum()
    } else {
        gram.spectral_norm(1e-12, 1000)
            .expect("gram matrix is square")
    }
}

pub(crate) fn code_rate(dict: &Matrix, opts: RateOpts) -> (f64, bool) {
    let p = dict.rows() as f64;
    let m = dict.cols();
    let gram = dict.mul_tn(dict).expect("same matrix");
    let mut h = gram.scale(1.0 / p);
    let diag_add = 1.0 / m as f64;
    for k in 0..m {
        h.set(k, k, h.get(k, k) + diag_add);
    }
    let norm = if opts.eta_u_frobenius {
        h.frobenius_norm()
    } else {
        h.spectral_norm(1e-12, 1000).expect("square")
    };
    guarded_rate(1.0, 2.0 * norm)
}

pub(crate) fn dict_rate(codes: &Matrix, p: usize, opts: RateOpts) -> (f64, bool) {
    let gram = codes.mul_tn(codes).expect("same matrix");
    guarded_rate(p as f64, 2.0 * gram_stat(&gram, opts.verbatim_gram_rates))
}

pub(crate) fn proj_rate_stat(x: &Matrix, opts: RateOpts) -> f64 {
    let gram = x.mul_tn(x).expect("same matrix");
    gram_stat(&gram, opts.verbatim_gram_rates)
}

/// Closed-form step sizes for the three phases:
///   eta_u = 1 / (2‖(1/p)·DᵀD + (1/m)·I‖)
///   eta_d = p / (2‖UᵀU‖)
///   eta_c = m / (2‖XᵀX‖)
/// with the norms per `opts`. Denominators below 1e-12 are clamped and
/// flagged.
pub fn learning_rates(x: &Matrix, codes: &Matrix, dict: &Matrix, opts: RateOpts) -> LearningRates {
    let p = x.cols();
    let m = dict.cols();
    let (eta_u, c1) = code_rate(dict, opts);
    let (eta_d, c2) = dict_rate(codes, p, opts);
    let (eta_c, c3) = guarded_rate(m as f64, 2.0 * proj_rate_stat(x, opts));
    LearningRates {
        eta_u,
        eta_d,
        eta_c,
        clamped: c1 || c2 || c3,
    }
}

#[inline]
fn rel_change(prev: f64, cur: f64) -> f64 {
    (cur - prev).abs() / prev.abs().max(1e-12)
}

/// Proximal (ISTA) update of the codes with the dictionaries fixed.
///
/// Each step takes a gradient step on the smooth part and then shrinks
/// entrywise; with the closed-form eta_u the tracked objective e1+e2 never
/// increases. Stops when its relative change drops below `rtol` or after
/// `max_iter` steps.
pub fn update_codes(
    x: &Matrix,
    codes0: &Matrix,
    dict: &Matrix,
    proj: &Matrix,
    lambda: f64,
    eta_u: f64,
    max_iter: usize,
    rtol: f64,
    mode: ThresholdMode,
) -> (Matrix, UpdateTrace) {
    assert!(eta_u > 0.0, "eta_u must be positive");
    let p = x.cols() as f64;
    let m = codes0.cols() as f64;
    let l1_weight = 2.0 * lambda / m;
    let threshold = match mode {
        ThresholdMode::Consistent => eta_u * l1_weight,
        ThresholdMode::LiteralLambda => lambda,
    };
    let targets = x.mul_nt(proj).expect("proj dims");
    let mut codes = codes0.clone();
    let mut objectives = Vec::new();
    let mut steps = 0;
    let mut converged = false;
    loop {
        let recon_residual = x
            .sub(&codes.mul_nt(dict).expect("dict dims"))
            .expect("dims");
        let code_residual = codes.sub(&targets).expect("dims");
        let objective =
            recon_residual.sq_sum() / p + code_residual.sq_sum() / m + l1_weight * codes.abs_sum();
        if let Some(&prev) = objectives.last() {
            if rel_change(prev, objective) < rtol {
                objectives.push(objective);
                converged = true;
                break;
            }
        }
        objectives.push(objective);
        if steps >= max_iter {
            break;
        }
        let grad = recon_residual
            .matmul(dict)
            .expect("dims")
            .scale(-2.0 / p)
            .add(&code_residual.scale(2.0 / m))
            .expect("dims");
        let mut next = codes.clone();
        for r in 0..next.rows() {
            let g = grad.row(r);
            let row = next.row_mut(r);
            for (v, &gv) in row.iter_mut().zip(g) {
                *v = soft_threshold(*v - eta_u * gv, threshold);
            }
        }
        codes = next;
        steps += 1;
    }
    (
        codes,
        UpdateTrace {
            objectives,
            steps,
            converged,
        },
    )
}

/// One monitored phase of projected gradient descent.
///
/// `objective` scores an iterate, `gradient` differentiates it, `project`
/// maps a raw step back to the feasible set. If a raw step would increase
/// the objective (possible only when the supplied rate overshoots the true
/// Lipschitz step, e.g. in verbatim-rate mode) the step is halved until it
/// descends.
fn descend(
    start: &Matrix,
    eta: f64,
    max_iter: usize,
    rtol: f64,
    objective: impl Fn(&Matrix) -> f64,
    gradient: impl Fn(&Matrix) -> Matrix,
    project: impl Fn(Matrix) -> Matrix,
) -> (Matrix, UpdateTrace) {
    assert!(eta > 0.0, "learning rate must be positive");
    let mut current = start.clone();
    let mut objectives = Vec::new();
    let mut steps = 0;
    let mut converged = false;
    loop {
        let f = objective(&current);
        if let Some(&prev) = objectives.last() {
            if rel_change(prev, f) < rtol {
                objectives.push(f);
                converged = true;
                break;
            }
        }
        objectives.push(f);
        if steps >= max_iter {
            break;
        }
        let grad = gradient(&current);
        let mut step = eta;
        let mut candidate = current.sub(&grad.scale(step)).expect("dims");
        let mut halvings = 0;
        while objective(&candidate) > f + 1e-12 * f.max(1.0) && halvings < 60 {
            step *= 0.5;
            candidate = current.sub(&grad.scale(step)).expect("dims");
            halvings += 1;
        }
        current = project(candidate);
        steps += 1;
    }
    (
        current,
        UpdateTrace {
            objectives,
            steps,
            converged,
        },
    )
}

/// Projected gradient update of the reconstruction dictionary with the
/// codes fixed; every accepted step is projected onto the unit-ball columns.
pub fn update_dict(
    x: &Matrix,
    codes: &Matrix,
    dict0: &Matrix,
    eta_d: f64,
    max_iter: usize,
    rtol: f64,
) -> (Matrix, UpdateTrace) {
    let p = x.cols() as f64;
    descend(
        dict0,
        eta_d,
        max_iter,
        rtol,
        |d| {
            x.sub(&codes.mul_nt(d).expect("dims"))
                .expect("dims")
                .sq_sum()
                / p
        },
        |d| dict_grad(x, codes, d).expect("dims"),
        |d| project_columns_unit_ball(&d),
    )
}

/// Gradient update of the projection dictionary with the codes fixed.
pub fn update_proj(
    x: &Matrix,
    codes: &Matrix,
    proj0: &Matrix,
    eta_c: f64,
    max_iter: usize,
    rtol: f64,
) -> (Matrix, UpdateTrace) {
    let m = codes.cols() as f64;
    descend(
        proj0,
        eta_c,
        max_iter,
        rtol,
        |c| {
            codes
                .sub(&x.mul_nt(c).expect("dims"))
                .expect("dims")
                .sq_sum()
                / m
        },
        |c| proj_grad(x, codes, c).expect("dims"),
        |c| c,
    )
}

/// True when training should stop after outer step `s` (1-based):
/// either the step budget is exhausted or the feed-forward error changed by
/// less than `rtol` relative to the previous step.
pub fn stop_condition(energy_history: &[f64], rtol: f64, t_max: usize, s: usize) -> bool {
    assert!(s >= 1 && s <= energy_history.len());
    if s >= t_max {
        return true;
    }
    if s >= 2 {
        let prev = energy_history[s - 2];
        let cur = energy_history[s - 1];
        if (cur - prev).abs() / prev.max(1e-12) < rtol {
            return true;
        }
    }
    false
}

/// Trains the network on `x` (one signal per row) per the alternating
/// schedule: proximal code update, projected dictionary update, projection
/// update, then the feed-forward error check.
///
/// Initialization draws U, then the reconstruction dictionary, then the
/// projection dictionary from a single seeded stream, uniform in [-1, 1];
/// the reconstruction dictionary is projected onto its constraint right
/// away. Identical inputs and seed give a bit-identical model.
pub fn fit(x: &Matrix, hp: &Hyperparams) -> Result<(ScnnModel, TrainReport)> {
    hp.validate()?;
    let n = x.rows();
    let p = x.cols();
    let m = hp.atoms;
    if !x.is_finite() {
        return Err(ScnnError::MalformedData(
            "training data contains non-finite entries".into(),
        ));
    }

    let mut rng = SeededRng::new(hp.seed);
    let mut codes = uniform_init(n, m, &mut rng);
    let mut dict = project_columns_unit_ball(&uniform_init(p, m, &mut rng));
    let mut proj = uniform_init(m, p, &mut rng);

    // X never changes, so the projection-rate denominator is fixed.
    let proj_stat = proj_rate_stat(x, hp.rate_opts);

    let mut history: Vec<f64> = Vec::new();
    let mut records: Vec<StepEnergy> = Vec::new();
    let mut stopped_by = StopReason::MaxIterations;
    let mut steps_run = 0;

    for s in 1..=hp.t_max {
        let (eta_u, _) = code_rate(&dict, hp.rate_opts);
        codes = update_codes(
            x,
            &codes,
            &dict,
            &proj,
            hp.lambda,
            eta_u,
            hp.inner_u_max,
            hp.inner_rtol,
            hp.threshold_mode,
        )
        .0;
        if !codes.is_finite() {
            return Err(ScnnError::NonFiniteEnergy {
                step: format!("code update at outer step {s}"),
            });
        }

        let (eta_d, _) = dict_rate(&codes, p, hp.rate_opts);
        dict = update_dict(x, &codes, &dict, eta_d, hp.inner_d_max, hp.inner_rtol).0;
        if !dict.is_finite() {
            return Err(ScnnError::NonFiniteEnergy {
                step: format!("dictionary update at outer step {s}"),
            });
        }

        let (eta_c, _) = guarded_rate(m as f64, 2.0 * proj_stat);
        proj = update_proj(x, &codes, &proj, eta_c, hp.inner_c_max, hp.inner_rtol).0;
        if !proj.is_finite() {
            return Err(ScnnError::NonFiniteEnergy {
                step: format!("projection update at outer step {s}"),
            });
        }

        let terms = energy(x, &codes, &dict, &proj, hp.lambda)?;
        let encoded = x.mul_nt(&proj)?;
        let feedforward = x.sub(&encoded.mul_nt(&dict)?)?.sq_sum() / p as f64;
        if !feedforward.is_finite() || !terms.total.is_finite() {
            return Err(ScnnError::NonFiniteEnergy {
                step: format!("energy evaluation at outer step {s}"),
            });
        }
        history.push(feedforward);
        records.push(StepEnergy {
            step: s,
            e1: terms.e1,
            e2: terms.e2,
            total: terms.total,
            feedforward,
        });
        steps_run = s;

        if stop_condition(&history, hp.rtol, hp.t_max, s) {
            let by_tolerance = s >= 2
                && (history[s - 1] - history[s - 2]).abs() / history[s - 2].max(1e-12) < hp.rtol;
            stopped_by = if by_tolerance {
                StopReason::Tolerance
            } else {
                StopReason::MaxIterations
            };
            break;
        }
    }

    let model = ScnnModel::new(dict, proj, hp.lambda)?;
    let report = TrainReport {
        outer_steps_run: steps_run,
        final_energy: *history.last().expect("t_max >= 1"),
        energy_history: history,
        stopped_by,
        step_records: records,
        final_codes: codes,
    };
    Ok((model, report))
}

/// One-pass linear encoding U = X·Cᵀ, optionally shrunk entrywise by the
/// model's λ.
pub fn encode(model: &ScnnModel, x: &Matrix, apply_threshold: bool) -> Result<Matrix> {
    if x.cols() != model.projection.cols() {
        return Err(ScnnError::ShapeMismatch {
            op: "encode",
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: model.projection.rows(),
            right_cols: model.projection.cols(),
        });
    }
    let codes = x.mul_nt(&model.projection)?;
    if apply_threshold {
        let lambda = model.lambda;
        Ok(codes.map(|v| soft_threshold(v, lambda)))
    } else {
        Ok(codes)
    }
}

/// Linear decoding X_rec = U·Dᵀ.
pub fn decode(model: &ScnnModel, codes: &Matrix) -> Result<Matrix> {
    if codes.cols() != model.reconstruction.cols() {
        return Err(ScnnError::ShapeMismatch {
            op: "decode",
            left_rows: codes.rows(),
            left_cols: codes.cols(),
            right_rows: model.reconstruction.rows(),
            right_cols: model.reconstruction.cols(),
        });
    }
    codes.mul_nt(&model.reconstruction)
}

/// Recomputes codes for `x` by proximal descent on
/// (1/p)‖X − U·Dᵀ‖² + (2λ/m)·Σ|u| with the dictionary fixed and no
/// projection dictionary involved, starting from zero codes. This is the
/// optimization-at-test-time inference path the linear encoder replaces.
pub fn relearn_codes(
    dict: &Matrix,
    x: &Matrix,
    lambda: f64,
    max_iter: usize,
    rtol: f64,
) -> Result<(Matrix, UpdateTrace)> {
    if x.cols() != dict.rows() {
        return Err(ScnnError::ShapeMismatch {
            op: "relearn_codes",
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: dict.rows(),
            right_cols: dict.cols(),
        });
    }
    let p = x.cols() as f64;
    let m = dict.cols() as f64;
    let gram = dict.mul_tn(dict)?.scale(1.0 / p);
    let norm = gram.spectral_norm(1e-12, 1000)?;
    let eta = 1.0 / (2.0 * norm).max(1e-12);
    let l1_weight = 2.0 * lambda / m;
    let threshold = eta * l1_weight;

    let mut codes = Matrix::zeros(x.rows(), dict.cols());
    let mut objectives = Vec::new();
    let mut steps = 0;
    let mut converged = false;
    loop {
        let residual = x.sub(&codes.mul_nt(dict)?)?;
        let objective = residual.sq_sum() / p + l1_weight * codes.abs_sum();
        if let Some(&prev) = objectives.last() {
            if rel_change(prev, objective) < rtol {
                objectives.push(objective);
                converged = true;
                break;
            }
        }
        objectives.push(objective);
        if steps >= max_iter {
            break;
        }
        let grad = residual.matmul(dict)?.scale(-2.0 / p);
        let mut next = codes.clone();
        for r in 0..next.rows() {
            let g = grad.row(r);
            let row = next.row_mut(r);
            for (v, &gv) in row.iter_mut().zip(g) {
                *v = soft_threshold(*v - eta * gv, threshold);
            }
        }
        codes = next;
        steps += 1;
    }
    Ok((
        codes,
        UpdateTrace {
            objectives,
            steps,
            converged,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::uniform_init;

    fn scalar(v: f64) -> Matrix {
        Matrix::from_rows(&[&[v]])
    }

    #[test]
    fn soft_threshold_cases() {
        assert!((soft_threshold(1.2, 0.5) - 0.7).abs() < 1e-15);
        assert_eq!(soft_threshold(-0.3, 0.5), 0.0);
        assert_eq!(soft_threshold(0.8, 0.0), 0.8);
        assert_eq!(soft_threshold(-0.8, 0.0), -0.8);
        assert_eq!(soft_threshold(0.0, 0.0), 0.0);
    }

    #[test]
    fn unit_ball_projection_cases() {
        let d = Matrix::from_rows(&[&[3.0, 0.1, 0.0], &[4.0, 0.1, 0.0]]);
        let proj = project_columns_unit_ball(&d);
        assert!((proj.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((proj.get(1, 0) - 0.8).abs() < 1e-15);
        // inside the ball: untouched
        assert_eq!(proj.get(0, 1), 0.1);
        assert_eq!(proj.get(1, 1), 0.1);
        // zero column: untouched
        assert_eq!(proj.get(0, 2), 0.0);
        assert_eq!(proj.get(1, 2), 0.0);
    }

    #[test]
    fn energy_perfect_fit_is_zero() {
        // U = X·Cᵀ and X = U·Dᵀ exactly with identity dictionaries
        let x = Matrix::from_rows(&[&[0.5, -0.25], &[0.1, 0.9]]);
        let d = Matrix::identity(2);
        let c = Matrix::identity(2);
        let terms = energy(&x, &x, &d, &c, 0.0).unwrap();
        assert_eq!(terms.total, 0.0);
    }

    #[test]
    fn energy_scalar_case() {
        let terms = energy(&scalar(1.0), &scalar(1.0), &scalar(1.0), &scalar(1.0), 0.5).unwrap();
        assert_eq!(terms.e1, 0.0);
        assert_eq!(terms.e2, 1.0);
        assert_eq!(terms.total, 1.0);
    }

    // Independent re-evaluation of the energy with explicit per-entry loops.
    fn energy_oracle(x: &Matrix, u: &Matrix, d: &Matrix, c: &Matrix, lambda: f64) -> f64 {
        let (n, p, m) = (x.rows(), x.cols(), u.cols());
        let mut first = 0.0;
        for row in 0..n {
            for i in 0..p {
                let mut acc = 0.0;
                for h in 0..m {
                    acc += u.get(row, h) * d.get(i, h);
                }
                first += (x.get(row, i) - acc).powi(2);
            }
        }
        let mut second = 0.0;
        for row in 0..n {
            for j in 0..m {
                let mut acc = 0.0;
                for h in 0..p {
                    acc += x.get(row, h) * c.get(j, h);
                }
                second += (u.get(row, j) - acc).powi(2);
            }
        }
        let mut l1 = 0.0;
        for row in 0..n {
            for h in 0..m {
                l1 += u.get(row, h).abs();
            }
        }
        first / p as f64 + second / m as f64 + 2.0 * lambda / m as f64 * l1
    }

    #[test]
    fn energy_matches_double_loop_oracle() {
        let mut rng = SeededRng::new(11);
        let x = uniform_init(4, 3, &mut rng);
        let u = uniform_init(4, 2, &mut rng);
        let d = uniform_init(3, 2, &mut rng);
        let c = uniform_init(2, 3, &mut rng);
        let terms = energy(&x, &u, &d, &c, 0.3).unwrap();
        let oracle = energy_oracle(&x, &u, &d, &c, 0.3);
        assert!(
            (terms.total - oracle).abs() < 1e-12 * oracle.abs().max(1.0),
            "{} vs {}",
            terms.total,
            oracle
        );
    }

    #[test]
    fn code_grad_scalar_case() {
        // x=1, d=1, c=1, u=0: -2(1)(1) + 2(0-1) = -4
        let g = code_grad_smooth(&scalar(1.0), &scalar(0.0), &scalar(1.0), &scalar(1.0)).unwrap();
        assert!((g.get(0, 0) + 4.0).abs() < 1e-15);
    }

    #[test]
    fn dict_grad_scalar_and_zero_codes() {
        // x=2, u=1, d=0, p=1: -2*1*2 = -4
        let g = dict_grad(&scalar(2.0), &scalar(1.0), &scalar(0.0)).unwrap();
        assert!((g.get(0, 0) + 4.0).abs() < 1e-15);
        let mut rng = SeededRng::new(3);
        let x = uniform_init(3, 2, &mut rng);
        let d = uniform_init(2, 2, &mut rng);
        let zero_codes = Matrix::zeros(3, 2);
        let g = dict_grad(&x, &zero_codes, &d).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn proj_grad_scalar_and_fixed_point() {
        // x=1, u=1, c=0, m=1: -2*1*1 = -2
        let g = proj_grad(&scalar(1.0), &scalar(1.0), &scalar(0.0)).unwrap();
        assert!((g.get(0, 0) + 2.0).abs() < 1e-15);
        // U = X·Cᵀ exactly: gradient vanishes
        let mut rng = SeededRng::new(4);
        let x = uniform_init(4, 3, &mut rng);
        let c = uniform_init(2, 3, &mut rng);
        let u = x.mul_nt(&c).unwrap();
        let g = proj_grad(&x, &u, &c).unwrap();
        assert!(g.max_abs() < 1e-14);
    }

    #[test]
    fn code_grad_zero_at_closed_form_minimizer() {
        // Solve the 2x2 normal equations per row for the smooth-part
        // minimizer and check the gradient vanishes there.
        let mut rng = SeededRng::new(5);
        let x = uniform_init(3, 4, &mut rng);
        let d = uniform_init(4, 2, &mut rng);
        let c = uniform_init(2, 4, &mut rng);
        let p = 4.0;
        let m = 2.0;
        let targets = x.mul_nt(&c).unwrap();
        // H = (1/p)DᵀD + (1/m)I
        let gram = d.mul_tn(&d).unwrap().scale(1.0 / p);
        let h = [
            [gram.get(0, 0) + 1.0 / m, gram.get(0, 1)],
            [gram.get(1, 0), gram.get(1, 1) + 1.0 / m],
        ];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let xd = x.matmul(&d).unwrap();
        let mut u = Matrix::zeros(3, 2);
        for n in 0..3 {
            let b = [
                xd.get(n, 0) / p + targets.get(n, 0) / m,
                xd.get(n, 1) / p + targets.get(n, 1) / m,
            ];
            u.set(n, 0, (b[0] * h[1][1] - b[1] * h[0][1]) / det);
            u.set(n, 1, (b[1] * h[0][0] - b[0] * h[1][0]) / det);
        }
        let g = code_grad_smooth(&x, &u, &d, &c).unwrap();
        assert!(g.max_abs() < 1e-10, "max |grad| = {}", g.max_abs());
    }

    fn fd_rel_error(
        analytic: &Matrix,
        mut eval: impl FnMut(&Matrix) -> f64,
        at: &Matrix,
        h: f64,
    ) -> f64 {
        let mut fd = Matrix::zeros(at.rows(), at.cols());
        for r in 0..at.rows() {
            for c in 0..at.cols() {
                let mut plus = at.clone();
                plus.set(r, c, at.get(r, c) + h);
                let mut minus = at.clone();
                minus.set(r, c, at.get(r, c) - h);
                fd.set(r, c, (eval(&plus) - eval(&minus)) / (2.0 * h));
            }
        }
        let diff = fd.sub(analytic).unwrap().frobenius_norm();
        diff / analytic.frobenius_norm().max(1e-12)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = SeededRng::new(6);
        let x = uniform_init(4, 3, &mut rng);
        let u = uniform_init(4, 2, &mut rng);
        let d = uniform_init(3, 2, &mut rng);
        let c = uniform_init(2, 3, &mut rng);
        let h = 1e-6;

        let gu = code_grad_smooth(&x, &u, &d, &c).unwrap();
        let err = fd_rel_error(&gu, |uu| energy(&x, uu, &d, &c, 0.0).unwrap().e1, &u, h);
        assert!(err < 1e-6, "codes grad fd error {err}");

        let gd = dict_grad(&x, &u, &d).unwrap();
        let err = fd_rel_error(&gd, |dd| energy(&x, &u, dd, &c, 0.0).unwrap().e1, &d, h);
        assert!(err < 1e-6, "dict grad fd error {err}");

        let gc = proj_grad(&x, &u, &c).unwrap();
        let err = fd_rel_error(&gc, |cc| energy(&x, &u, &d, cc, 0.0).unwrap().e1, &c, h);
        assert!(err < 1e-6, "proj grad fd error {err}");
    }

    #[test]
    fn learning_rate_zero_dict() {
        // D = 0, m = 4: H = (1/4)I, eta_u = 1/(2*0.25) = 2
        let x = Matrix::zeros(2, 3);
        let u = Matrix::zeros(2, 4);
        let d = Matrix::zeros(3, 4);
        let rates = learning_rates(&x, &u, &d, RateOpts::default());
        assert!((rates.eta_u - 2.0).abs() < 1e-12);
    }

    #[test]
    fn learning_rate_unit_row_codes() {
        // single unit-norm row of codes, p = 8: eta_d = 8/2 = 4
        let u = Matrix::from_rows(&[&[0.6, 0.8]]);
        for opts in [
            RateOpts::default(),
            RateOpts {
                verbatim_gram_rates: true,
                ..Default::default()
            },
        ] {
            let (eta_d, clamped) = dict_rate(&u, 8, opts);
            assert!(!clamped);
            assert!((eta_d - 4.0).abs() < 1e-9, "eta_d {eta_d}");
        }
    }

    #[test]
    fn learning_rate_orthonormal_dict() {
        // orthonormal columns with p = m: H = (2/p)I, eta_u = p/4
        let d = Matrix::identity(3);
        let (eta_u, _) = code_rate(&d, RateOpts::default());
        assert!((eta_u - 0.75).abs() < 1e-12);
    }

    #[test]
    fn learning_rates_clamp_degenerate() {
        let x = Matrix::zeros(2, 3);
        let u = Matrix::zeros(2, 4);
        let d = Matrix::zeros(3, 4);
        let rates = learning_rates(&x, &u, &d, RateOpts::default());
        assert!(rates.clamped);
        assert!(rates.eta_d > 0.0 && rates.eta_c > 0.0);
    }

    #[test]
    fn code_rate_frobenius_mode() {
        // H = (2/3)I for the identity dictionary; its Frobenius norm is
        // (2/3)*sqrt(3), so the rate drops below the spectral one
        let d = Matrix::identity(3);
        let (eta, _) = code_rate(
            &d,
            RateOpts {
                eta_u_frobenius: true,
                ..Default::default()
            },
        );
        let expected = 1.0 / (2.0 * (2.0 / 3.0) * 3.0f64.sqrt());
        assert!((eta - expected).abs() < 1e-12, "eta {eta}");
        assert!(eta < 0.75);
    }

    #[test]
    fn literal_threshold_mode_shrinks_by_lambda() {
        // one step from the scalar fixed-point setup: pre-threshold value 1
        let x = scalar(1.0);
        let d = scalar(1.0);
        let c = scalar(1.0);
        let lambda = 0.3;
        let (literal, _) = update_codes(
            &x,
            &scalar(0.0),
            &d,
            &c,
            lambda,
            0.25,
            1,
            0.0,
            ThresholdMode::LiteralLambda,
        );
        assert!((literal.get(0, 0) - soft_threshold(1.0, lambda)).abs() < 1e-15);
        let (consistent, _) = update_codes(
            &x,
            &scalar(0.0),
            &d,
            &c,
            lambda,
            0.25,
            1,
            0.0,
            ThresholdMode::Consistent,
        );
        let thr = 0.25 * 2.0 * lambda;
        assert!((consistent.get(0, 0) - soft_threshold(1.0, thr)).abs() < 1e-15);
    }

    #[test]
    fn update_codes_scalar_fixed_point() {
        let x = scalar(1.0);
        let d = scalar(1.0);
        let c = scalar(1.0);
        let (eta_u, _) = code_rate(&d, RateOpts::default());
        assert!((eta_u - 0.25).abs() < 1e-12);
        let (u, trace) = update_codes(
            &x,
            &scalar(0.0),
            &d,
            &c,
            0.0,
            eta_u,
            100,
            1e-12,
            ThresholdMode::Consistent,
        );
        assert!((u.get(0, 0) - 1.0).abs() < 1e-12);
        assert!(trace.converged);
    }

    #[test]
    fn update_codes_huge_lambda_zeroes_codes() {
        let mut rng = SeededRng::new(7);
        let x = uniform_init(5, 4, &mut rng);
        let d = project_columns_unit_ball(&uniform_init(4, 3, &mut rng));
        let c = uniform_init(3, 4, &mut rng);
        let u0 = uniform_init(5, 3, &mut rng);
        let (eta_u, _) = code_rate(&d, RateOpts::default());
        let (u, _) = update_codes(
            &x,
            &u0,
            &d,
            &c,
            1e6,
            eta_u,
            200,
            1e-14,
            ThresholdMode::Consistent,
        );
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn update_codes_objective_monotone() {
        let mut rng = SeededRng::new(8);
        let x = uniform_init(6, 5, &mut rng);
        let d = uniform_init(5, 4, &mut rng);
        let c = uniform_init(4, 5, &mut rng);
        let u0 = uniform_init(6, 4, &mut rng);
        let (eta_u, _) = code_rate(&d, RateOpts::default());
        let (_, trace) = update_codes(
            &x,
            &u0,
            &d,
            &c,
            0.2,
            eta_u,
            300,
            0.0,
            ThresholdMode::Consistent,
        );
        for w in trace.objectives.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "objective rose: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn update_dict_zero_codes_leaves_dict() {
        let mut rng = SeededRng::new(9);
        let x = uniform_init(3, 2, &mut rng);
        let d0 = project_columns_unit_ball(&uniform_init(2, 2, &mut rng));
        let codes = Matrix::zeros(3, 2);
        let (eta_d, clamped) = dict_rate(&codes, 2, RateOpts::default());
        assert!(clamped);
        let (d, _) = update_dict(&x, &codes, &d0, eta_d, 50, 1e-10);
        assert_eq!(d, d0);
    }

    #[test]
    fn update_dict_scalar_least_squares() {
        // N=p=m=1, x=1, u=1, d0=0: optimum d=1 sits on the ball boundary
        let (d, _) = update_dict(&scalar(1.0), &scalar(1.0), &scalar(0.0), 0.5, 200, 1e-15);
        assert!((d.get(0, 0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn update_dict_reaches_interior_least_squares_solution() {
        // X built as U·Gᵀ with a small G, so G is the interior optimum.
        let mut rng = SeededRng::new(10);
        let u = uniform_init(6, 2, &mut rng);
        let g = uniform_init(4, 2, &mut rng).scale(0.3);
        let x = u.mul_nt(&g).unwrap();
        let d0 = Matrix::zeros(4, 2);
        let (eta_d, _) = dict_rate(&u, 4, RateOpts::default());
        let (d, _) = update_dict(&x, &u, &d0, eta_d, 5000, 0.0);
        let err = d.sub(&g).unwrap().max_abs();
        assert!(err < 1e-4, "distance to least-squares solution {err}");
    }

    #[test]
    fn update_proj_fixed_point_and_scalar() {
        let mut rng = SeededRng::new(12);
        let x = uniform_init(4, 3, &mut rng);
        let c0 = uniform_init(2, 3, &mut rng);
        let u = x.mul_nt(&c0).unwrap();
        let (c, _) = update_proj(&x, &u, &c0, 0.05, 50, 1e-12);
        assert_eq!(c, c0);

        let (c, _) = update_proj(&scalar(1.0), &scalar(1.0), &scalar(0.0), 0.5, 200, 1e-15);
        assert!((c.get(0, 0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn update_proj_reaches_least_squares() {
        // X square invertible: X·Cᵀ can match U exactly.
        let x = Matrix::from_rows(&[&[1.0, 0.3], &[-0.2, 0.8]]);
        let mut rng = SeededRng::new(13);
        let u = uniform_init(2, 3, &mut rng);
        let c0 = Matrix::zeros(3, 2);
        let stat = proj_rate_stat(&x, RateOpts::default());
        let eta_c = 3.0 / (2.0 * stat);
        let (c, _) = update_proj(&x, &u, &c0, eta_c, 20000, 0.0);
        let err = u.sub(&x.mul_nt(&c).unwrap()).unwrap().max_abs();
        assert!(err < 1e-4, "|U - XCᵀ| = {err}");
    }

    #[test]
    fn stop_condition_cases() {
        assert!(stop_condition(&[1.0], 1e-4, 1, 1));
        assert!(stop_condition(&[1.0, 1.0], 1e-4, 10, 2));
        // halving energy never satisfies rtol before the cap
        let halving: Vec<f64> = (0..6).map(|i| 1.0 / (1 << i) as f64).collect();
        for s in 2..=5 {
            assert!(!stop_condition(&halving, 1e-4, 10, s));
        }
        assert!(stop_condition(&halving, 1e-4, 6, 6));
    }

    fn tiny_hyperparams(lambda: f64, atoms: usize, seed: u64) -> Hyperparams {
        let mut hp = Hyperparams::new(lambda, atoms, seed);
        hp.t_max = 80;
        hp.inner_u_max = 400;
        hp.inner_d_max = 200;
        hp.inner_c_max = 200;
        hp.rtol = 1e-9;
        hp.inner_rtol = 1e-10;
        hp
    }

    #[test]
    fn fit_lambda_zero_full_rank_drives_error_down() {
        let mut rng = SeededRng::new(21);
        let x = uniform_init(8, 3, &mut rng);
        let hp = tiny_hyperparams(0.0, 3, 21);
        let (_, report) = fit(&x, &hp).unwrap();
        let initial = report.energy_history[0];
        let last = report.final_energy;
        assert!(
            last < 1e-2 * initial,
            "final {last} vs initial {initial} (steps {})",
            report.outer_steps_run
        );
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = SeededRng::new(22);
        let x = uniform_init(6, 4, &mut rng);
        let mut hp = tiny_hyperparams(0.1, 3, 7);
        hp.t_max = 6;
        let (m1, r1) = fit(&x, &hp).unwrap();
        let (m2, r2) = fit(&x, &hp).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(r1.energy_history, r2.energy_history);
        assert_eq!(r1.final_codes, r2.final_codes);
    }

    #[test]
    fn fit_keeps_dictionary_columns_in_unit_ball() {
        let mut rng = SeededRng::new(23);
        let x = uniform_init(10, 5, &mut rng);
        let mut hp = tiny_hyperparams(0.05, 4, 3);
        hp.t_max = 8;
        let (model, _) = fit(&x, &hp).unwrap();
        for j in 0..model.atom_count() {
            assert!(model.reconstruction().col_norm(j) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn fit_report_shape() {
        let mut rng = SeededRng::new(24);
        let x = uniform_init(5, 3, &mut rng);
        let mut hp = tiny_hyperparams(0.0, 2, 1);
        hp.t_max = 4;
        hp.rtol = 1e-1;
        let (_, report) = fit(&x, &hp).unwrap();
        assert!(report.outer_steps_run <= hp.t_max);
        assert_eq!(report.energy_history.len(), report.outer_steps_run);
        assert_eq!(report.step_records.len(), report.outer_steps_run);
        assert!(report
            .energy_history
            .iter()
            .all(|e| e.is_finite() && *e >= 0.0));
    }

    #[test]
    fn encode_identity_projection() {
        // C = identity padded with a zero row: codes replicate x plus a zero
        let d =
            project_columns_unit_ball(&Matrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]));
        let c = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let model = ScnnModel::new(d, c, 0.5).unwrap();
        let x = Matrix::from_rows(&[&[0.7, -0.2]]);
        let u = encode(&model, &x, false).unwrap();
        assert_eq!(u.row(0), &[0.7, -0.2, 0.0][..]);
        // threshold on: small entries die
        let u = encode(&model, &x, true).unwrap();
        assert_eq!(u.row(0), &[0.19999999999999996, 0.0, 0.0][..]);
    }

    #[test]
    fn encode_dead_zone_gives_zero_codes() {
        let d = Matrix::from_rows(&[&[0.1], &[0.1]]);
        let c = Matrix::from_rows(&[&[0.1, 0.1]]);
        let model = ScnnModel::new(d, c, 0.9).unwrap();
        let x = Matrix::from_rows(&[&[1.0, 1.0], &[-1.0, 2.0]]);
        let u = encode(&model, &x, true).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn decode_cases() {
        let d = project_columns_unit_ball(&Matrix::from_rows(&[&[0.6, 0.0], &[0.8, 1.0]]));
        let c = Matrix::zeros(2, 2);
        let model = ScnnModel::new(d, c, 0.0).unwrap();
        let zero = Matrix::zeros(1, 2);
        assert_eq!(decode(&model, &zero).unwrap().max_abs(), 0.0);
        // basis code picks out one dictionary column as a row
        let e1 = Matrix::from_rows(&[&[1.0, 0.0]]);
        let rec = decode(&model, &e1).unwrap();
        assert_eq!(rec.row(0), &[0.6, 0.8][..]);
    }

    #[test]
    fn encode_decode_composition_is_linear_map() {
        let mut rng = SeededRng::new(31);
        let x = uniform_init(4, 3, &mut rng);
        let d = project_columns_unit_ball(&uniform_init(3, 2, &mut rng));
        let c = uniform_init(2, 3, &mut rng);
        let model = ScnnModel::new(d.clone(), c.clone(), 0.2).unwrap();
        let rec = decode(&model, &encode(&model, &x, false).unwrap()).unwrap();
        let direct = x.mul_nt(&c).unwrap().mul_nt(&d).unwrap();
        assert_eq!(rec, direct);
    }

    #[test]
    fn encode_approximates_training_codes() {
        // the code-agreement term drives X·Cᵀ toward U on training rows
        let mut rng = SeededRng::new(33);
        let x = uniform_init(6, 4, &mut rng);
        let mut hp = tiny_hyperparams(1e-4, 3, 5);
        hp.t_max = 200;
        hp.inner_u_max = 800;
        hp.inner_c_max = 800;
        hp.inner_d_max = 800;
        let (model, report) = fit(&x, &hp).unwrap();
        let u = encode(&model, &x, false).unwrap();
        let gap = u.sub(&report.final_codes).unwrap().max_abs();
        assert!(gap < 1e-3, "encoder disagrees with training codes by {gap}");
    }

    #[test]
    fn encode_decode_dim_mismatch_errors() {
        let d = Matrix::zeros(3, 2);
        let c = Matrix::zeros(2, 3);
        let model = ScnnModel::new(d, c, 0.0).unwrap();
        assert!(encode(&model, &Matrix::zeros(1, 4), false).is_err());
        assert!(decode(&model, &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn relearn_codes_descends_and_reconstructs() {
        let mut rng = SeededRng::new(41);
        let d = project_columns_unit_ball(&uniform_init(4, 3, &mut rng));
        let u_true = uniform_init(5, 3, &mut rng);
        let x = u_true.mul_nt(&d).unwrap();
        let (codes, trace) = relearn_codes(&d, &x, 0.0, 3000, 0.0).unwrap();
        for w in trace.objectives.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
        let residual = x.sub(&codes.mul_nt(&d).unwrap()).unwrap().max_abs();
        assert!(residual < 1e-5, "residual {residual}");
    }

    #[test]
    fn hyperparams_validation() {
        assert!(Hyperparams::new(-0.1, 3, 0).validate().is_err());
        assert!(Hyperparams::new(0.1, 0, 0).validate().is_err());
        let mut hp = Hyperparams::new(0.1, 3, 0);
        hp.rtol = 0.0;
        assert!(hp.validate().is_err());
        let mut hp = Hyperparams::new(0.1, 3, 0);
        hp.inner_u_max = 0;
        assert!(hp.validate().is_err());
        assert!(Hyperparams::new(0.0, 1, 0).validate().is_ok());
    }
}
