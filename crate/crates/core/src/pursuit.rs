//! Greedy sparse approximation in three stages: forward stepwise
//! minimum-residual selection, swapping refinement, and backward pruning
//! under the forward stage's error budget.
//!
//! Forward selection keeps an orthonormal basis of the selected span with
//! full reorthogonalization and scores every candidate by
//! `|<r, beta_i>| / ||beta_i||`, where `beta_i` is the candidate's component
//! orthogonal to the span; this picks the atom minimizing the
//! post-projection residual. The swap and backward stages work from the
//! selected Gram matrix and its inverse: removing atom `t` changes the
//! residual by `(c_t / H_tt) A H e_t` and grows its norm squared by
//! `c_t^2 / H_tt`, which gives leave-one-out scores without refactorizing
//! per candidate. Every accepted change is re-measured on an actual
//! coefficient solve, and each stage ends with a fresh orthogonal
//! factorization, so reported residuals and coefficients never rely on the
//! fast identities.

use crate::dictionary::Dictionary;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Direct-vs-incremental coefficient comparison cadence during forward
/// selection.
const CROSSCHECK_EVERY: usize = 10;

/// Columns whose orthogonal complement falls below this are treated as
/// already represented by the selected span.
pub const DEFAULT_IN_SPAN_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PursuitConfig {
    /// Target residual; relative to `||f||` unless `absolute_tolerance`.
    pub tolerance: f64,
    pub absolute_tolerance: bool,
    /// Cap on selected atoms (defaults to the dictionary size).
    pub max_atoms: Option<usize>,
    pub swap_enabled: bool,
    pub backward_enabled: bool,
    /// Swap acceptance margin (absolute); defaults to `1e-12 * ||f||`.
    pub min_residual_gain: Option<f64>,
    pub in_span_threshold: f64,
}

impl Default for PursuitConfig {
    fn default() -> Self {
        PursuitConfig {
            tolerance: 1e-2,
            absolute_tolerance: false,
            max_atoms: None,
            swap_enabled: true,
            backward_enabled: true,
            min_residual_gain: None,
            in_span_threshold: DEFAULT_IN_SPAN_THRESHOLD,
        }
    }
}

impl PursuitConfig {
    fn tau_abs(&self, f_norm: f64) -> f64 {
        if self.absolute_tolerance {
            self.tolerance
        } else {
            self.tolerance * f_norm
        }
    }

    fn gain(&self, f_norm: f64) -> f64 {
        self.min_residual_gain.unwrap_or(1e-12 * f_norm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Forward,
    Swap,
    Backward,
}

/// Outcome of one pursuit stage: atom count, final residual, and the
/// residual after each event (pick, accepted swap, removal).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: Stage,
    pub atoms: usize,
    pub residual: f64,
    pub residuals: Vec<f64>,
}

/// A sparse approximation `f^N = sum_n c_n a_{l_n}` whose coefficients are
/// the joint orthogonal projection of `f` onto the selected span.
#[derive(Clone, Debug, Serialize)]
pub struct AtomicDecomposition {
    pub indices: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// False when the tolerance was unreachable within the atom budget.
    pub converged: bool,
    pub stages: Vec<StageSummary>,
    /// Worst relative gap between incremental coefficients and a direct
    /// least-squares solve, over all checks performed.
    pub crosscheck_max_rel: f64,
}

impl AtomicDecomposition {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn to_dvector(f: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(f)
}

fn check_signal(f: &[f64], matrix: &DMatrix<f64>) -> Result<()> {
    if f.len() != matrix.nrows() {
        return Err(Error::arg(format!(
            "signal length {} does not match grid length {}",
            f.len(),
            matrix.nrows()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("signal contains non-finite samples"));
    }
    Ok(())
}

/// Incrementally maintained orthonormal factorization of the selected
/// columns, with the per-candidate quantities needed by forward selection.
struct OrthoEngine<'a> {
    matrix: &'a DMatrix<f64>,
    f: DVector<f64>,
    /// Orthonormal basis of the selected span.
    q: Vec<DVector<f64>>,
    /// Column `n` of the triangular factor: entries `<q_k, a_{l_n}>` for
    /// `k < n`, then the new direction's norm.
    r_fact: Vec<Vec<f64>>,
    /// `<q_k, f>`.
    z: Vec<f64>,
    /// `p[i] = ||a_i||^2 - sum_k <q_k, a_i>^2`, the squared complement norm.
    p: Vec<f64>,
    /// `A^T r` for the current residual.
    s: DVector<f64>,
    residual: DVector<f64>,
    rnorm: f64,
    selected: Vec<usize>,
    is_selected: Vec<bool>,
}

impl<'a> OrthoEngine<'a> {
    fn new(matrix: &'a DMatrix<f64>, f: DVector<f64>) -> Self {
        let ncols = matrix.ncols();
        let p = (0..ncols).map(|i| matrix.column(i).norm_squared()).collect();
        let s = matrix.tr_mul(&f);
        let rnorm = f.norm();
        OrthoEngine {
            matrix,
            residual: f.clone(),
            f,
            q: Vec::new(),
            r_fact: Vec::new(),
            z: Vec::new(),
            p,
            s,
            rnorm,
            selected: Vec::new(),
            is_selected: vec![false; ncols],
        }
    }

    fn rebuild(matrix: &'a DMatrix<f64>, f: DVector<f64>, indices: &[usize]) -> Result<Self> {
        let mut engine = Self::new(matrix, f);
        for &i in indices {
            engine.push(i)?;
        }
        Ok(engine)
    }

    fn len(&self) -> usize {
        self.selected.len()
    }

    /// Strict insertion for explicit index lists: a numerically dependent
    /// column is an error.
    fn push(&mut self, col: usize) -> Result<()> {
        if self.try_push(col)? {
            Ok(())
        } else {
            Err(Error::arg(format!(
                "atom {col} is numerically inside the selected span"
            )))
        }
    }

    /// Orthogonalizes column `col` against the span (two passes) and updates
    /// the residual and all per-candidate quantities. Returns `false` (and
    /// excludes the atom from future candidacy) when its orthogonal
    /// component has collapsed to roundoff.
    fn try_push(&mut self, col: usize) -> Result<bool> {
        if self.is_selected[col] {
            return Err(Error::arg(format!("atom {col} selected twice")));
        }
        let mut beta: DVector<f64> = self.matrix.column(col).into();
        let col_norm = beta.norm();
        let mut rcol = vec![0.0; self.q.len() + 1];
        for _ in 0..2 {
            for (k, qk) in self.q.iter().enumerate() {
                let g = qk.dot(&beta);
                rcol[k] += g;
                beta.axpy(-g, qk, 1.0);
            }
        }
        let beta_norm = beta.norm();
        if beta_norm <= 1e-13 * col_norm.max(1.0) {
            self.p[col] = 0.0;
            return Ok(false);
        }
        let n = self.q.len();
        rcol[n] = beta_norm;
        let q_new = beta / beta_norm;
        self.z.push(q_new.dot(&self.f));
        let gamma = q_new.dot(&self.residual);
        self.residual.axpy(-gamma, &q_new, 1.0);
        self.rnorm = self.residual.norm();
        let m_new = self.matrix.tr_mul(&q_new);
        for i in 0..self.p.len() {
            self.p[i] = (self.p[i] - m_new[i] * m_new[i]).max(0.0);
        }
        self.s.axpy(-gamma, &m_new, 1.0);
        self.q.push(q_new);
        self.r_fact.push(rcol);
        self.selected.push(col);
        self.is_selected[col] = true;
        Ok(true)
    }

    /// Best forward candidate by the optimized ratio; ties break to the
    /// lowest atom index.
    fn best_candidate(&self, in_span_threshold: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.p.len() {
            if self.is_selected[i] {
                continue;
            }
            let p = self.p[i];
            if p.sqrt() < in_span_threshold {
                continue;
            }
            let score = self.s[i] * self.s[i] / p;
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Joint coefficients by back substitution through the triangular factor.
    fn coefficients(&self) -> Vec<f64> {
        let n = self.selected.len();
        let mut c = vec![0.0; n];
        for k in (0..n).rev() {
            let mut acc = self.z[k];
            for j in (k + 1)..n {
                acc -= self.r_fact[j][k] * c[j];
            }
            c[k] = acc / self.r_fact[k][k];
        }
        c
    }

    /// Relative gap between the incremental coefficients and a direct SVD
    /// least-squares solve on the selected columns.
    fn crosscheck(&self) -> f64 {
        if self.selected.is_empty() {
            return 0.0;
        }
        let sel = gather_columns(self.matrix, &self.selected);
        let svd = sel.svd(true, true);
        let direct = match svd.solve(&self.f, 1e-14) {
            Ok(d) => d,
            Err(_) => return f64::INFINITY,
        };
        let incremental = DVector::from_vec(self.coefficients());
        let denom = direct.norm().max(1e-300);
        (incremental - direct).norm() / denom
    }
}

fn gather_columns(matrix: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(matrix.nrows(), indices.len());
    for (slot, &i) in indices.iter().enumerate() {
        out.set_column(slot, &matrix.column(i));
    }
    out
}

/// Selected-set state for the swap and backward stages: Gram matrix, its
/// inverse, joint coefficients, and the residual, refreshed from actual
/// solves on every accepted change.
struct GramEngine<'a> {
    matrix: &'a DMatrix<f64>,
    f: &'a DVector<f64>,
    indices: Vec<usize>,
    selected_cols: DMatrix<f64>,
    gram: DMatrix<f64>,
    inv: DMatrix<f64>,
    atf: DVector<f64>,
    coeffs: DVector<f64>,
    residual: DVector<f64>,
    rnorm: f64,
    is_selected: Vec<bool>,
}

fn invert_spd(gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(chol) = gram.clone().cholesky() {
        return Ok(chol.inverse());
    }
    gram.clone()
        .try_inverse()
        .ok_or_else(|| Error::arg("selected atoms are numerically dependent"))
}

impl<'a> GramEngine<'a> {
    fn build(matrix: &'a DMatrix<f64>, f: &'a DVector<f64>, indices: &[usize]) -> Result<Self> {
        let selected_cols = gather_columns(matrix, indices);
        let gram = selected_cols.tr_mul(&selected_cols);
        let inv = invert_spd(&gram)?;
        let atf = selected_cols.tr_mul(f);
        let coeffs = &inv * &atf;
        let residual = f - &selected_cols * &coeffs;
        let rnorm = residual.norm();
        let mut is_selected = vec![false; matrix.ncols()];
        for &i in indices {
            is_selected[i] = true;
        }
        Ok(GramEngine {
            matrix,
            f,
            indices: indices.to_vec(),
            selected_cols,
            gram,
            inv,
            atf,
            coeffs,
            residual,
            rnorm,
            is_selected,
        })
    }

    fn len(&self) -> usize {
        self.indices.len()
    }

    /// Replaces the atom at position `t` with dictionary atom `b` and
    /// refreshes every derived quantity from a fresh solve.
    fn replace(&mut self, t: usize, b: usize) -> Result<()> {
        self.is_selected[self.indices[t]] = false;
        self.is_selected[b] = true;
        self.indices[t] = b;
        self.selected_cols.set_column(t, &self.matrix.column(b));
        self.refresh()
    }

    fn remove(&mut self, t: usize) -> Result<()> {
        self.is_selected[self.indices[t]] = false;
        self.indices.remove(t);
        self.selected_cols = gather_columns(self.matrix, &self.indices);
        self.refresh()
    }

    fn refresh(&mut self) -> Result<()> {
        if self.indices.is_empty() {
            self.gram = DMatrix::zeros(0, 0);
            self.inv = DMatrix::zeros(0, 0);
            self.atf = DVector::zeros(0);
            self.coeffs = DVector::zeros(0);
            self.residual = self.f.clone();
            self.rnorm = self.residual.norm();
            return Ok(());
        }
        self.gram = self.selected_cols.tr_mul(&self.selected_cols);
        self.inv = invert_spd(&self.gram)?;
        self.atf = self.selected_cols.tr_mul(self.f);
        self.coeffs = &self.inv * &self.atf;
        self.residual = self.f - &self.selected_cols * &self.coeffs;
        self.rnorm = self.residual.norm();
        Ok(())
    }

    /// Residual norm squared that removing position `t` would leave
    /// (leave-one-out identity).
    fn removal_residual_sq(&self, t: usize) -> f64 {
        let htt = self.inv[(t, t)];
        let ct = self.coeffs[t];
        (self.rnorm * self.rnorm + ct * ct / htt).max(0.0)
    }

    /// Residual vector with position `t` dropped.
    fn residual_without(&self, t: usize) -> DVector<f64> {
        let hcol: DVector<f64> = self.inv.column(t).into();
        let v = &self.selected_cols * hcol;
        let scale = self.coeffs[t] / self.inv[(t, t)];
        &self.residual + v * scale
    }

    /// Exact residual norm of the set with position `t` replaced by atom
    /// `b`, from a direct solve on the substituted Gram (the engine state
    /// is untouched).
    fn evaluate_replacement(&self, t: usize, b: usize) -> Option<f64> {
        let n = self.len();
        let b_col: DVector<f64> = self.matrix.column(b).into();
        let cross = self.selected_cols.tr_mul(&b_col);
        let mut gram = self.gram.clone();
        for k in 0..n {
            let value = if k == t { b_col.norm_squared() } else { cross[k] };
            gram[(t, k)] = value;
            gram[(k, t)] = value;
        }
        let mut atf = self.atf.clone();
        atf[t] = b_col.dot(self.f);
        let solved = match gram.clone().cholesky() {
            Some(chol) => chol.solve(&atf),
            None => gram.try_inverse()? * &atf,
        };
        let old_col: DVector<f64> = self.selected_cols.column(t).into();
        let mut approx = &self.selected_cols * &solved;
        approx += (b_col - old_col) * solved[t];
        Some((self.f - approx).norm())
    }
}

/// Per-candidate swap scores from the full-span quantities: `A^T r`, the
/// squared complement norms `p_i`, and the removal direction of the pass.
struct SwapScorer {
    s_full: DVector<f64>,
    p_full: Vec<f64>,
}

impl SwapScorer {
    fn build(matrix: &DMatrix<f64>, engine: &GramEngine) -> Self {
        let s_full = matrix.tr_mul(&engine.residual);
        // mg = A_sel^T A once per accepted state; p_i = ||a_i||^2 - m_i^T H m_i.
        let mg = engine.selected_cols.tr_mul(matrix);
        let hm = &engine.inv * &mg;
        let ncols = matrix.ncols();
        let mut p_full = Vec::with_capacity(ncols);
        for i in 0..ncols {
            let mut span_part = 0.0;
            for k in 0..engine.len() {
                span_part += mg[(k, i)] * hm[(k, i)];
            }
            p_full.push((matrix.column(i).norm_squared() - span_part).max(0.0));
        }
        SwapScorer { s_full, p_full }
    }

    /// Best replacement for position `t` given `w = A^T v` where `v` is the
    /// removal direction: maximizes the squared selection ratio against
    /// span-minus-t. Ties break to the lowest index.
    fn best_replacement(
        &self,
        engine: &GramEngine,
        t: usize,
        w: &DVector<f64>,
        in_span_threshold: f64,
    ) -> Option<(usize, f64)> {
        let htt = engine.inv[(t, t)];
        let ct_over = engine.coeffs[t] / htt;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.p_full.len() {
            if engine.is_selected[i] {
                continue;
            }
            let s_m = self.s_full[i] + ct_over * w[i];
            let p_m = (self.p_full[i] + w[i] * w[i] / htt).max(0.0);
            if p_m.sqrt() < in_span_threshold {
                continue;
            }
            let score = s_m * s_m / p_m;
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        best
    }
}

/// Rebuilds the final factorization for a stage's outcome so the reported
/// coefficients, residual, and cross-check come from a fresh
/// orthogonalization rather than the stage's working identities.
fn finalize(
    matrix: &DMatrix<f64>,
    f: &DVector<f64>,
    indices: &[usize],
    converged: bool,
    stages: Vec<StageSummary>,
    crosscheck_seed: f64,
) -> Result<AtomicDecomposition> {
    if indices.is_empty() {
        return Ok(AtomicDecomposition {
            indices: Vec::new(),
            coefficients: Vec::new(),
            residual_norm: f.norm(),
            converged,
            stages,
            crosscheck_max_rel: crosscheck_seed,
        });
    }
    let engine = OrthoEngine::rebuild(matrix, f.clone(), indices)?;
    let crosscheck = engine.crosscheck();
    Ok(AtomicDecomposition {
        indices: engine.selected.clone(),
        coefficients: engine.coefficients(),
        residual_norm: engine.rnorm,
        converged,
        stages,
        crosscheck_max_rel: crosscheck_seed.max(crosscheck),
    })
}

/// Stage i on a raw dictionary matrix (unit columns): atoms picked one at a
/// time by the optimized orthogonal selection rule until the residual target
/// or the atom budget is reached. An unreachable target is flagged through
/// `converged`, not an error.
pub fn forward_select_matrix(
    f: &[f64],
    matrix: &DMatrix<f64>,
    cfg: &PursuitConfig,
) -> Result<AtomicDecomposition> {
    check_signal(f, matrix)?;
    let fv = to_dvector(f);
    let f_norm = fv.norm();
    let tau = cfg.tau_abs(f_norm);
    let cap = cfg.max_atoms.unwrap_or(matrix.ncols()).min(matrix.ncols());
    let mut engine = OrthoEngine::new(matrix, fv.clone());
    let mut residuals = Vec::new();
    let mut crosscheck_max = 0.0_f64;
    while engine.rnorm > tau && engine.len() < cap {
        let Some(pick) = engine.best_candidate(cfg.in_span_threshold) else {
            break;
        };
        if !engine.try_push(pick)? {
            continue; // estimate said selectable, actual orthogonalization disagreed
        }
        residuals.push(engine.rnorm);
        if engine.len() % CROSSCHECK_EVERY == 0 {
            crosscheck_max = crosscheck_max.max(engine.crosscheck());
        }
    }
    let converged = engine.rnorm <= tau;
    let indices = engine.selected.clone();
    let stage = StageSummary {
        stage: Stage::Forward,
        atoms: indices.len(),
        residual: engine.rnorm,
        residuals,
    };
    finalize(matrix, &fv, &indices, converged, vec![stage], crosscheck_max)
}

/// Stage ii on a raw matrix: repeated passes over the held atoms, replacing
/// one with the best dictionary atom whenever that strictly improves the
/// residual by more than the configured margin. Loops until a full pass
/// accepts nothing.
pub fn swap_refine_matrix(
    f: &[f64],
    dec: &AtomicDecomposition,
    matrix: &DMatrix<f64>,
    cfg: &PursuitConfig,
) -> Result<AtomicDecomposition> {
    check_signal(f, matrix)?;
    let fv = to_dvector(f);
    if dec.is_empty() {
        let mut stages = dec.stages.clone();
        stages.push(StageSummary {
            stage: Stage::Swap,
            atoms: 0,
            residual: dec.residual_norm,
            residuals: Vec::new(),
        });
        return finalize(
            matrix,
            &fv,
            &dec.indices,
            dec.converged,
            stages,
            dec.crosscheck_max_rel,
        );
    }
    let gain = cfg.gain(fv.norm());
    let mut engine = GramEngine::build(matrix, &fv, &dec.indices)?;
    let mut history = Vec::new();
    let mut scorer = SwapScorer::build(matrix, &engine);
    loop {
        let mut accepted_in_pass = false;
        for t in 0..engine.len() {
            let htt = engine.inv[(t, t)];
            let ct = engine.coeffs[t];
            // w = A^T v where v = A_sel H e_t is the removal direction.
            let hcol: DVector<f64> = engine.inv.column(t).into();
            let v = &engine.selected_cols * hcol;
            let w = matrix.tr_mul(&v);
            let Some((candidate, score)) =
                scorer.best_replacement(&engine, t, &w, cfg.in_span_threshold)
            else {
                continue;
            };
            let removed_sq = engine.rnorm * engine.rnorm + ct * ct / htt;
            let estimate_sq = removed_sq - score;
            let target = engine.rnorm - gain;
            if target <= 0.0 || estimate_sq.max(0.0).sqrt() >= target {
                continue;
            }
            let Some(true_rnorm) = engine.evaluate_replacement(t, candidate) else {
                continue;
            };
            if true_rnorm < target {
                engine.replace(t, candidate)?;
                history.push(engine.rnorm);
                scorer = SwapScorer::build(matrix, &engine);
                accepted_in_pass = true;
            }
        }
        if !accepted_in_pass {
            break;
        }
    }
    let indices = engine.indices.clone();
    let mut stages = dec.stages.clone();
    stages.push(StageSummary {
        stage: Stage::Swap,
        atoms: indices.len(),
        residual: engine.rnorm,
        residuals: history,
    });
    finalize(
        matrix,
        &fv,
        &indices,
        dec.converged,
        stages,
        dec.crosscheck_max_rel,
    )
}

/// Stage iii on a raw matrix: while the cheapest removal keeps the residual
/// within the budget, drop that atom and re-project.
pub fn backward_prune_matrix(
    f: &[f64],
    dec: &AtomicDecomposition,
    matrix: &DMatrix<f64>,
    budget: f64,
) -> Result<AtomicDecomposition> {
    check_signal(f, matrix)?;
    let fv = to_dvector(f);
    let mut history = Vec::new();
    let mut indices = dec.indices.clone();
    if !indices.is_empty() {
        let mut engine = GramEngine::build(matrix, &fv, &indices)?;
        while engine.len() > 0 {
            let mut best: Option<(usize, f64)> = None;
            for t in 0..engine.len() {
                let cost = engine.removal_residual_sq(t);
                if best.map_or(true, |(_, b)| cost < b) {
                    best = Some((t, cost));
                }
            }
            let (t, cost_sq) = best.expect("non-empty selection");
            if cost_sq.sqrt() > budget {
                break;
            }
            engine.remove(t)?;
            history.push(engine.rnorm);
        }
        indices = engine.indices.clone();
    }
    let mut stages = dec.stages.clone();
    let final_residual = if indices.is_empty() {
        fv.norm()
    } else {
        history.last().copied().unwrap_or(dec.residual_norm)
    };
    stages.push(StageSummary {
        stage: Stage::Backward,
        atoms: indices.len(),
        residual: final_residual,
        residuals: history,
    });
    finalize(
        matrix,
        &fv,
        &indices,
        dec.converged,
        stages,
        dec.crosscheck_max_rel,
    )
}

/// All enabled stages in order; backward pruning runs under the forward
/// stage's achieved residual as its budget.
pub fn approximate_matrix(
    f: &[f64],
    matrix: &DMatrix<f64>,
    cfg: &PursuitConfig,
) -> Result<AtomicDecomposition> {
    let mut dec = forward_select_matrix(f, matrix, cfg)?;
    let budget = dec.residual_norm;
    if cfg.swap_enabled {
        dec = swap_refine_matrix(f, &dec, matrix, cfg)?;
    }
    if cfg.backward_enabled {
        dec = backward_prune_matrix(f, &dec, matrix, budget)?;
    }
    Ok(dec)
}

/// Joint orthogonal projection of `f` onto an explicit atom subset.
pub fn decomposition_from_indices(
    f: &[f64],
    matrix: &DMatrix<f64>,
    indices: &[usize],
) -> Result<AtomicDecomposition> {
    check_signal(f, matrix)?;
    let mut seen = vec![false; matrix.ncols()];
    for &i in indices {
        if i >= matrix.ncols() {
            return Err(Error::arg(format!("atom index {i} out of range")));
        }
        if seen[i] {
            return Err(Error::arg(format!("atom index {i} repeated")));
        }
        seen[i] = true;
    }
    let fv = to_dvector(f);
    finalize(matrix, &fv, indices, true, Vec::new(), 0.0)
}

/// Stage i against a dictionary.
pub fn forward_select(
    f: &[f64],
    dict: &Dictionary,
    cfg: &PursuitConfig,
) -> Result<AtomicDecomposition> {
    forward_select_matrix(f, dict.matrix(), cfg)
}

/// Stage ii against a dictionary.
pub fn swap_refine(
    f: &[f64],
    dec: &AtomicDecomposition,
    dict: &Dictionary,
    cfg: &PursuitConfig,
) -> Result<AtomicDecomposition> {
    swap_refine_matrix(f, dec, dict.matrix(), cfg)
}

/// Stage iii against a dictionary.
pub fn backward_prune(
    f: &[f64],
    dec: &AtomicDecomposition,
    dict: &Dictionary,
    budget: f64,
) -> Result<AtomicDecomposition> {
    backward_prune_matrix(f, dec, dict.matrix(), budget)
}

/// The full three-stage pursuit against a dictionary.
pub fn approximate(
    f: &[f64],
    dict: &Dictionary,
    cfg: &PursuitConfig,
) -> Result<AtomicDecomposition> {
    approximate_matrix(f, dict.matrix(), cfg)
}

/// Reconstructs `f^N` on the dictionary grid.
pub fn reconstruct(matrix: &DMatrix<f64>, dec: &AtomicDecomposition) -> Vec<f64> {
    let mut out = DVector::zeros(matrix.nrows());
    for (&i, &c) in dec.indices.iter().zip(&dec.coefficients) {
        out.axpy(c, &matrix.column(i).into_owned(), 1.0);
    }
    out.as_slice().to_vec()
}

/// Largest correlation between the residual and any selected atom, relative
/// to `||f||`; near zero when the coefficients are a true orthogonal
/// projection.
pub fn max_residual_correlation(
    f: &[f64],
    matrix: &DMatrix<f64>,
    dec: &AtomicDecomposition,
) -> f64 {
    let fv = to_dvector(f);
    let f_norm = fv.norm();
    if f_norm == 0.0 || dec.is_empty() {
        return 0.0;
    }
    let mut residual = fv;
    for (&i, &c) in dec.indices.iter().zip(&dec.coefficients) {
        residual.axpy(-c, &matrix.column(i).into_owned(), 1.0);
    }
    dec.indices
        .iter()
        .map(|&i| residual.dot(&matrix.column(i).into_owned()).abs())
        .fold(0.0_f64, f64::max)
        / f_norm
}
