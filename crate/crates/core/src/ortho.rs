//! Orthonormalization of the training outputs with paired preimage
//! updates.
//!
//! Every backend produces the same object: an orthonormal family spanning
//! the training outputs together with *preimages* under the unknown
//! operator.  Whenever the recursion forms `w = y_i - sum c_k q_k` and
//! normalizes by `r = ||w||`, the identical coefficients and the identical
//! divisor are applied to the input vectors.  Linearity then guarantees
//! `T(preimage_i) = ortho_output_i` without the operator ever being
//! applied, and reconstruction from a new measurement reduces to inner
//! products against the orthonormal family.
//!
//! The four backends differ only in how the projection is organized, which
//! is precisely what their floating-point error behavior is sensitive to:
//! classical Gram-Schmidt projects against the original column, modified
//! Gram-Schmidt against the running residual, and the Householder and QR
//! routes go through a factorization with orthogonality near machine
//! precision.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::recon::{Method, Reconstruction};
use crate::training::{ToleranceConfig, TrainingSet};

/// An orthonormal basis of the training-output span, paired with the
/// vectors that map onto it.
#[derive(Debug, Clone)]
pub struct OrthonormalSystem {
    /// Orthonormalized outputs, one per column (`h x r`).
    pub ortho_outputs: DMatrix<f64>,
    /// Input-space vectors mapping onto `ortho_outputs` (`k x r`).
    pub preimages: DMatrix<f64>,
    /// The backend that produced this system.
    pub method: Method,
    /// Indices of the training pairs that survived the dependence test,
    /// in processing order.
    pub kept_indices: Vec<usize>,
    /// Departure from orthonormality of `ortho_outputs`, see
    /// [`ortho_error`].
    pub ortho_error: f64,
}

impl OrthonormalSystem {
    /// Number of vectors in the orthonormal family.
    pub fn rank(&self) -> usize {
        self.ortho_outputs.ncols()
    }

    /// True when the recorded orthonormality defect is within `tol`.
    pub fn is_orthonormal_within(&self, tol: f64) -> bool {
        self.ortho_error <= tol
    }
}

/// Departure from orthonormality: the induced 1-norm (maximum absolute
/// column sum) of `Q^T Q - I`.
pub fn ortho_error(q: &DMatrix<f64>) -> f64 {
    let mut g = q.tr_mul(q);
    for i in 0..g.nrows() {
        g[(i, i)] -= 1.0;
    }
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        let sum: f64 = g.column(j).iter().map(|v| v.abs()).sum();
        worst = worst.max(sum);
    }
    worst
}

/// Classical Gram-Schmidt: projection coefficients are inner products
/// with the *original* column, so rounding errors of earlier steps feed
/// back unattenuated.  The least stable backend, kept as the reference
/// recursion.
pub fn classical_gram_schmidt(
    ts: &TrainingSet,
    cfg: &ToleranceConfig,
) -> Result<OrthonormalSystem> {
    gram_schmidt(ts, cfg, false)
}

/// Modified Gram-Schmidt: projection coefficients are inner products with
/// the *running residual*.  Algebraically identical to the classical
/// recursion, numerically far better conditioned.
pub fn modified_gram_schmidt(
    ts: &TrainingSet,
    cfg: &ToleranceConfig,
) -> Result<OrthonormalSystem> {
    gram_schmidt(ts, cfg, true)
}

fn gram_schmidt(ts: &TrainingSet, cfg: &ToleranceConfig, modified: bool) -> Result<OrthonormalSystem> {
    cfg.validate()?;
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut pre: Vec<DVector<f64>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..ts.len() {
        let y = ts.outputs.column(i).into_owned();
        let norm_y = y.norm();
        let mut w = y.clone();
        let mut v = ts.inputs.column(i).into_owned();
        if modified {
            for (qk, pk) in q.iter().zip(&pre) {
                let c = w.dot(qk);
                w.axpy(-c, qk, 1.0);
                v.axpy(-c, pk, 1.0);
            }
        } else {
            let coeffs: Vec<f64> = q.iter().map(|qk| y.dot(qk)).collect();
            for ((qk, pk), c) in q.iter().zip(&pre).zip(coeffs) {
                w.axpy(-c, qk, 1.0);
                v.axpy(-c, pk, 1.0);
            }
        }
        if cfg.reorthogonalize {
            // Second pass against the residual; the preimage sees the same
            // corrections, so the pairing survives.
            for (qk, pk) in q.iter().zip(&pre) {
                let c = w.dot(qk);
                w.axpy(-c, qk, 1.0);
                v.axpy(-c, pk, 1.0);
            }
        }
        let r = w.norm();
        if r <= cfg.dependence_tol * norm_y {
            continue;
        }
        w /= r;
        v /= r;
        q.push(w);
        pre.push(v);
        kept.push(i);
    }
    if kept.is_empty() {
        return Err(Error::AllColumnsDependent);
    }
    let ortho_outputs = DMatrix::from_columns(&q);
    let preimages = DMatrix::from_columns(&pre);
    let err = ortho_error(&ortho_outputs);
    Ok(OrthonormalSystem {
        ortho_outputs,
        preimages,
        method: if modified { Method::ModifiedGs } else { Method::ClassicalGs },
        kept_indices: kept,
        ortho_error: err,
    })
}

/// Orthonormalization by Householder reflections.
///
/// Columns are processed left to right; the part of the reflected column
/// below the current rank measures its distance to the span of the kept
/// columns, so the dependence test is the same relative test the
/// Gram-Schmidt recursions use.  Preimages are recovered from the kept
/// inputs by a triangular solve against `R`, whose diagonal is made
/// nonnegative by sign flips absorbed into `Q`.
pub fn householder_orthonormalize(
    ts: &TrainingSet,
    cfg: &ToleranceConfig,
) -> Result<OrthonormalSystem> {
    cfg.validate()?;
    let h = ts.output_dim();
    let mut reflectors: Vec<DVector<f64>> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..ts.len() {
        let norm_y = ts.outputs.column(j).norm();
        let mut a = ts.outputs.column(j).into_owned();
        for v in &reflectors {
            reflect(v, &mut a);
        }
        let m = reflectors.len();
        if m >= h {
            continue;
        }
        let tail_norm = a.rows(m, h - m).norm();
        if tail_norm <= cfg.dependence_tol * norm_y {
            continue;
        }
        // Reflect a[m..] onto alpha * e_m; the sign choice avoids
        // cancellation in v[m].
        let x0 = a[m];
        let alpha = if x0 >= 0.0 { -tail_norm } else { tail_norm };
        let mut v = DVector::zeros(h);
        v.rows_mut(m, h - m).copy_from(&a.rows(m, h - m));
        v[m] = x0 - alpha;
        let vnorm = v.norm();
        v /= vnorm;
        let mut col: Vec<f64> = a.as_slice()[..m].to_vec();
        col.push(alpha);
        reflectors.push(v);
        r_cols.push(col);
        kept.push(j);
    }
    if kept.is_empty() {
        return Err(Error::AllColumnsDependent);
    }
    let r = reflectors.len();
    let mut rmat = DMatrix::zeros(r, r);
    for (m, col) in r_cols.iter().enumerate() {
        for (i, &val) in col.iter().enumerate() {
            rmat[(i, m)] = val;
        }
    }
    // Flip the sign of R row m and Q column m together wherever the
    // diagonal came out negative.
    let mut signs = vec![1.0f64; r];
    for m in 0..r {
        if rmat[(m, m)] < 0.0 {
            signs[m] = -1.0;
            for jj in 0..r {
                rmat[(m, jj)] = -rmat[(m, jj)];
            }
        }
    }
    let mut qmat = DMatrix::zeros(h, r);
    for m in 0..r {
        let mut e = DVector::zeros(h);
        e[m] = signs[m];
        for v in reflectors.iter().rev() {
            reflect(v, &mut e);
        }
        qmat.set_column(m, &e);
    }
    let kept_inputs = select_cols(&ts.inputs, &kept);
    let preimages = solve_preimages(&kept_inputs, &rmat)?;
    let err = ortho_error(&qmat);
    Ok(OrthonormalSystem {
        ortho_outputs: qmat,
        preimages,
        method: Method::Householder,
        kept_indices: kept,
        ortho_error: err,
    })
}

/// Orthonormalization through a dense QR factorization of the kept
/// columns.
///
/// Starts from all columns and repeats the factorization after dropping
/// every column whose `|R_jj|` fails the relative dependence test, until
/// the kept set is stable.  Like the Householder route, preimages come
/// from a triangular solve and the diagonal of `R` is normalized to be
/// nonnegative.
pub fn qr_orthonormalize(ts: &TrainingSet, cfg: &ToleranceConfig) -> Result<OrthonormalSystem> {
    cfg.validate()?;
    let h = ts.output_dim();
    let mut kept: Vec<usize> = (0..ts.len()).collect();
    loop {
        let y = select_cols(&ts.outputs, &kept);
        let qr = y.qr();
        let rfull = qr.r();
        let diag_len = rfull.nrows().min(rfull.ncols());
        let mut next: Vec<usize> = Vec::with_capacity(kept.len());
        for (pos, &orig) in kept.iter().enumerate() {
            let d = if pos < diag_len { rfull[(pos, pos)].abs() } else { 0.0 };
            let norm_y = ts.outputs.column(orig).norm();
            if d > cfg.dependence_tol * norm_y {
                next.push(orig);
            }
        }
        if next.is_empty() {
            return Err(Error::AllColumnsDependent);
        }
        if next.len() < kept.len() {
            kept = next;
            continue;
        }
        // Stable kept set; at this point kept.len() <= h, so R is square.
        let mut qmat = qr.q();
        let mut rmat = rfull;
        for m in 0..rmat.nrows() {
            if rmat[(m, m)] < 0.0 {
                for jj in 0..rmat.ncols() {
                    rmat[(m, jj)] = -rmat[(m, jj)];
                }
                for ii in 0..qmat.nrows() {
                    qmat[(ii, m)] = -qmat[(ii, m)];
                }
            }
        }
        let kept_inputs = select_cols(&ts.inputs, &kept);
        let preimages = solve_preimages(&kept_inputs, &rmat)?;
        let err = ortho_error(&qmat);
        debug_assert!(kept.len() <= h);
        return Ok(OrthonormalSystem {
            ortho_outputs: qmat,
            preimages,
            method: Method::Qr,
            kept_indices: kept,
            ortho_error: err,
        });
    }
}

/// Reconstruction from an orthonormal system: expand `y` over the
/// orthonormalized outputs and carry the coefficients to the preimages.
///
/// `u_n = sum_i <y, q_i> preimage_i` and `T u_n = sum_i <y, q_i> q_i`;
/// the residual `||y - T u_n||` measures how much of `y` lies outside the
/// span of the training outputs.
pub fn reconstruct_ortho(sys: &OrthonormalSystem, y: &DVector<f64>) -> Result<Reconstruction> {
    let h = sys.ortho_outputs.nrows();
    if y.len() != h {
        return Err(Error::DimensionMismatch { expected: h, got: y.len() });
    }
    let coefficients = sys.ortho_outputs.tr_mul(y);
    let u_n = &sys.preimages * &coefficients;
    let tu_n = &sys.ortho_outputs * &coefficients;
    let residual = (y - &tu_n).norm();
    Ok(Reconstruction { coefficients, u_n, tu_n, residual, method: sys.method })
}

/// Applies the reflector `I - 2 v v^T` (with `v` unit-length) in place.
fn reflect(v: &DVector<f64>, a: &mut DVector<f64>) {
    let c = 2.0 * v.dot(a);
    a.axpy(-c, v, 1.0);
}

fn select_cols(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

/// Solves `P R = U` for `P` column by column, where `R` is upper
/// triangular with positive diagonal.
fn solve_preimages(u_kept: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let rank = r.ncols();
    let k = u_kept.nrows();
    let mut pre = DMatrix::zeros(k, rank);
    for m in 0..rank {
        let mut col = u_kept.column(m).into_owned();
        for i in 0..m {
            let rim = r[(i, m)];
            for row in 0..k {
                col[row] -= rim * pre[(row, i)];
            }
        }
        let d = r[(m, m)];
        if d <= 0.0 {
            return Err(Error::Config("triangular factor lost positivity".into()));
        }
        col /= d;
        pre.set_column(m, &col);
    }
    Ok(pre)
}
