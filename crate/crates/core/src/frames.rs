//! Reconstruction through the Gram system of the raw training outputs.
//!
//! Instead of orthonormalizing, this path treats the training outputs as a
//! (possibly redundant) frame for their span.  Solving `G X = (⟨y, y_j⟩)_j`
//! with the Gram matrix `G = (⟨y_i, y_j⟩)` identifies `X_i = ⟨y, S⁻¹ y_i⟩`,
//! the analysis coefficients against the canonical dual family, and the
//! reconstruction is `u = Σ X_i u_i` with image `T u = Σ X_i y_i` — again
//! without ever applying the operator.  The Gram matrix is assembled once;
//! each new measurement costs one right-hand side and one solve.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::recon::{Method, Reconstruction};
use crate::training::TrainingSet;

/// Eigenvalues of the Gram matrix below this fraction of the largest are
/// treated as zero when estimating frame bounds and numerical rank.
pub const DEFAULT_RCOND_CUT: f64 = 1e-12;

/// Below this reciprocal condition number, an unregularized solve is
/// refused outright.
const SINGULAR_RCOND: f64 = 1e-14;

/// Relative defect above which a vector is rejected as lying outside the
/// span of the family.
const SPAN_DEFECT_TOL: f64 = 1e-8;

/// How to handle an ill-conditioned or rank-deficient Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// Plain solve; fails with [`Error::SingularGram`] when the matrix is
    /// numerically singular.
    None,
    /// Spectral truncation: solve on the eigenspaces with `λ > rcond_cut
    /// * λ_max`, yielding the minimum-norm solution on redundant data.
    Truncate { rcond_cut: f64 },
    /// Tikhonov shift: solve `(G + lambda I) X = rhs`.
    Ridge { lambda: f64 },
}

impl Regularization {
    /// Parses `none`, `truncate`, `truncate:<rcond>`, or `ridge:<lambda>`.
    pub fn parse(s: &str) -> Result<Self> {
        let reg = match s.split_once(':') {
            Option::None => match s {
                "none" => Regularization::None,
                "truncate" => Regularization::Truncate { rcond_cut: DEFAULT_RCOND_CUT },
                other => {
                    return Err(Error::Config(format!(
                        "unknown regularization {other:?}; expected none, truncate:<rcond>, or ridge:<lambda>"
                    )))
                }
            },
            Some(("truncate", v)) => {
                let rcond_cut = parse_param(v, "truncate")?;
                Regularization::Truncate { rcond_cut }
            }
            Some(("ridge", v)) => {
                let lambda = parse_param(v, "ridge")?;
                Regularization::Ridge { lambda }
            }
            Some((other, _)) => {
                return Err(Error::Config(format!(
                    "unknown regularization {other:?}; expected none, truncate:<rcond>, or ridge:<lambda>"
                )))
            }
        };
        reg.validate()?;
        Ok(reg)
    }

    /// Range checks: a truncation cut must lie in `(0, 1)`, a ridge shift
    /// must be positive.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Regularization::None => Ok(()),
            Regularization::Truncate { rcond_cut } => {
                if rcond_cut > 0.0 && rcond_cut < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "truncation rcond must lie in (0, 1), got {rcond_cut}"
                    )))
                }
            }
            Regularization::Ridge { lambda } => {
                if lambda > 0.0 && lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!("ridge lambda must be positive, got {lambda}")))
                }
            }
        }
    }
}

impl std::fmt::Display for Regularization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Regularization::None => f.write_str("none"),
            Regularization::Truncate { rcond_cut } => write!(f, "truncate:{rcond_cut:e}"),
            Regularization::Ridge { lambda } => write!(f, "ridge:{lambda:e}"),
        }
    }
}

fn parse_param(v: &str, what: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("bad {what} parameter {v:?}")))
}

enum GramSolver {
    Cholesky(Cholesky<f64, Dyn>),
    /// Spectral solve: `X = V diag(inv_values) Vᵀ rhs`, with truncated
    /// directions carrying an inverse of zero.
    Eigen { vectors: DMatrix<f64>, inv_values: DVector<f64> },
}

/// A family of training outputs prepared for repeated Gram solves.
pub struct FrameSystem {
    /// The family itself, one vector per column (`h x n`).
    pub outputs: DMatrix<f64>,
    /// Gram matrix `G_ij = ⟨y_i, y_j⟩`.
    pub gram: DMatrix<f64>,
    /// Estimated frame bounds `(A, B)` of the span the family generates:
    /// the extreme *numerically nonzero* eigenvalues of `G`.
    pub bounds: (f64, f64),
    /// Reciprocal condition number `λ_min / λ_max` of `G` (clamped at 0).
    pub rcond: f64,
    /// The policy this system was built with.
    pub regularization: Regularization,
    solver: GramSolver,
}

impl std::fmt::Debug for FrameSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrameSystem")
            .field("outputs", &format_args!("{}x{}", self.outputs.nrows(), self.outputs.ncols()))
            .field("bounds", &self.bounds)
            .field("rcond", &self.rcond)
            .field("regularization", &self.regularization)
            .finish()
    }
}

impl FrameSystem {
    /// Prepares Gram solves for an arbitrary column family.
    ///
    /// Always computes the eigendecomposition of `G` (it supplies the
    /// bounds and condition estimate); the solver is a Cholesky
    /// factorization when the matrix is comfortably positive definite and
    /// a spectral solve otherwise.
    pub fn from_outputs(outputs: &DMatrix<f64>, regularization: Regularization) -> Result<Self> {
        regularization.validate()?;
        let n = outputs.ncols();
        if n == 0 {
            return Err(Error::ZeroFamily);
        }
        let gram = gram_of(outputs);
        let (vectors, values) = sym_eigen_desc(&gram);
        let lam_max = values[0];
        if !(lam_max > 0.0) {
            return Err(Error::ZeroFamily);
        }
        let rcond = (values[n - 1] / lam_max).max(0.0);
        let zero_cut = match regularization {
            Regularization::Truncate { rcond_cut } => rcond_cut,
            _ => DEFAULT_RCOND_CUT,
        };
        let lower = values
            .iter()
            .cloned()
            .filter(|&v| v > zero_cut * lam_max)
            .fold(f64::INFINITY, f64::min);
        let bounds = (lower, lam_max);

        let solver = match regularization {
            Regularization::None => {
                if rcond < SINGULAR_RCOND {
                    return Err(Error::SingularGram { rcond });
                }
                if rcond >= DEFAULT_RCOND_CUT {
                    match Cholesky::new(gram.clone()) {
                        Some(ch) => GramSolver::Cholesky(ch),
                        Option::None => spectral_solver(&vectors, &values, 0.0),
                    }
                } else {
                    spectral_solver(&vectors, &values, 0.0)
                }
            }
            Regularization::Truncate { rcond_cut } => {
                spectral_solver(&vectors, &values, rcond_cut * lam_max)
            }
            Regularization::Ridge { lambda } => {
                let mut shifted = gram.clone();
                for i in 0..n {
                    shifted[(i, i)] += lambda;
                }
                match Cholesky::new(shifted) {
                    Some(ch) => GramSolver::Cholesky(ch),
                    Option::None => {
                        let shifted_values = values.map(|v| v + lambda);
                        spectral_solver(&vectors, &shifted_values, 0.0)
                    }
                }
            }
        };
        Ok(FrameSystem {
            outputs: outputs.clone(),
            gram,
            bounds,
            rcond,
            regularization,
            solver,
        })
    }

    /// Number of vectors in the family.
    pub fn len(&self) -> usize {
        self.outputs.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension of the space the family lives in.
    pub fn output_dim(&self) -> usize {
        self.outputs.nrows()
    }

    /// Solves `G a = rhs` for a right-hand side that is already paired
    /// against the family (i.e. `rhs_j = ⟨v, y_j⟩` for some `v`).
    pub fn solve_gram(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        if rhs.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: rhs.len() });
        }
        Ok(self.solve(rhs))
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match &self.solver {
            GramSolver::Cholesky(ch) => ch.solve(rhs),
            GramSolver::Eigen { vectors, inv_values } => {
                let mut w = vectors.tr_mul(rhs);
                for i in 0..w.len() {
                    w[i] *= inv_values[i];
                }
                vectors * w
            }
        }
    }

    fn solve_matrix(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.solver {
            GramSolver::Cholesky(ch) => ch.solve(rhs),
            GramSolver::Eigen { vectors, inv_values } => {
                let mut w = vectors.tr_mul(rhs);
                for i in 0..w.nrows() {
                    let inv = inv_values[i];
                    for j in 0..w.ncols() {
                        w[(i, j)] *= inv;
                    }
                }
                vectors * w
            }
        }
    }
}

fn spectral_solver(vectors: &DMatrix<f64>, values: &DVector<f64>, cut: f64) -> GramSolver {
    let inv_values = values.map(|v| if v > cut && v > 0.0 { 1.0 / v } else { 0.0 });
    GramSolver::Eigen { vectors: vectors.clone(), inv_values }
}

/// Gram matrix of the columns, assembled symmetrically.
fn gram_of(outputs: &DMatrix<f64>) -> DMatrix<f64> {
    let n = outputs.ncols();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = outputs.column(i).dot(&outputs.column(j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Symmetric eigendecomposition with eigenvalues sorted descending.
fn sym_eigen_desc(g: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let eig = g.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vectors, values)
}

/// Prepares the Gram system of a training set's outputs.
pub fn build_frame_system(ts: &TrainingSet, regularization: Regularization) -> Result<FrameSystem> {
    FrameSystem::from_outputs(&ts.outputs, regularization)
}

/// Solves `G X = (⟨y, y_j⟩)_j` for the dual-analysis coefficients of `y`.
pub fn solve_frame_coefficients(fs: &FrameSystem, y: &DVector<f64>) -> Result<DVector<f64>> {
    if y.len() != fs.output_dim() {
        return Err(Error::DimensionMismatch { expected: fs.output_dim(), got: y.len() });
    }
    let rhs = fs.outputs.tr_mul(y);
    Ok(fs.solve(&rhs))
}

/// Full reconstruction along the frame path: coefficients from the Gram
/// solve, `u = Σ X_i u_i`, `T u = Σ X_i y_i`.
///
/// `fs` must have been built from the outputs of `ts`.
pub fn reconstruct_frame(
    fs: &FrameSystem,
    ts: &TrainingSet,
    y: &DVector<f64>,
) -> Result<Reconstruction> {
    if ts.len() != fs.len() {
        return Err(Error::DimensionMismatch { expected: fs.len(), got: ts.len() });
    }
    if ts.output_dim() != fs.output_dim() {
        return Err(Error::DimensionMismatch { expected: fs.output_dim(), got: ts.output_dim() });
    }
    let coefficients = solve_frame_coefficients(fs, y)?;
    let u_n = &ts.inputs * &coefficients;
    let tu_n = &fs.outputs * &coefficients;
    let residual = (y - &tu_n).norm();
    Ok(Reconstruction { coefficients, u_n, tu_n, residual, method: Method::Frame })
}

/// Applies the frame operator restricted to the family's span:
/// `S v = Σ ⟨v, y_i⟩ y_i`.
///
/// `v` must lie in the span; a relative projection defect above `1e-8`
/// is rejected as [`Error::NotInSpan`].
pub fn apply_restricted_frame_operator(fs: &FrameSystem, v: &DVector<f64>) -> Result<DVector<f64>> {
    if v.len() != fs.output_dim() {
        return Err(Error::DimensionMismatch { expected: fs.output_dim(), got: v.len() });
    }
    let norm_v = v.norm();
    if norm_v > 0.0 {
        let coeffs = fs.solve(&fs.outputs.tr_mul(v));
        let projected = &fs.outputs * coeffs;
        let defect = (v - projected).norm() / norm_v;
        if defect > SPAN_DEFECT_TOL {
            return Err(Error::NotInSpan { defect });
        }
    }
    let analysis = fs.outputs.tr_mul(v);
    Ok(&fs.outputs * analysis)
}

/// Frame bounds of a raw family: the extreme numerically nonzero
/// eigenvalues of its Gram matrix.
pub fn frame_bounds(outputs: &DMatrix<f64>) -> Result<(f64, f64)> {
    if outputs.ncols() == 0 {
        return Err(Error::ZeroFamily);
    }
    let gram = gram_of(outputs);
    let (_, values) = sym_eigen_desc(&gram);
    let lam_max = values[0];
    if !(lam_max > 0.0) {
        return Err(Error::ZeroFamily);
    }
    let lower = values
        .iter()
        .cloned()
        .filter(|&v| v > DEFAULT_RCOND_CUT * lam_max)
        .fold(f64::INFINITY, f64::min);
    Ok((lower, lam_max))
}

/// Canonical dual family `d_j = Σ_i (G⁻¹)_{ij} y_i`, column per dual.
///
/// For an independent family this is the biorthogonal system
/// (`⟨y_i, d_j⟩ = δ_ij`); under truncation it is the dual on the
/// numerically resolved subspace.
pub fn dual_family(fs: &FrameSystem) -> Result<DMatrix<f64>> {
    let coeffs = fs.solve_matrix(&DMatrix::identity(fs.len(), fs.len()));
    Ok(&fs.outputs * coeffs)
}

/// Expansion of each projected family member over a leading subfamily.
///
/// Column `i` of the result holds the coefficients `c` solving
/// `G_n c = (⟨y_i, y_j⟩)_{j<=n}`, i.e. the expansion of `P_{span(y_1..y_n)}
/// y_i` over the first `n` family members.
pub fn projection_coefficient_table(
    outputs: &DMatrix<f64>,
    n: usize,
    regularization: Regularization,
) -> Result<DMatrix<f64>> {
    let total = outputs.ncols();
    if n == 0 || n > total {
        return Err(Error::Config(format!("subfamily size {n} must lie in 1..={total}")));
    }
    let leading = outputs.columns(0, n).into_owned();
    let fs = FrameSystem::from_outputs(&leading, regularization)?;
    let rhs = leading.tr_mul(outputs);
    Ok(fs.solve_matrix(&rhs))
}

/// Approximates the solution for a measurement known only through frame
/// coefficients: given `a` with `y = Σ_i a_i y_i` over the *full* family,
/// computes `ũ_n = Σ_i a_i · (reconstruction from the first n pairs of
/// y_i)`.
///
/// At `n = len` this coincides with the frame reconstruction of `y`
/// itself; at smaller `n` it tracks how much of each training direction
/// the truncated system resolves.  The residual compares `T ũ_n` against
/// `y = Σ a_i y_i`.
pub fn riesz_approximation(
    ts_full: &TrainingSet,
    n: usize,
    u_dagger_coeffs: &DVector<f64>,
    regularization: Regularization,
) -> Result<Reconstruction> {
    let total = ts_full.len();
    if u_dagger_coeffs.len() != total {
        return Err(Error::DimensionMismatch { expected: total, got: u_dagger_coeffs.len() });
    }
    let table = projection_coefficient_table(&ts_full.outputs, n, regularization)?;
    let coefficients = &table * u_dagger_coeffs;
    let inputs_n = ts_full.inputs.columns(0, n);
    let outputs_n = ts_full.outputs.columns(0, n);
    let u_n = &inputs_n * &coefficients;
    let tu_n = &outputs_n * &coefficients;
    let y_target = &ts_full.outputs * u_dagger_coeffs;
    let residual = (&y_target - &tu_n).norm();
    Ok(Reconstruction { coefficients, u_n, tu_n, residual, method: Method::Frame })
}
