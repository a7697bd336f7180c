//! Training data: paired inputs `u_i` and measured outputs `y_i = T u_i`
//! of an unknown injective linear operator, stored column-wise.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Paired training data for an unknown linear operator.
///
/// Column `i` of `inputs` is the i-th training input `u_i` (dimension `k`);
/// column `i` of `outputs` is its measurement `y_i` (dimension `h`).  The
/// operator itself never appears: everything downstream works from these
/// pairs alone.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    /// Input vectors, one per column (`k x n`).
    pub inputs: DMatrix<f64>,
    /// Output vectors, one per column (`h x n`).
    pub outputs: DMatrix<f64>,
}

impl TrainingSet {
    /// Pairs up `inputs` and `outputs` after validating the invariants:
    /// equal column counts, at least one pair, all entries finite, and no
    /// output column identically zero.
    pub fn new(inputs: DMatrix<f64>, outputs: DMatrix<f64>) -> Result<Self> {
        if inputs.ncols() != outputs.ncols() {
            return Err(Error::DimensionMismatch {
                expected: inputs.ncols(),
                got: outputs.ncols(),
            });
        }
        if inputs.ncols() == 0 {
            return Err(Error::EmptyCorpus);
        }
        for i in 0..inputs.ncols() {
            if inputs.column(i).iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidTrainingPair {
                    index: i,
                    reason: "input has a non-finite entry".into(),
                });
            }
            if outputs.column(i).iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidTrainingPair {
                    index: i,
                    reason: "output has a non-finite entry".into(),
                });
            }
            if outputs.column(i).iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidTrainingPair {
                    index: i,
                    reason: "output is the zero vector".into(),
                });
            }
        }
        Ok(TrainingSet { inputs, outputs })
    }

    /// Number of training pairs.
    pub fn len(&self) -> usize {
        self.inputs.ncols()
    }

    /// True when there are no pairs (unreachable through [`TrainingSet::new`]).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension of the input space.
    pub fn input_dim(&self) -> usize {
        self.inputs.nrows()
    }

    /// Dimension of the output space.
    pub fn output_dim(&self) -> usize {
        self.outputs.nrows()
    }

    /// The sub-problem made of the first `m` pairs.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::Config(format!(
                "prefix length {m} must lie in 1..={}",
                self.len()
            )));
        }
        Ok(TrainingSet {
            inputs: self.inputs.columns(0, m).into_owned(),
            outputs: self.outputs.columns(0, m).into_owned(),
        })
    }

    /// Reorders the pairs by `perm`, which must be a permutation of
    /// `0..len()`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: perm.len() });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::Config(format!("not a permutation of 0..{n}")));
            }
            seen[p] = true;
        }
        let inputs = DMatrix::from_fn(self.input_dim(), n, |r, c| self.inputs[(r, perm[c])]);
        let outputs = DMatrix::from_fn(self.output_dim(), n, |r, c| self.outputs[(r, perm[c])]);
        Ok(TrainingSet { inputs, outputs })
    }

    /// Swaps the roles of inputs and outputs.
    ///
    /// Useful for running the paired orthonormalization on the *inputs*
    /// while the outputs tag along: fails if some input column is zero,
    /// since that column could never be normalized.
    pub fn swapped(&self) -> Result<Self> {
        TrainingSet::new(self.outputs.clone(), self.inputs.clone())
    }
}

/// Numerical tolerances shared by the orthonormalization backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative dependence threshold: column `y_i` is rejected when its
    /// residual after projection satisfies `r <= dependence_tol * ||y_i||`.
    pub dependence_tol: f64,
    /// Tolerance used when asserting orthonormality of a produced system.
    pub ortho_assert_tol: f64,
    /// Run a second projection pass per column.  Off by default: the plain
    /// recursions are the objects under study, and their raw error behavior
    /// must stay observable.
    pub reorthogonalize: bool,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            dependence_tol: 1e-10,
            ortho_assert_tol: 1e-8,
            reorthogonalize: false,
        }
    }
}

impl ToleranceConfig {
    /// Checks that both tolerances are positive and the dependence
    /// threshold is meaningfully below 1.
    pub fn validate(&self) -> Result<()> {
        if !(self.dependence_tol > 0.0 && self.dependence_tol < 1.0) {
            return Err(Error::Config(format!(
                "dependence_tol must lie in (0, 1), got {}",
                self.dependence_tol
            )));
        }
        if !(self.ortho_assert_tol > 0.0) {
            return Err(Error::Config(format!(
                "ortho_assert_tol must be positive, got {}",
                self.ortho_assert_tol
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn rejects_mismatched_pair_counts() {
        let err = TrainingSet::new(DMatrix::zeros(2, 3), DMatrix::identity(2, 2));
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 3, got: 2 })));
    }

    #[test]
    fn rejects_zero_output_column() {
        let inputs = dmatrix![1.0, 2.0; 0.0, 1.0];
        let outputs = dmatrix![1.0, 0.0; 1.0, 0.0];
        let err = TrainingSet::new(inputs, outputs);
        assert!(matches!(err, Err(Error::InvalidTrainingPair { index: 1, .. })));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let inputs = dmatrix![1.0; f64::NAN];
        let outputs = dmatrix![1.0; 0.0];
        assert!(TrainingSet::new(inputs, outputs).is_err());
        let inputs = dmatrix![1.0; 1.0];
        let outputs = dmatrix![f64::INFINITY; 0.0];
        assert!(TrainingSet::new(inputs, outputs).is_err());
    }

    #[test]
    fn zero_inputs_are_allowed() {
        let ts = TrainingSet::new(dmatrix![0.0; 0.0], dmatrix![1.0; 0.0]).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts.input_dim(), 2);
        assert_eq!(ts.output_dim(), 2);
    }

    #[test]
    fn prefix_and_permuted_reorder_pairs_together() {
        let ts = TrainingSet::new(
            dmatrix![1.0, 2.0, 3.0],
            dmatrix![10.0, 20.0, 30.0],
        )
        .unwrap();
        let p = ts.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.inputs, dmatrix![3.0, 1.0, 2.0]);
        assert_eq!(p.outputs, dmatrix![30.0, 10.0, 20.0]);
        let pre = p.prefix(2).unwrap();
        assert_eq!(pre.outputs, dmatrix![30.0, 10.0]);

        assert!(ts.permuted(&[0, 0, 1]).is_err());
        assert!(ts.permuted(&[0, 1]).is_err());
        assert!(ts.prefix(0).is_err());
        assert!(ts.prefix(4).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig { dependence_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ToleranceConfig { dependence_tol: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ToleranceConfig { ortho_assert_tol: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
