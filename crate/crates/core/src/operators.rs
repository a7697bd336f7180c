//! Forward operators: explicit matrices, a parallel-beam Radon projector,
//! and the pseudoinverse oracle used to cross-check every reconstruction
//! path.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::training::TrainingSet;

/// Anything that can map input vectors to measurement vectors.
///
/// Only training-set *construction* goes through this trait; the
/// reconstruction paths never apply an operator.
pub trait ForwardOperator {
    /// Dimension of the input space.
    fn input_dim(&self) -> usize;
    /// Dimension of the measurement space.
    fn output_dim(&self) -> usize;
    /// Applies the operator to one input vector.
    fn apply(&self, u: &DVector<f64>) -> Result<DVector<f64>>;
}

/// A dense explicit operator `T`.
#[derive(Debug, Clone)]
pub struct MatrixOperator {
    /// The matrix of `T` (`h x k`).
    pub matrix: DMatrix<f64>,
}

impl MatrixOperator {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        MatrixOperator { matrix }
    }

    /// Smallest and largest singular values, used by tests to check
    /// injectivity before trusting an instance.
    pub fn singular_range(&self) -> (f64, f64) {
        let sv = self.matrix.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0f64, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        (min, max)
    }
}

impl ForwardOperator for MatrixOperator {
    fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn output_dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        if u.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.ncols(),
                got: u.len(),
            });
        }
        Ok(&self.matrix * u)
    }
}

/// Acquisition geometry of a parallel-beam sinogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SinogramGeometry {
    /// Side length `s` of the square image.
    pub image_side: usize,
    /// Number of projection angles, equally spaced over `[0, pi)`.
    pub num_angles: usize,
    /// Number of detector bins per angle.
    pub num_bins: usize,
}

impl SinogramGeometry {
    /// Validates that every pixel center projects inside the detector for
    /// every angle, which requires `num_bins >= ceil(sqrt(2) * side)`.
    pub fn new(image_side: usize, num_angles: usize, num_bins: usize) -> Result<Self> {
        if image_side == 0 {
            return Err(Error::GeometryMismatch("image side must be positive".into()));
        }
        if num_angles == 0 {
            return Err(Error::GeometryMismatch("need at least one angle".into()));
        }
        let min_bins = Self::min_bins(image_side);
        if num_bins < min_bins {
            return Err(Error::GeometryMismatch(format!(
                "{num_bins} bins cannot cover a side-{image_side} image; need at least {min_bins}"
            )));
        }
        Ok(SinogramGeometry { image_side, num_angles, num_bins })
    }

    /// Smallest detector that covers the image diagonal: `ceil(sqrt(2) * side)`.
    pub fn min_bins(image_side: usize) -> usize {
        (std::f64::consts::SQRT_2 * image_side as f64).ceil() as usize
    }

    /// The projection angles `j * pi / num_angles`.
    pub fn angles(&self) -> Vec<f64> {
        let k = self.num_angles;
        (0..k).map(|j| j as f64 * std::f64::consts::PI / k as f64).collect()
    }

    /// Flattened input dimension (`side * side`).
    pub fn input_dim(&self) -> usize {
        self.image_side * self.image_side
    }

    /// Flattened measurement dimension (`num_bins * num_angles`).
    pub fn output_dim(&self) -> usize {
        self.num_bins * self.num_angles
    }
}

/// Parallel-beam Radon transform of a square image, by pixel-driven
/// splatting.
///
/// Pixel `(row, col)` sits at signed offset `t = (col - c) cos θ +
/// (row - c) sin θ` from the center ray, with `c = (side - 1) / 2`.  Its
/// intensity is split linearly between the two detector bins whose centers
/// bracket `t` (bin `m` is centered at `m - (num_bins - 1) / 2`).  The map
/// is exactly linear in the image, and each pixel deposits its full
/// intensity, so every detector column sums to the total image mass.
///
/// Returns the sinogram as a `num_bins x num_angles` matrix.
pub fn radon_forward(image: &DMatrix<f64>, geom: &SinogramGeometry) -> Result<DMatrix<f64>> {
    let s = geom.image_side;
    if image.nrows() != s || image.ncols() != s {
        return Err(Error::GeometryMismatch(format!(
            "image is {}x{}, geometry expects {s}x{s}",
            image.nrows(),
            image.ncols()
        )));
    }
    let m = geom.num_bins;
    let c = (s as f64 - 1.0) / 2.0;
    let center_bin = (m as f64 - 1.0) / 2.0;
    let mut sino = DMatrix::zeros(m, geom.num_angles);
    for (j, theta) in geom.angles().into_iter().enumerate() {
        let (sin_t, cos_t) = theta.sin_cos();
        let mut col = sino.column_mut(j);
        for row in 0..s {
            let y_off = row as f64 - c;
            for x in 0..s {
                let w = image[(row, x)];
                if w == 0.0 {
                    continue;
                }
                let t = (x as f64 - c) * cos_t + y_off * sin_t;
                let p = t + center_bin;
                let lo = p.floor();
                let frac = p - lo;
                let lo = lo as isize;
                // The geometry invariant keeps p in [0, m - 1], but guard
                // the boundary where p == m - 1 exactly.
                if lo >= 0 && (lo as usize) < m {
                    col[lo as usize] += w * (1.0 - frac);
                }
                let hi = lo + 1;
                if frac != 0.0 && hi >= 0 && (hi as usize) < m {
                    col[hi as usize] += w * frac;
                }
            }
        }
    }
    Ok(sino)
}

/// The Radon transform as a [`ForwardOperator`] on row-major flattened
/// images; sinograms are flattened row-major as well.
#[derive(Debug, Clone, Copy)]
pub struct RadonOperator {
    pub geometry: SinogramGeometry,
}

impl RadonOperator {
    pub fn new(geometry: SinogramGeometry) -> Self {
        RadonOperator { geometry }
    }
}

impl ForwardOperator for RadonOperator {
    fn input_dim(&self) -> usize {
        self.geometry.input_dim()
    }

    fn output_dim(&self) -> usize {
        self.geometry.output_dim()
    }

    fn apply(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        let s = self.geometry.image_side;
        if u.len() != s * s {
            return Err(Error::DimensionMismatch { expected: s * s, got: u.len() });
        }
        let image = DMatrix::from_fn(s, s, |r, c| u[r * s + c]);
        let sino = radon_forward(&image, &self.geometry)?;
        Ok(flatten_row_major(&sino))
    }
}

/// Flattens a matrix row-major into a vector, the convention used for
/// both images and sinograms.
pub fn flatten_row_major(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(m.nrows() * m.ncols(), |i, _| m[(i / m.ncols(), i % m.ncols())])
}

/// Inverse of [`flatten_row_major`] for a known shape.
pub fn unflatten_row_major(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch { expected: rows * cols, got: v.len() });
    }
    Ok(DMatrix::from_fn(rows, cols, |r, c| v[r * cols + c]))
}

/// Builds a training set by pushing each input column through `op`.
pub fn make_training_set(op: &dyn ForwardOperator, inputs: &DMatrix<f64>) -> Result<TrainingSet> {
    if inputs.nrows() != op.input_dim() {
        return Err(Error::DimensionMismatch { expected: op.input_dim(), got: inputs.nrows() });
    }
    let n = inputs.ncols();
    let mut outputs = DMatrix::zeros(op.output_dim(), n);
    for i in 0..n {
        let y = op.apply(&inputs.column(i).into_owned())?;
        outputs.set_column(i, &y);
    }
    TrainingSet::new(inputs.clone(), outputs)
}

/// Ground-truth solver used to validate the data-driven paths: the
/// minimum-norm least-squares solution of `T u = y` with `u` restricted to
/// the span of the given inputs.
///
/// Forms an orthonormal basis `B` of the input span, factors `T B` by SVD,
/// and returns `B (T B)^+ y`.  This route shares nothing with the paired
/// recursions or the Gram solves it is used to check.
pub fn pseudo_inverse_oracle(
    op: &MatrixOperator,
    inputs: &DMatrix<f64>,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    if inputs.nrows() != op.matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: op.matrix.ncols(),
            got: inputs.nrows(),
        });
    }
    if y.len() != op.matrix.nrows() {
        return Err(Error::DimensionMismatch { expected: op.matrix.nrows(), got: y.len() });
    }
    let basis = orthonormal_span_basis(inputs)?;
    let restricted = &op.matrix * &basis;
    let svd = restricted.svd(true, true);
    let sv_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = f64::EPSILON * sv_max * op.matrix.nrows().max(basis.ncols()) as f64;
    let coeffs = svd
        .solve(y, cutoff)
        .map_err(|e| Error::Config(format!("SVD solve failed: {e}")))?;
    Ok(&basis * coeffs)
}

/// Orthonormal basis of the column span of `m`, via SVD with a relative
/// rank cutoff.
fn orthonormal_span_basis(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("SVD with u requested");
    let sv = &svd.singular_values;
    let sv_max = sv.iter().cloned().fold(0.0f64, f64::max);
    if sv_max == 0.0 {
        return Err(Error::ZeroFamily);
    }
    let cutoff = f64::EPSILON * sv_max * m.nrows().max(m.ncols()) as f64;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    Ok(u.columns(0, rank).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn geometry_enforces_detector_coverage() {
        assert_eq!(SinogramGeometry::min_bins(8), 12);
        assert_eq!(SinogramGeometry::min_bins(28), 40);
        assert!(SinogramGeometry::new(8, 4, 12).is_ok());
        assert!(matches!(
            SinogramGeometry::new(8, 4, 11),
            Err(Error::GeometryMismatch(_))
        ));
        assert!(SinogramGeometry::new(0, 4, 12).is_err());
        assert!(SinogramGeometry::new(8, 0, 12).is_err());
    }

    #[test]
    fn radon_center_pixel_hits_center_bin_at_every_angle() {
        // Odd side: the center pixel has t = 0 exactly, and an odd bin
        // count puts a bin center at 0.
        let geom = SinogramGeometry::new(5, 6, 9).unwrap();
        let mut image = DMatrix::zeros(5, 5);
        image[(2, 2)] = 1.0;
        let sino = radon_forward(&image, &geom).unwrap();
        for j in 0..6 {
            assert_eq!(sino[(4, j)], 1.0, "angle {j}");
            assert_eq!(sino.column(j).sum(), 1.0);
        }
    }

    #[test]
    fn radon_splits_offset_pixel_linearly_at_zero_angle() {
        // Side 4: c = 1.5, pixel column 3 has t = 1.5; with 6 bins the
        // center bin offset is 2.5, so p = 4.0 lands exactly on bin 4.
        let geom = SinogramGeometry::new(4, 1, 6).unwrap();
        let mut image = DMatrix::zeros(4, 4);
        image[(0, 3)] = 2.0;
        let sino = radon_forward(&image, &geom).unwrap();
        assert_eq!(sino[(4, 0)], 2.0);
        assert_eq!(sino.column(0).sum(), 2.0);

        // With 7 bins the offset is 3.0, so p = 4.5 splits evenly.
        let geom = SinogramGeometry::new(4, 1, 7).unwrap();
        let sino = radon_forward(&image, &geom).unwrap();
        assert_eq!(sino[(4, 0)], 1.0);
        assert_eq!(sino[(5, 0)], 1.0);
    }

    #[test]
    fn radon_rejects_mismatched_image() {
        let geom = SinogramGeometry::new(4, 2, 6).unwrap();
        let image = DMatrix::zeros(5, 5);
        assert!(matches!(radon_forward(&image, &geom), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn matrix_operator_applies_and_checks_dims() {
        let op = MatrixOperator::new(dmatrix![1.0, 2.0; 3.0, 4.0; 5.0, 6.0]);
        let y = op.apply(&dvector![1.0, 1.0]).unwrap();
        assert_eq!(y, dvector![3.0, 7.0, 11.0]);
        assert!(op.apply(&dvector![1.0]).is_err());
        let (min, max) = op.singular_range();
        assert!(min > 0.0 && max > min);
    }

    #[test]
    fn training_set_from_radon_impulses() {
        // Two impulses in different columns: at angle 0 their sinograms
        // occupy different bins, so the pairs are independent.
        let geom = SinogramGeometry::new(3, 1, 5).unwrap();
        let op = RadonOperator::new(geom);
        let mut inputs = DMatrix::zeros(9, 2);
        inputs[(4, 0)] = 1.0; // center pixel (1,1)
        inputs[(5, 1)] = 1.0; // pixel (1,2)
        let ts = make_training_set(&op, &inputs).unwrap();
        assert_eq!(ts.output_dim(), 5);
        let y0 = ts.outputs.column(0);
        let y1 = ts.outputs.column(1);
        assert_eq!(y0.dot(&y1), 0.0, "supports must be disjoint");
        assert_eq!(y0.sum(), 1.0);
        assert_eq!(y1.sum(), 1.0);
    }

    #[test]
    fn make_training_set_rejects_zero_image() {
        let op = MatrixOperator::new(DMatrix::identity(3, 3));
        let mut inputs = DMatrix::zeros(3, 2);
        inputs[(0, 0)] = 1.0;
        let err = make_training_set(&op, &inputs);
        assert!(matches!(err, Err(Error::InvalidTrainingPair { index: 1, .. })));
    }

    #[test]
    fn oracle_on_full_span_equals_plain_pseudoinverse() {
        let t = dmatrix![2.0, 0.0; 0.0, 1.0; 0.0, 0.0];
        let op = MatrixOperator::new(t);
        let inputs = DMatrix::identity(2, 2);
        let u = pseudo_inverse_oracle(&op, &inputs, &dvector![2.0, 1.0, 5.0]).unwrap();
        assert_relative_eq!(u, dvector![1.0, 1.0], epsilon = 1e-12);
    }

    #[test]
    fn oracle_restricts_to_the_input_span() {
        let op = MatrixOperator::new(dmatrix![2.0, 0.0; 0.0, 1.0]);
        let inputs = dmatrix![1.0; 0.0];
        let u = pseudo_inverse_oracle(&op, &inputs, &dvector![2.0, 1.0]).unwrap();
        // Only the e1 component is reachable.
        assert_relative_eq!(u, dvector![1.0, 0.0], epsilon = 1e-12);
    }

    #[test]
    fn oracle_zero_measurement_gives_zero() {
        let op = MatrixOperator::new(dmatrix![1.0, 1.0; 0.0, 1.0]);
        let inputs = DMatrix::identity(2, 2);
        let u = pseudo_inverse_oracle(&op, &inputs, &dvector![0.0, 0.0]).unwrap();
        assert!(u.norm() < 1e-14);
    }

    #[test]
    fn flatten_round_trip() {
        let m = dmatrix![1.0, 2.0, 3.0; 4.0, 5.0, 6.0];
        let v = flatten_row_major(&m);
        assert_eq!(v, dvector![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(unflatten_row_major(&v, 2, 3).unwrap(), m);
        assert!(unflatten_row_major(&v, 3, 3).is_err());
    }
}
