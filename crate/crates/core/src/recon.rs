//! Reconstruction results and the method tags shared by every backend.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Which algorithm produced a reconstruction or orthonormal system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Classical Gram-Schmidt recursion with paired preimage updates.
    ClassicalGs,
    /// Modified Gram-Schmidt recursion with paired preimage updates.
    ModifiedGs,
    /// Householder reflections, preimages recovered by a triangular solve.
    Householder,
    /// Dense QR factorization, preimages recovered by a triangular solve.
    Qr,
    /// Gram-system solve against the raw training outputs.
    Frame,
}

impl Method {
    /// Every method, in stability order (least stable first).
    pub const ALL: [Method; 5] = [
        Method::ClassicalGs,
        Method::ModifiedGs,
        Method::Householder,
        Method::Qr,
        Method::Frame,
    ];

    /// The orthonormalization backends, excluding the frame path.
    pub const ORTHO: [Method; 4] =
        [Method::ClassicalGs, Method::ModifiedGs, Method::Householder, Method::Qr];

    /// Short stable identifier used in file names and CSV rows.
    pub fn label(self) -> &'static str {
        match self {
            Method::ClassicalGs => "cgs",
            Method::ModifiedGs => "mgs",
            Method::Householder => "householder",
            Method::Qr => "qr",
            Method::Frame => "frame",
        }
    }

    /// Inverse of [`Method::label`].
    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "cgs" => Ok(Method::ClassicalGs),
            "mgs" => Ok(Method::ModifiedGs),
            "householder" => Ok(Method::Householder),
            "qr" => Ok(Method::Qr),
            "frame" => Ok(Method::Frame),
            other => Err(Error::Config(format!(
                "unknown method {other:?}; expected cgs, mgs, householder, qr, or frame"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Runs the complete reconstruction pipeline for one method: system
/// setup (orthonormalization or Gram assembly) followed by the solve.
pub fn reconstruct_with(
    method: Method,
    ts: &crate::training::TrainingSet,
    y: &DVector<f64>,
    cfg: &crate::training::ToleranceConfig,
    regularization: crate::frames::Regularization,
) -> Result<Reconstruction> {
    match method {
        Method::ClassicalGs => {
            let sys = crate::ortho::classical_gram_schmidt(ts, cfg)?;
            crate::ortho::reconstruct_ortho(&sys, y)
        }
        Method::ModifiedGs => {
            let sys = crate::ortho::modified_gram_schmidt(ts, cfg)?;
            crate::ortho::reconstruct_ortho(&sys, y)
        }
        Method::Householder => {
            let sys = crate::ortho::householder_orthonormalize(ts, cfg)?;
            crate::ortho::reconstruct_ortho(&sys, y)
        }
        Method::Qr => {
            let sys = crate::ortho::qr_orthonormalize(ts, cfg)?;
            crate::ortho::reconstruct_ortho(&sys, y)
        }
        Method::Frame => {
            let fs = crate::frames::build_frame_system(ts, regularization)?;
            crate::frames::reconstruct_frame(&fs, ts, y)
        }
    }
}

/// A regularized solution of `T u = y` built from training pairs.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Expansion coefficients in the basis the method worked in: the
    /// orthonormalized outputs for the Gram-Schmidt family, the raw
    /// training outputs for the frame path.
    pub coefficients: DVector<f64>,
    /// The reconstructed input-space vector `u_n`.
    pub u_n: DVector<f64>,
    /// The image of the reconstruction, `T u_n`, assembled without ever
    /// applying `T`.
    pub tu_n: DVector<f64>,
    /// `||y - T u_n||`, the measurement-space residual.
    pub residual: f64,
    /// The algorithm that produced this reconstruction.
    pub method: Method,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.label()).unwrap(), m);
        }
        assert!(Method::parse("qR").is_err());
        assert!(Method::parse("").is_err());
    }
}
