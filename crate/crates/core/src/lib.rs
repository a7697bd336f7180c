//! Data-driven reconstruction for linear inverse problems.
//!
//! Given training pairs `(u_i, y_i)` of an unknown injective linear
//! operator `T` (so `y_i = T u_i`), this crate solves `T u = y` for new
//! measurements `y` without ever applying or representing `T`:
//!
//! * [`ortho`] orthonormalizes the training outputs while carrying the
//!   inputs along, so reconstruction is an expansion over an orthonormal
//!   family and its preimages.  Four backends (classical and modified
//!   Gram-Schmidt, Householder reflections, dense QR) trade speed against
//!   floating-point orthogonality loss.
//! * [`frames`] skips orthonormalization and solves the Gram system of
//!   the raw outputs instead, which tolerates redundant (frame-like)
//!   training data and amortizes over repeated measurements.
//! * [`operators`] supplies forward maps for *building* training data —
//!   explicit matrices and a parallel-beam Radon projector — plus the
//!   pseudoinverse oracle the tests check every path against.
//! * [`datasets`] loads PGM corpora and generates synthetic image
//!   families with certified linear independence.
//! * [`diagnostics`] measures what the theory promises: orthogonality
//!   error growth, weak-convergence probe pairings, coefficient
//!   summability, and timing.
//! * [`io`] / [`pgm`] define the on-disk formats (round-trip CSV, the
//!   DDRP binary container, 8-bit PGM); [`svg`] renders diagnostic
//!   curves.

pub mod datasets;
pub mod diagnostics;
pub mod error;
pub mod frames;
pub mod io;
pub mod operators;
pub mod ortho;
pub mod pgm;
pub mod recon;
pub mod svg;
pub mod training;

pub use error::{Error, Result};
pub use frames::{
    apply_restricted_frame_operator, build_frame_system, dual_family, frame_bounds,
    reconstruct_frame, riesz_approximation, solve_frame_coefficients, FrameSystem, Regularization,
};
pub use ortho::{
    classical_gram_schmidt, householder_orthonormalize, modified_gram_schmidt, ortho_error,
    qr_orthonormalize, reconstruct_ortho, OrthonormalSystem,
};
pub use recon::{reconstruct_with, Method, Reconstruction};
pub use training::{ToleranceConfig, TrainingSet};
