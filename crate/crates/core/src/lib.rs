//! Weakly neutral inclusions of general shape realised by imperfect (low
//! conductivity) interfaces in two dimensions.
//!
//! The crate builds the interface parameter from the exterior conformal map
//! of a shape and checks the result with two independent solvers:
//!
//! * [`disk_spectral`]: Fourier–Galerkin solution of the pulled-back problem
//!   on the unit circle, including the tridiagonal odd-mode systems and their
//!   explicit inverse.
//! * [`bem`]: a Nyström boundary-integral solver working directly on the
//!   shape boundary.
//!
//! [`verify`] holds the measurement instruments (far-field decay fits,
//! dual-solver cross checks, polarization tensor covariance and the
//! ellipse/ellipsoid geometric residual).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bem;
pub mod cli;
pub mod conformal;
pub mod disk_spectral;
pub mod error;
pub mod interface;
pub mod linalg;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// `2 - sqrt(3)`, the largest `|b_Omega|` for which the closed-form parameter stays non-negative.
pub const B_MAX: f64 = 0.267_949_192_431_122_8;
