//! Translation invariance and rotation covariance of the polarization tensor.

use num_complex::Complex64;
use serde::Serialize;

use crate::bem::{polarization_general, BoundaryMesh};
use crate::error::Result;
use crate::tensor::rotate;

#[derive(Debug, Clone, Serialize)]
pub struct Invariance {
    /// `||T(Omega + t) - T(Omega)||`.
    pub translation: f64,
    /// `||T(R Omega) - R T(Omega) R^T||`.
    pub rotation: f64,
}

/// Recomputes the tensor on the translated and on the rotated boundary, with
/// `beta` carried along with the nodes.
pub fn pt_invariance(mesh: &BoundaryMesh, beta: &[f64], rho: f64, t: [f64; 2]) -> Result<Invariance> {
    let base = polarization_general(mesh, beta)?;
    let moved = polarization_general(&mesh.translated(Complex64::new(t[0], t[1])), beta)?;
    let turned = polarization_general(&mesh.rotated(rho), beta)?;
    Ok(Invariance {
        translation: moved.distance(&base.t),
        rotation: turned.distance(&rotate(&base.t, rho)),
    })
}
