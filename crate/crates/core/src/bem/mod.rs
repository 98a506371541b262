//! Boundary-integral solver on the inclusion boundary.
//!
//! The imperfect-interface field is represented as
//! `u = a.x - S[beta psi] + D[psi]` outside the inclusion and `u = lambda`
//! inside, where `psi` solves `(1/2 - K*)[beta psi] + d_nu D[psi] = -a.nu`
//! subject to `int beta psi ds = 0`. The perfect-bonding comparison uses
//! `u = a.x + S[phi]` with `u = lambda` on the boundary and `int phi ds = 0`.

pub mod mesh;
pub mod operators;
pub mod solve;

pub use mesh::{BoundaryMesh, Grading};
pub use operators::{
    adjoint_double_layer_matrix, apply_adjoint_double_layer, double_layer_matrix, apply_hypersingular, hypersingular_matrix,
    single_layer_matrix,
};
pub use solve::{
    eval_field, eval_perturbation, polarization_general, polarization_perfect, solve_imperfect, solve_perfect,
    DensitySolution, ImperfectSystem, PerfectSystem, Problem,
};

use crate::error::Result;
use crate::interface::InterfaceParameter;

/// `beta` at the mesh nodes.
pub fn beta_at_nodes(mesh: &BoundaryMesh, param: &InterfaceParameter) -> Result<Vec<f64>> {
    mesh.angles()
        .iter()
        .zip(mesh.jacobians())
        .map(|(&theta, &jac)| {
            if jac == 0.0 {
                Err(crate::error::Error::CornerPoint(theta))
            } else {
                Ok(param.gamma(theta) / jac)
            }
        })
        .collect()
}
