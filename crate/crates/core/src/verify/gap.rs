//! How much weaker the imperfect-interface perturbation is than the perfectly
//! bonded one on the same shape.

use serde::Serialize;

use crate::bem::{self, beta_at_nodes, BoundaryMesh, Grading, ImperfectSystem, PerfectSystem};
use crate::error::Result;
use crate::interface::InterfaceParameter;
use crate::tensor::PolarizationTensor;

use super::decay::{farfield_decay, DecayFit};

pub const DEFAULT_RADII: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

#[derive(Debug, Clone, Serialize)]
pub struct NeutralityGap {
    pub nodes: usize,
    pub weak: PolarizationTensor,
    pub perfect: PolarizationTensor,
    pub weak_norm: f64,
    pub perfect_norm: f64,
    /// `||T_weak|| / ||T_perfect||`.
    pub ratio: f64,
    /// Decay of the perturbation for `a = e_1`.
    pub weak_decay: DecayFit,
    pub perfect_decay: DecayFit,
}

impl NeutralityGap {
    /// `slope_perfect - slope_weak`; `None` when the weak perturbation is below the floor.
    pub fn slope_gap(&self) -> Option<f64> {
        Some(self.perfect_decay.slope? - self.weak_decay.slope?)
    }
}

/// Compares `param` with perfect bonding on a mesh of `nodes` points (graded if the shape has a corner).
pub fn neutrality_gap(param: &InterfaceParameter, nodes: usize, radii: &[f64]) -> Result<NeutralityGap> {
    let mesh = BoundaryMesh::discretize(param.map(), nodes, Grading::for_map(param.map()))?;
    gap_on_mesh(&mesh, &beta_at_nodes(&mesh, param)?, radii)
}

pub fn gap_on_mesh(mesh: &BoundaryMesh, beta: &[f64], radii: &[f64]) -> Result<NeutralityGap> {
    let weak_sys = ImperfectSystem::assemble(mesh, beta)?;
    let perfect_sys = PerfectSystem::assemble(mesh)?;
    let weak = weak_sys.polarization()?;
    let perfect = perfect_sys.polarization()?;
    let e1 = [1.0, 0.0];
    let weak_sol = weak_sys.solve(e1)?;
    let perfect_sol = perfect_sys.solve(e1)?;
    let weak_decay = farfield_decay(|x| bem::eval_perturbation(mesh, &weak_sol, x), radii)?;
    let perfect_decay = farfield_decay(|x| bem::eval_perturbation(mesh, &perfect_sol, x), radii)?;
    let (weak_norm, perfect_norm) = (weak.norm(), perfect.norm());
    Ok(NeutralityGap {
        nodes: mesh.len(),
        weak,
        perfect,
        weak_norm,
        perfect_norm,
        ratio: weak_norm / perfect_norm,
        weak_decay,
        perfect_decay,
    })
}
