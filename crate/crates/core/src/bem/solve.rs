//! Bordered Nyström systems for the imperfect-interface and perfect-bonding problems.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::mesh::BoundaryMesh;
use super::operators::{adjoint_double_layer_matrix, hypersingular_core, single_layer_param_matrix};
use crate::error::{Error, Result};
use crate::linalg::DenseLu;
use crate::tensor::{PolarizationTensor, Solver};

/// Systems with a larger 1-norm condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Imperfect,
    Perfect,
}

/// Boundary density at the mesh nodes.
///
/// For [`Problem::Imperfect`] `psi` is the density of
/// `u = a.x - S[beta psi] + D[psi]`; for [`Problem::Perfect`] it is the
/// single-layer density of `u = a.x + S[psi]`. `lambda` is the constant
/// potential of the core.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySolution {
    pub problem: Problem,
    pub direction: [f64; 2],
    pub psi: Vec<f64>,
    pub lambda: f64,
    /// `beta` at the nodes (empty for perfect bonding).
    pub beta: Vec<f64>,
    /// Bordering multiplier; vanishes for consistent data.
    pub multiplier: f64,
    /// Relative backward error of the bordered solve.
    pub residual: f64,
}

fn relative_residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = a * x - b;
    let anorm = a.row_iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let denom = anorm * x.amax() + b.amax();
    if denom == 0.0 {
        0.0
    } else {
        r.amax() / denom
    }
}

fn factor(matrix: &DMatrix<f64>) -> Result<(DenseLu<f64>, f64)> {
    let lu = DenseLu::new(matrix.clone())?;
    let cond = lu.cond1_estimate()?;
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    Ok((lu, cond))
}

/// Factored system `P psi = -a.nu`, `int beta psi ds = 0`, with
/// `P = (1/2 - K*) M_beta + d_nu D`.
///
/// Row `i` is multiplied by `|dx/ds|` at node `i`, which turns the
/// hypersingular part into the parameter-space operator `D S~ D` and keeps the
/// rows bounded next to a corner where `beta` and `1/|dx/ds|` blow up.
pub struct ImperfectSystem {
    mesh: BoundaryMesh,
    beta: Vec<f64>,
    beta_w: Vec<f64>,
    matrix: DMatrix<f64>,
    lu: DenseLu<f64>,
    cond: f64,
}

impl ImperfectSystem {
    pub fn assemble(mesh: &BoundaryMesh, beta: &[f64]) -> Result<Self> {
        let n = mesh.len();
        if beta.len() != n {
            return Err(Error::InvalidArgument(format!("{} beta values for {n} nodes", beta.len())));
        }
        if beta.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidArgument("beta must be finite and non-negative".into()));
        }
        if beta.iter().all(|b| *b == 0.0) {
            return Err(Error::InvalidArgument("beta vanishes identically".into()));
        }
        let w = mesh.weights();
        let beta_w: Vec<f64> = beta.iter().zip(&w).map(|(b, w)| b * w).collect();
        let speed: Vec<f64> = (0..n).map(|q| mesh.speed(q)).collect();

        let k = adjoint_double_layer_matrix(mesh);
        let hyp = hypersingular_core(mesh);
        let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                // K* columns already carry w_j; the extra beta_j comes from M_beta
                let mut v = -k[(i, j)] * beta[j];
                if i == j {
                    v += 0.5 * beta[j];
                }
                m[(i, j)] = speed[i] * v + hyp[(i, j)];
            }
            m[(i, n)] = 1.0;
        }
        let scale = beta_w.iter().sum::<f64>() / n as f64;
        for j in 0..n {
            m[(n, j)] = beta_w[j] / scale;
        }
        let (lu, cond) = factor(&m)?;
        Ok(Self { mesh: mesh.clone(), beta: beta.to_vec(), beta_w, matrix: m, lu, cond })
    }

    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    pub fn condition_estimate(&self) -> f64 {
        self.cond
    }

    pub fn solve(&self, a: [f64; 2]) -> Result<DensitySolution> {
        let n = self.mesh.len();
        let mut rhs = DVector::<f64>::zeros(n + 1);
        for i in 0..n {
            let nu = self.mesh.normal(i);
            rhs[i] = -self.mesh.speed(i) * (a[0] * nu.re + a[1] * nu.im);
        }
        let x = self.lu.solve(&rhs)?;
        let residual = relative_residual(&self.matrix, &x, &rhs);
        let psi: Vec<f64> = x.iter().take(n).copied().collect();
        let mut sol = DensitySolution {
            problem: Problem::Imperfect,
            direction: a,
            psi,
            lambda: 0.0,
            beta: self.beta.clone(),
            multiplier: x[n],
            residual,
        };
        sol.lambda = match self.mesh.interior_point() {
            Ok(x0) => a[0] * x0.re + a[1] * x0.im + imperfect_potential(&self.mesh, &self.beta_w, &sol.psi, x0),
            Err(_) => f64::NAN,
        };
        Ok(sol)
    }

    /// `T_ij = int (y_i beta - nu_i) psi_j ds` from the solutions for `e_1`, `e_2`.
    pub fn polarization(&self) -> Result<PolarizationTensor> {
        let sols = [self.solve([1.0, 0.0])?, self.solve([0.0, 1.0])?];
        let mut t = [[0.0; 2]; 2];
        for (j, sol) in sols.iter().enumerate() {
            for q in 0..self.mesh.len() {
                let y = self.mesh.node(q);
                let nu = self.mesh.normal(q);
                let w = self.mesh.weight(q);
                t[0][j] += (y.re * self.beta_w[q] - nu.re * w) * sol.psi[q];
                t[1][j] += (y.im * self.beta_w[q] - nu.im * w) * sol.psi[q];
            }
        }
        Ok(PolarizationTensor::new(t, Solver::Bem, self.mesh.len()))
    }
}

/// Factored system `S[phi] - lambda = -a.x`, `int phi ds = 0`, in the
/// parameter density `g = phi |dx/ds|`.
///
/// The bordered matrix stays invertible when the boundary has logarithmic
/// capacity one and `S` alone is singular.
pub struct PerfectSystem {
    mesh: BoundaryMesh,
    matrix: DMatrix<f64>,
    lu: DenseLu<f64>,
    cond: f64,
}

impl PerfectSystem {
    pub fn assemble(mesh: &BoundaryMesh) -> Result<Self> {
        let n = mesh.len();
        let s = single_layer_param_matrix(mesh);
        let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&s);
        for i in 0..n {
            m[(i, n)] = -1.0;
            m[(n, i)] = 1.0;
        }
        let (lu, cond) = factor(&m)?;
        Ok(Self { mesh: mesh.clone(), matrix: m, lu, cond })
    }

    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    pub fn condition_estimate(&self) -> f64 {
        self.cond
    }

    pub fn solve(&self, a: [f64; 2]) -> Result<DensitySolution> {
        let n = self.mesh.len();
        let mut rhs = DVector::<f64>::zeros(n + 1);
        for i in 0..n {
            let x = self.mesh.node(i);
            rhs[i] = -(a[0] * x.re + a[1] * x.im);
        }
        let x = self.lu.solve(&rhs)?;
        let residual = relative_residual(&self.matrix, &x, &rhs);
        let psi = (0..n).map(|q| x[q] / self.mesh.speed(q)).collect();
        Ok(DensitySolution {
            problem: Problem::Perfect,
            direction: a,
            psi,
            lambda: x[n],
            beta: Vec::new(),
            multiplier: 0.0,
            residual,
        })
    }

    /// `T_ij = -int y_i phi_j ds`.
    pub fn polarization(&self) -> Result<PolarizationTensor> {
        let sols = [self.solve([1.0, 0.0])?, self.solve([0.0, 1.0])?];
        let mut t = [[0.0; 2]; 2];
        for (j, sol) in sols.iter().enumerate() {
            for q in 0..self.mesh.len() {
                let y = self.mesh.node(q);
                let pw = sol.psi[q] * self.mesh.weight(q);
                t[0][j] -= y.re * pw;
                t[1][j] -= y.im * pw;
            }
        }
        Ok(PolarizationTensor::new(t, Solver::Bem, self.mesh.len()))
    }
}

/// `ln(|x - y| / |x|)`, accurate for `|y| << |x|`.
fn log_ratio(x: Complex64, y: Complex64) -> f64 {
    let xx = x.norm_sqr();
    0.5 * ((y.norm_sqr() - 2.0 * (x.re * y.re + x.im * y.im)) / xx).ln_1p()
}

/// `-S[beta psi](x) + D[psi](x)` by plain quadrature; relies on `sum beta psi w = 0`.
fn imperfect_potential(mesh: &BoundaryMesh, beta_w: &[f64], psi: &[f64], x: Complex64) -> f64 {
    let mut acc = 0.0;
    for q in 0..mesh.len() {
        let y = mesh.node(q);
        let d = x - y;
        let nu = mesh.normal(q);
        let single = if x.norm() > 0.0 { log_ratio(x, y) } else { d.norm().ln() };
        acc -= single * beta_w[q] * psi[q];
        acc -= (d.re * nu.re + d.im * nu.im) / d.norm_sqr() * psi[q] * mesh.weight(q);
    }
    acc / (2.0 * PI)
}

fn perfect_potential(mesh: &BoundaryMesh, phi: &[f64], x: Complex64) -> f64 {
    let acc: f64 = phi.iter().enumerate().map(|(q, p)| log_ratio(x, mesh.node(q)) * p * mesh.weight(q)).sum();
    acc / (2.0 * PI)
}

/// Rejects points inside the curve or closer than two local node spacings to it.
pub fn check_evaluation_point(mesh: &BoundaryMesh, x: Complex64) -> Result<()> {
    if mesh.contains(x) {
        return Err(Error::InvalidArgument(format!("point ({}, {}) lies inside the inclusion", x.re, x.im)));
    }
    for q in 0..mesh.len() {
        let dist = (x - mesh.node(q)).norm();
        let minimum = 2.0 * mesh.weight(q);
        if dist < minimum {
            return Err(Error::TooClose { distance: dist, minimum });
        }
    }
    Ok(())
}

/// `u(x) - a.x` at an exterior point.
pub fn eval_perturbation(mesh: &BoundaryMesh, sol: &DensitySolution, x: Complex64) -> Result<f64> {
    check_evaluation_point(mesh, x)?;
    Ok(match sol.problem {
        Problem::Imperfect => {
            let beta_w: Vec<f64> = (0..mesh.len()).map(|q| sol.beta[q] * mesh.weight(q)).collect();
            imperfect_potential(mesh, &beta_w, &sol.psi, x)
        }
        Problem::Perfect => perfect_potential(mesh, &sol.psi, x),
    })
}

/// `u(x)` at an exterior point.
pub fn eval_field(mesh: &BoundaryMesh, sol: &DensitySolution, x: Complex64) -> Result<f64> {
    let a = sol.direction;
    Ok(a[0] * x.re + a[1] * x.im + eval_perturbation(mesh, sol, x)?)
}

pub fn solve_imperfect(mesh: &BoundaryMesh, beta: &[f64], a: [f64; 2]) -> Result<DensitySolution> {
    ImperfectSystem::assemble(mesh, beta)?.solve(a)
}

pub fn solve_perfect(mesh: &BoundaryMesh, a: [f64; 2]) -> Result<DensitySolution> {
    PerfectSystem::assemble(mesh)?.solve(a)
}

pub fn polarization_general(mesh: &BoundaryMesh, beta: &[f64]) -> Result<PolarizationTensor> {
    ImperfectSystem::assemble(mesh, beta)?.polarization()
}

pub fn polarization_perfect(mesh: &BoundaryMesh) -> Result<PolarizationTensor> {
    PerfectSystem::assemble(mesh)?.polarization()
}
