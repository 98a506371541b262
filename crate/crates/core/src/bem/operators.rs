//! Nyström matrices of the boundary layer potentials.
//!
//! With `Gamma(x) = ln|x| / (2 pi)`:
//!
//! * `K*[phi](x) = int d_nu_x Gamma(x - y) phi(y) ds(y)`; off the diagonal the
//!   kernel is `(x - y).nu_x / (2 pi |x - y|^2)`, on the diagonal its limit
//!   `kappa(x) / (4 pi)`.
//! * `K[phi](x) = int d_nu_y Gamma(x - y) phi(y) ds(y)`, the double layer on
//!   the boundary, with the same diagonal limit.
//! * `S[phi](x) = int Gamma(x - y) phi(y) ds(y)`, discretized on the parameter
//!   with the logarithmic split `ln|x(t) - x(s)| = 1/2 ln(4 sin^2((t-s)/2)) + L(t, s)`
//!   and trigonometric product quadrature for the first term.
//! * `d_nu D[phi] = d/dsigma S[dphi/dsigma]` (Maue's identity), with `sigma`
//!   arclength and the tangential derivatives taken spectrally in `s`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::mesh::BoundaryMesh;

fn assemble<F>(n: usize, entry: F) -> DMatrix<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| entry(i, j))
        .collect();
    DMatrix::from_row_slice(n, n, &data)
}

/// Matrix of `K*` acting on arclength densities sampled at the nodes.
pub fn adjoint_double_layer_matrix(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let n = mesh.len();
    let w = mesh.weights();
    let normals: Vec<_> = (0..n).map(|q| mesh.normal(q)).collect();
    let kappa: Vec<f64> = (0..n).map(|q| mesh.curvature(q)).collect();
    assemble(n, |i, j| {
        if i == j {
            kappa[i] * w[i] / (4.0 * PI)
        } else {
            let d = mesh.diff(i, j);
            let nu = normals[i];
            (d.re * nu.re + d.im * nu.im) / (2.0 * PI * d.norm_sqr()) * w[j]
        }
    })
}

/// Matrix of the double layer `K` (kernel `(y - x).nu_y / (2 pi |x - y|^2)`), the transpose partner of `K*`.
pub fn double_layer_matrix(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let n = mesh.len();
    let w = mesh.weights();
    let normals: Vec<_> = (0..n).map(|q| mesh.normal(q)).collect();
    let kappa: Vec<f64> = (0..n).map(|q| mesh.curvature(q)).collect();
    assemble(n, |i, j| {
        if i == j {
            kappa[i] * w[i] / (4.0 * PI)
        } else {
            let d = mesh.diff(j, i);
            let nu = normals[j];
            (d.re * nu.re + d.im * nu.im) / (2.0 * PI * d.norm_sqr()) * w[j]
        }
    })
}

pub fn apply_adjoint_double_layer(mesh: &BoundaryMesh, density: &[f64]) -> Vec<f64> {
    let k = adjoint_double_layer_matrix(mesh);
    (&k * nalgebra::DVector::from_column_slice(density)).iter().copied().collect()
}

/// Weights `R_k` of `int ln(4 sin^2((t - s)/2)) f(s) ds ~ sum_j R_{i-j} f(s_j)`.
pub fn log_weights(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for m in 1..half {
                acc += (m as f64 * k as f64 * h).cos() / m as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            -4.0 * PI / nf * acc - 4.0 * PI / (nf * nf) * sign
        })
        .collect()
}

/// Single layer acting on the parameter density `g = phi |dx/ds|`.
pub fn single_layer_param_matrix(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let n = mesh.len();
    let h = mesh.step();
    let r = log_weights(n);
    let speed: Vec<f64> = (0..n).map(|q| mesh.speed(q)).collect();
    assemble(n, |i, j| {
        let k = (i + n - j) % n;
        let smooth = if i == j {
            speed[i].ln()
        } else {
            let half = 0.5 * k as f64 * h;
            let s2 = 4.0 * half.sin().powi(2);
            0.5 * (mesh.diff(i, j).norm_sqr() / s2).ln()
        };
        (0.5 * r[k] + h * smooth) / (2.0 * PI)
    })
}

/// Single layer on arclength densities.
pub fn single_layer_matrix(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let mut s = single_layer_param_matrix(mesh);
    for j in 0..mesh.len() {
        let sp = mesh.speed(j);
        s.column_mut(j).scale_mut(sp);
    }
    s
}

/// Spectral derivative on `n` equispaced periodic samples (n even).
pub fn differentiation_matrix(n: usize) -> DMatrix<f64> {
    let h = 2.0 * PI / n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let k = i as i64 - j as i64;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            0.5 * sign / (0.5 * k as f64 * h).tan()
        }
    })
}

/// `D S~ D`: the hypersingular operator with the leading `1/|dx/ds|` row factor left out.
pub fn hypersingular_core(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let d = differentiation_matrix(mesh.len());
    let s = single_layer_param_matrix(mesh);
    &d * (&s * &d)
}

/// Matrix of `d_nu D` acting on node values.
pub fn hypersingular_matrix(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let mut core = hypersingular_core(mesh);
    for i in 0..mesh.len() {
        let sp = mesh.speed(i);
        core.row_mut(i).unscale_mut(sp);
    }
    core
}

pub fn apply_hypersingular(mesh: &BoundaryMesh, density: &[f64]) -> Vec<f64> {
    let h = hypersingular_matrix(mesh);
    (&h * nalgebra::DVector::from_column_slice(density)).iter().copied().collect()
}
