//! Boundary-element field against the conformally pulled-back disk solution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bem::{self, BoundaryMesh, DensitySolution};
use crate::conformal::ConformalMap;
use crate::disk_spectral::FourierDensity;
use crate::error::Result;

/// Smallest preimage modulus accepted for a comparison point.
pub const MIN_PREIMAGE_RADIUS: f64 = 1.1;

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    /// `max |u_bem - u_disk| / max(1, |u_disk|)` over the compared points.
    pub max_relative_difference: f64,
    pub compared: usize,
    /// Points whose preimage could not be used (inversion failure or `|zeta| < 1.1`).
    pub skipped: Vec<[f64; 2]>,
}

/// `count` deterministic points with `|z|` spread over `[r_min, r_max]` and golden-angle phases.
pub fn sample_annulus(count: usize, r_min: f64, r_max: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            Complex64::from_polar(r_min + (r_max - r_min) * t, golden * k as f64)
        })
        .collect()
}

/// Compares `u` from the boundary-element solution with the disk solution at `Phi^{-1}(z)`.
pub fn oracle_crosscheck(
    map: &ConformalMap,
    disk: &FourierDensity,
    mesh: &BoundaryMesh,
    solution: &DensitySolution,
    points: &[Complex64],
) -> Result<CrossCheck> {
    let a = solution.direction;
    let results: Vec<Result<Option<f64>>> = points
        .par_iter()
        .map(|&z| {
            let zeta = match map.invert(z) {
                Ok(zeta) if zeta.norm() >= MIN_PREIMAGE_RADIUS => zeta,
                _ => return Ok(None),
            };
            let u_disk = disk.field(a, zeta)?;
            let u_bem = bem::eval_field(mesh, solution, z)?;
            Ok(Some((u_bem - u_disk).abs() / u_disk.abs().max(1.0)))
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut skipped = Vec::new();
    for (z, r) in points.iter().zip(results) {
        match r? {
            Some(d) => {
                worst = worst.max(d);
                compared += 1;
            }
            None => skipped.push([z.re, z.im]),
        }
    }
    Ok(CrossCheck { max_relative_difference: worst, compared, skipped })
}
