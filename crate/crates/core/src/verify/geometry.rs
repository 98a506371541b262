//! Residual of the ellipse/ellipsoid boundary condition `a_j nu_j / x_j = const`.
//!
//! On a centered ellipse or ellipsoid with semi-axes `c_j` the outward normal
//! is proportional to `x_j / c_j^2`, so the ratios coincide for `a_j = c_j^2`.
//! The residual measures how far a sampled boundary is from satisfying this
//! for the given constants.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};

/// Samples with some `|x_j|` below this are ignored.
pub const AXIS_CUTOFF: f64 = 1e-3;

/// Residual at or below which a boundary is classified as an ellipse/ellipsoid.
pub const ELLIPSE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub point: Vec<f64>,
    pub normal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryResidual {
    /// Largest normalized spread `(max_j r_j - min_j r_j) / mean_j |r_j|`, `r_j = a_j nu_j / x_j`.
    pub residual: f64,
    pub constants: Vec<f64>,
    pub points_used: usize,
    pub points_total: usize,
}

impl GeometryResidual {
    pub fn is_ellipsoid(&self) -> bool {
        self.residual <= ELLIPSE_THRESHOLD
    }
}

pub fn ellipsoid_residual(samples: &[BoundarySample], a: &[f64]) -> Result<GeometryResidual> {
    if a.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("constants a_j must be positive".into()));
    }
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for s in samples {
        if s.point.len() != a.len() || s.normal.len() != a.len() {
            return Err(Error::InvalidArgument("dimension mismatch between samples and constants".into()));
        }
        if s.point.iter().any(|x| x.abs() < AXIS_CUTOFF) {
            continue;
        }
        let r: Vec<f64> = (0..a.len()).map(|j| a[j] * s.normal[j] / s.point[j]).collect();
        let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = r.iter().map(|v| v.abs()).sum::<f64>() / r.len() as f64;
        worst = worst.max((hi - lo) / mean);
        used += 1;
    }
    if used == 0 {
        return Err(Error::Degenerate("no sample clears the coordinate-axis cutoff".into()));
    }
    Ok(GeometryResidual { residual: worst, constants: a.to_vec(), points_used: used, points_total: samples.len() })
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Median over usable samples of `ln |x_j nu_1 / (nu_j x_1)|`, exact for an ellipsoid.
fn log_ratio_estimate(samples: &[BoundarySample], j: usize) -> f64 {
    let mut v: Vec<f64> = samples
        .iter()
        .filter(|s| s.point.iter().all(|x| x.abs() >= AXIS_CUTOFF) && s.normal[j] != 0.0 && s.normal[0] != 0.0)
        .map(|s| (s.point[j] * s.normal[0] / (s.normal[j] * s.point[0])).abs().ln())
        .filter(|x| x.is_finite())
        .collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Smallest residual over the constants `a = (1, a_2, ..., a_d)`.
///
/// Starts from the median log-ratio estimate, then scans each log-ratio on a
/// grid over `[1e-2, 1e2]` and refines by golden-section search, one
/// coordinate at a time.
pub fn best_fit_residual(samples: &[BoundarySample]) -> Result<GeometryResidual> {
    let dim = samples.first().map(|s| s.point.len()).ok_or_else(|| Error::Degenerate("no samples".into()))?;
    let eval = |logs: &[f64]| -> f64 {
        let a: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        ellipsoid_residual(samples, &a).map(|g| g.residual).unwrap_or(f64::INFINITY)
    };
    let mut logs: Vec<f64> = (0..dim).map(|j| if j == 0 { 0.0 } else { log_ratio_estimate(samples, j) }).collect();
    let mut current = eval(&logs);
    let step = 0.05 * std::f64::consts::LN_10;
    let grid: Vec<f64> = (0..=80).map(|k| (k as f64 - 40.0) * step).collect();
    let sweeps = if dim > 2 { 4 } else { 1 };
    for _ in 0..sweeps {
        for j in 1..dim {
            let with = |x: f64| {
                let mut t = logs.clone();
                t[j] = x;
                eval(&t)
            };
            let mut best = (current, logs[j]);
            for &g in &grid {
                let v = with(g);
                if v < best.0 {
                    best = (v, g);
                }
            }
            for centre in [best.1, logs[j]] {
                let x = golden_section(with, centre - step, centre + step, 60);
                let v = with(x);
                if v < best.0 {
                    best = (v, x);
                }
            }
            current = best.0;
            logs[j] = best.1;
        }
    }
    let a: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    ellipsoid_residual(samples, &a)
}

/// Boundary samples of a conformal-map shape, shifted so the enclosed area's centroid is the origin.
pub fn curve_samples(map: &ConformalMap, count: usize) -> Vec<BoundarySample> {
    let pts: Vec<(Complex64, Complex64)> = (0..count)
        .map(|k| {
            let th = 2.0 * PI * (k as f64 + 0.5) / count as f64;
            let zeta = Complex64::from_polar(1.0, th);
            (map.phi(zeta), map.dphi(zeta) * Complex64::i() * zeta)
        })
        .filter(|(_, t)| t.norm() > 1e-12)
        .collect();
    let c = polygon_centroid(&pts.iter().map(|p| p.0).collect::<Vec<_>>());
    pts.into_iter()
        .map(|(p, t)| {
            let t = t / t.norm();
            let q = p - c;
            BoundarySample { point: vec![q.re, q.im], normal: vec![t.im, -t.re] }
        })
        .collect()
}

pub fn polygon_centroid(pts: &[Complex64]) -> Complex64 {
    let n = pts.len();
    let mut area = 0.0;
    let mut c = Complex64::new(0.0, 0.0);
    for q in 0..n {
        let (a, b) = (pts[q], pts[(q + 1) % n]);
        let cr = a.re * b.im - a.im * b.re;
        area += cr;
        c += (a + b) * cr;
    }
    c / (3.0 * area)
}

/// Ellipse `x^2/c1^2 + y^2/c2^2 = 1`.
pub fn ellipse_samples(c1: f64, c2: f64, count: usize) -> Vec<BoundarySample> {
    (0..count)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / count as f64;
            let (x, y) = (c1 * t.cos(), c2 * t.sin());
            let (gx, gy) = (x / (c1 * c1), y / (c2 * c2));
            let g = gx.hypot(gy);
            BoundarySample { point: vec![x, y], normal: vec![gx / g, gy / g] }
        })
        .collect()
}

/// Closed surfaces given implicitly by `sum_j |x_j / c_j|^e = 1` (`e = 2` is the ellipsoid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Ellipsoid { axes: [f64; 3] },
    Superellipsoid { axes: [f64; 3], exponent: f64 },
}

impl SurfaceSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn parts(&self) -> ([f64; 3], f64) {
        match *self {
            SurfaceSpec::Ellipsoid { axes } => (axes, 2.0),
            SurfaceSpec::Superellipsoid { axes, exponent } => (axes, exponent),
        }
    }

    /// Vertices of an `nu x nv` latitude/longitude triangulation with exact normals.
    pub fn samples(&self, nu: usize, nv: usize) -> Result<Vec<BoundarySample>> {
        let (c, e) = self.parts();
        if c.iter().any(|v| !(*v > 0.0)) || !(e > 1.0) {
            return Err(Error::Degenerate("surface axes must be positive and exponent above 1".into()));
        }
        let mut out = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            let u = PI * (i as f64 + 0.5) / nu as f64;
            for j in 0..nv {
                let v = 2.0 * PI * (j as f64 + 0.5) / nv as f64;
                let d = [u.sin() * v.cos(), u.sin() * v.sin(), u.cos()];
                let s: f64 = (0..3).map(|k| (d[k] / c[k]).abs().powf(e)).sum();
                let t = s.powf(-1.0 / e);
                let p: Vec<f64> = d.iter().map(|x| t * x).collect();
                let g: Vec<f64> = (0..3).map(|k| p[k].signum() * (p[k] / c[k]).abs().powf(e - 1.0) / c[k]).collect();
                let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                out.push(BoundarySample { point: p, normal: g.iter().map(|x| x / gn).collect() });
            }
        }
        Ok(out)
    }
}
