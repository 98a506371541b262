//! Exterior conformal maps `Phi: {|zeta| > 1} -> C \ closure(Omega)`.
//!
//! Every map is normalized to `Phi(zeta) = zeta + b_1/zeta + b_2/zeta^2 + ...`
//! (leading coefficient one, no constant term). `b_1` is the shape's
//! `b_Omega`, the only geometric quantity the interface design depends on.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::B_MAX;

/// Boundary samples used by the injectivity checks.
pub const INJECTIVITY_SAMPLES: usize = 4096;

/// Radii on which `Phi'` is checked for zeros.
pub const DERIVATIVE_CHECK_RADII: [f64; 4] = [1.0 + 1e-3, 1.01, 1.1, 2.0];

const NEWTON_MAX_ITER: usize = 50;

/// Number of Laurent coefficients kept for reporting when the map is closed form.
const DROPLET_SERIES_TERMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Finite Laurent polynomial `zeta + sum_k b_k zeta^-k`.
    Laurent,
    /// `Phi(zeta) = zeta + 1/(4 zeta + 2)`, i.e. the map whose derivative is
    /// `(1 + 1/zeta) (1 + 1/(2 zeta))^-2`. It has a cusp at `zeta = -1`.
    Droplet,
}

/// Local data at a boundary point written as `corner angle + delta`.
///
/// `offset` is `Phi(zeta) - Phi(zeta_corner)`, computed without cancellation
/// so that nodes very close to the corner stay distinguishable.
#[derive(Debug, Clone, Copy)]
pub struct CornerLocal {
    pub zeta: Complex64,
    pub offset: Complex64,
    pub dphi: Complex64,
    pub d2phi: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalMap {
    kind: MapKind,
    /// `(b_{-1}, b_0, b_1, ..., b_K)`; for closed-form maps a truncated series kept for reporting.
    coefficients: Vec<Complex64>,
    /// Boundary angles where `Phi'` vanishes.
    corners: Vec<f64>,
    label: String,
}

/// Summary of the interface-design admissibility of a map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub b_re: f64,
    pub b_im: f64,
    pub b_abs: f64,
    pub phase: f64,
    /// `|b| <= 2 - sqrt(3)`: the closed-form parameter is non-negative.
    pub closed_form_ok: bool,
}

impl ConformalMap {
    pub fn identity() -> Self {
        Self {
            kind: MapKind::Laurent,
            coefficients: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            corners: Vec::new(),
            label: "disk".into(),
        }
    }

    /// Ellipse with axis lengths `a` (along x) and `b` (along y), rescaled by
    /// `2/(a+b)` so that the map is `zeta + ((a-b)/(a+b))/zeta`.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ellipse axes must be positive and finite (got a = {a}, b = {b})"
            )));
        }
        let c = (a - b) / (a + b);
        let mut map = Self::laurent_unchecked(&[Complex64::new(c, 0.0)]);
        map.label = format!("ellipse({a}, {b})");
        Ok(map)
    }

    pub fn droplet() -> Self {
        // b_k = (-1/2)^(k+1), k >= 1: integrating the derivative series termwise.
        let mut coefficients = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut c = 0.25;
        for _ in 0..DROPLET_SERIES_TERMS {
            coefficients.push(Complex64::new(c, 0.0));
            c *= -0.5;
        }
        Self {
            kind: MapKind::Droplet,
            coefficients,
            corners: vec![PI],
            label: "droplet".into(),
        }
    }

    /// Normalized Laurent map from its tail `b_1, ..., b_K`.
    ///
    /// Rejects `|b_1| >= 1`, zeros of `Phi'` on or outside the unit circle and
    /// boundary self-intersections.
    pub fn laurent(tail: &[Complex64]) -> Result<Self> {
        if tail.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Laurent coefficient".into()));
        }
        let map = Self::laurent_unchecked(tail);
        let b = map.b_omega().norm();
        if b >= 1.0 {
            return Err(Error::CoefficientTooLarge(b));
        }
        map.check_injective()?;
        Ok(map)
    }

    fn laurent_unchecked(tail: &[Complex64]) -> Self {
        let mut coefficients = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        coefficients.extend_from_slice(tail);
        // trailing zeros carry no information
        while coefficients.len() > 2 && coefficients.last() == Some(&Complex64::new(0.0, 0.0)) {
            coefficients.pop();
        }
        Self {
            kind: MapKind::Laurent,
            coefficients,
            corners: Vec::new(),
            label: "laurent".into(),
        }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `(b_{-1}, b_0, b_1, ...)`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// The tail `b_1, b_2, ...`.
    pub fn tail(&self) -> &[Complex64] {
        &self.coefficients[2..]
    }

    pub fn b_omega(&self) -> Complex64 {
        self.coefficients.get(2).copied().unwrap_or_default()
    }

    pub fn corners(&self) -> &[f64] {
        &self.corners
    }

    pub fn has_corners(&self) -> bool {
        !self.corners.is_empty()
    }

    /// Angular distance from `theta` to the nearest corner (infinite when there is none).
    pub fn corner_distance(&self, theta: f64) -> f64 {
        self.corners
            .iter()
            .map(|&c| wrap_angle(theta - c).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn admissibility(&self) -> Admissibility {
        let b = self.b_omega();
        Admissibility {
            b_re: b.re,
            b_im: b.im,
            b_abs: b.norm(),
            phase: if b.norm() == 0.0 { 0.0 } else { b.arg() },
            closed_form_ok: b.norm() <= B_MAX,
        }
    }

    /// `Phi(zeta)` for `|zeta| >= 1`.
    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        check_exterior(zeta)?;
        Ok(self.phi(zeta))
    }

    /// `Phi'(zeta)` for `|zeta| >= 1`.
    pub fn eval_derivative(&self, zeta: Complex64) -> Result<Complex64> {
        check_exterior(zeta)?;
        Ok(self.dphi(zeta))
    }

    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        self.phi(Complex64::from_polar(1.0, theta))
    }

    /// `|Phi'(e^{i theta})|`, the arclength density of the boundary parametrization.
    pub fn jacobian(&self, theta: f64) -> f64 {
        self.dphi(Complex64::from_polar(1.0, theta)).norm()
    }

    pub(crate) fn phi(&self, zeta: Complex64) -> Complex64 {
        match self.kind {
            MapKind::Droplet => zeta + 1.0 / (4.0 * zeta + 2.0),
            MapKind::Laurent => {
                let w = zeta.inv();
                let mut acc = Complex64::new(0.0, 0.0);
                for c in self.tail().iter().rev() {
                    acc = (acc + c) * w;
                }
                zeta + acc
            }
        }
    }

    pub(crate) fn dphi(&self, zeta: Complex64) -> Complex64 {
        match self.kind {
            MapKind::Droplet => {
                let d = 2.0 * zeta + 1.0;
                4.0 * zeta * (zeta + 1.0) / (d * d)
            }
            MapKind::Laurent => {
                // 1 - sum_k k b_k zeta^-(k+1)
                let w = zeta.inv();
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, c) in self.tail().iter().enumerate().rev() {
                    acc = (acc + c * (k as f64 + 1.0)) * w;
                }
                Complex64::new(1.0, 0.0) - acc * w
            }
        }
    }

    pub(crate) fn d2phi(&self, zeta: Complex64) -> Complex64 {
        match self.kind {
            MapKind::Droplet => {
                let d = 2.0 * zeta + 1.0;
                4.0 / (d * d * d)
            }
            MapKind::Laurent => {
                // sum_k k (k+1) b_k zeta^-(k+2)
                let w = zeta.inv();
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, c) in self.tail().iter().enumerate().rev() {
                    let k = k as f64 + 1.0;
                    acc = (acc + c * (k * (k + 1.0))) * w;
                }
                acc * w * w
            }
        }
    }

    /// `Phi(e^{i theta_c})` for corner `index`.
    pub fn corner_point(&self, index: usize) -> Complex64 {
        self.boundary_point(self.corners[index])
    }

    /// Boundary data at angle `corners[index] + delta`, relative to the corner point.
    pub fn corner_local(&self, index: usize, delta: f64) -> CornerLocal {
        let theta_c = self.corners[index];
        match self.kind {
            MapKind::Droplet => {
                // corner at zeta = -1; eps = zeta + 1 = 1 - e^{i delta}
                let eps = Complex64::new(0.0, -2.0 * (0.5 * delta).sin())
                    * Complex64::from_polar(1.0, 0.5 * delta);
                let zeta = -Complex64::from_polar(1.0, delta);
                let d = 2.0 * eps - 1.0;
                CornerLocal {
                    zeta,
                    offset: 2.0 * eps * eps / d,
                    dphi: 4.0 * zeta * eps / (d * d),
                    d2phi: 4.0 / (d * d * d),
                }
            }
            MapKind::Laurent => {
                let zeta = Complex64::from_polar(1.0, theta_c + delta);
                CornerLocal {
                    zeta,
                    offset: self.phi(zeta) - self.corner_point(index),
                    dphi: self.dphi(zeta),
                    d2phi: self.d2phi(zeta),
                }
            }
        }
    }

    /// Solves `Phi(zeta) = z` for the exterior preimage by Newton's method.
    ///
    /// The first seed is `z` itself; on failure eight seeds of modulus `|z|`
    /// spread over the circle are tried.
    pub fn invert(&self, z: Complex64) -> Result<Complex64> {
        let tol = 1e-12 * z.norm().max(1.0);
        let r = z.norm().max(1.0 + 1e-6);
        let seeds = std::iter::once(z).chain(
            (0..8).map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / 8.0 + z.arg())),
        );
        for seed in seeds {
            if let Some(zeta) = self.newton(z, seed, tol) {
                return Ok(zeta);
            }
        }
        Err(Error::InversionFailed { re: z.re, im: z.im })
    }

    fn newton(&self, z: Complex64, seed: Complex64, tol: f64) -> Option<Complex64> {
        let mut zeta = seed;
        if zeta.norm() < 1.0 {
            zeta = zeta.unscale(zeta.norm()) * (1.0 + 1e-3);
        }
        for _ in 0..NEWTON_MAX_ITER {
            let f = self.phi(zeta) - z;
            let df = self.dphi(zeta);
            if df.norm() == 0.0 || !df.re.is_finite() {
                return None;
            }
            let step = f / df;
            zeta -= step;
            if !zeta.re.is_finite() || !zeta.im.is_finite() {
                return None;
            }
            if step.norm() <= 1e-15 * zeta.norm().max(1.0) {
                break;
            }
        }
        let residual = (self.phi(zeta) - z).norm();
        (residual <= tol && zeta.norm() > 1.0).then_some(zeta)
    }

    /// Winding-number and self-intersection checks on the boundary curve.
    fn check_injective(&self) -> Result<()> {
        let m = INJECTIVITY_SAMPLES;
        for &r in &DERIVATIVE_CHECK_RADII {
            let mut winding = 0.0;
            let mut prev = self.dphi(Complex64::new(r, 0.0));
            let mut min_abs = prev.norm();
            for k in 1..=m {
                let zeta = Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64);
                let cur = self.dphi(zeta);
                min_abs = min_abs.min(cur.norm());
                winding += (cur / prev).arg();
                prev = cur;
            }
            if min_abs < 1e-12 || (winding / (2.0 * PI)).round() != 0.0 {
                return Err(Error::NotInjective(format!(
                    "Phi' vanishes in |zeta| >= {r} (winding {:.3}, min |Phi'| {min_abs:.3e})",
                    winding / (2.0 * PI)
                )));
            }
        }
        let boundary: Vec<Complex64> = (0..m)
            .map(|k| self.boundary_point(2.0 * PI * k as f64 / m as f64))
            .collect();
        let min_jac = (0..m)
            .map(|k| self.jacobian(2.0 * PI * k as f64 / m as f64))
            .fold(f64::INFINITY, f64::min);
        if min_jac < 1e-10 {
            return Err(Error::NotInjective("Phi' vanishes on the unit circle".into()));
        }
        if let Some((i, j)) = first_self_intersection(&boundary) {
            return Err(Error::NotInjective(format!(
                "boundary segments {i} and {j} intersect"
            )));
        }
        Ok(())
    }
}

fn check_exterior(zeta: Complex64) -> Result<()> {
    if zeta.norm() < 1.0 - 1e-14 {
        Err(Error::InsideUnitDisk { re: zeta.re, im: zeta.im })
    } else {
        Ok(())
    }
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// First pair of non-adjacent intersecting edges of a closed polygon.
pub(crate) fn first_self_intersection(pts: &[Complex64]) -> Option<(usize, usize)> {
    let m = pts.len();
    let bbox: Vec<[f64; 4]> = (0..m)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            [a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im)]
        })
        .collect();
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (bi, bj) = (&bbox[i], &bbox[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            if segments_intersect(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Shape definition, as read from a shape or run-config file.
///
/// ```toml
/// kind = "laurent"
/// tail = [[0.0, 0.0], [0.1, 0.0]]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Disk,
    Ellipse { a: f64, b: f64 },
    Droplet,
    Laurent { tail: Vec<[f64; 2]> },
}

impl ShapeSpec {
    pub fn build(&self) -> Result<ConformalMap> {
        match self {
            ShapeSpec::Disk => Ok(ConformalMap::identity()),
            ShapeSpec::Ellipse { a, b } => ConformalMap::ellipse(*a, *b),
            ShapeSpec::Droplet => Ok(ConformalMap::droplet()),
            ShapeSpec::Laurent { tail } => {
                let tail: Vec<Complex64> =
                    tail.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                ConformalMap::laurent(&tail)
            }
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("shape description serializes")
    }
}
