//! Nyström discretization of the boundary `Phi(e^{i theta})`.
//!
//! The boundary is parametrized by `s` in `[0, 2 pi)` with nodes
//! `s_q = (q + shift) h`, `h = 2 pi / n`. Smooth shapes use `theta = s`.
//! For a shape with a corner at `theta_c` the substitution
//! `theta = theta_c + w(s)` clusters nodes toward the corner; with
//! `shift = 1/2` the corner itself is never a node.
//!
//! Points are stored as `anchor + offset` with the anchor at the corner, so
//! differences between nodes close to the corner keep their relative accuracy.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grading {
    None,
    /// Polynomial grading of the given order toward the single corner.
    Corner { order: u32 },
}

impl Grading {
    pub const DEFAULT_ORDER: u32 = 4;

    pub fn corner() -> Self {
        Grading::Corner { order: Self::DEFAULT_ORDER }
    }

    /// Grading suited to `map`: graded if it has a corner.
    pub fn for_map(map: &ConformalMap) -> Self {
        if map.has_corners() {
            Self::corner()
        } else {
            Grading::None
        }
    }
}

/// Grading substitution `w: [0, 2 pi] -> [0, 2 pi]` and its first two derivatives.
///
/// `w(s) = 2 pi v^p / (v^p + (1 - v)^p)` with
/// `v(s) = (1/p - 1/2) ((pi - s)/pi)^3 + (1/p) (s - pi)/pi + 1/2`.
pub fn grading_map(s: f64, p: u32) -> (f64, f64, f64) {
    let pf = p as f64;
    let c = 1.0 / pf - 0.5;
    let u = (PI - s) / PI;
    let v = c * u * u * u - u / pf + 0.5;
    let dv = -3.0 * c * u * u / PI + 1.0 / (pf * PI);
    let d2v = 6.0 * c * u / (PI * PI);
    let vm = 1.0 - v;
    let a = v.powi(p as i32);
    let b = vm.powi(p as i32);
    let sum = a + b;
    let w = 2.0 * PI * a / sum;

    let pv1 = v.powi(p as i32 - 1);
    let pm1 = vm.powi(p as i32 - 1);
    let g = pf * dv * pv1 * pm1;
    let den = sum * sum;
    let dw = 2.0 * PI * g / den;

    let pv2 = if p >= 2 { v.powi(p as i32 - 2) } else { 0.0 };
    let pm2 = if p >= 2 { vm.powi(p as i32 - 2) } else { 0.0 };
    let dg = pf * (d2v * pv1 * pm1 + dv * dv * (pf - 1.0) * (pv2 * pm1 - pv1 * pm2));
    let dden = 2.0 * sum * pf * dv * (pv1 - pm1);
    let d2w = 2.0 * PI * (dg * den - g * dden) / (den * den);
    (w, dw, d2w)
}

/// Corner-relative angle `delta = theta - theta_c` in `(-pi, pi)` and its derivatives.
fn graded_delta(s: f64, p: u32) -> (f64, f64, f64) {
    if s <= PI {
        grading_map(s, p)
    } else {
        // w(2 pi - s) = 2 pi - w(s); evaluate on the near side to keep small deltas exact
        let (w, dw, d2w) = grading_map(2.0 * PI - s, p);
        (-w, dw, -d2w)
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    n: usize,
    h: f64,
    grading: Grading,
    corner_angle: Option<f64>,
    /// Parameter values `s_q`.
    s: Vec<f64>,
    /// Preimage angles `theta_q` (for graded meshes relative offsets are in `delta`).
    theta: Vec<f64>,
    delta: Vec<f64>,
    theta_s: Vec<f64>,
    anchor: Complex64,
    offset: Vec<Complex64>,
    /// `dx/ds` and `d^2x/ds^2`.
    xs: Vec<Complex64>,
    xss: Vec<Complex64>,
    /// `|Phi'(e^{i theta_q})|`.
    jac: Vec<f64>,
}

impl BoundaryMesh {
    pub fn discretize(map: &ConformalMap, n: usize, grading: Grading) -> Result<Self> {
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("node count must be even and at least 16, got {n}")));
        }
        let h = 2.0 * PI / n as f64;
        match grading {
            Grading::None => {
                if map.has_corners() {
                    return Err(Error::GradingRequired);
                }
                let mut mesh = Self::empty(n, h, grading, None, Complex64::new(0.0, 0.0));
                for q in 0..n {
                    let theta = q as f64 * h;
                    let zeta = Complex64::from_polar(1.0, theta);
                    let dphi = map.dphi(zeta);
                    let d2phi = map.d2phi(zeta);
                    mesh.push(theta, theta, theta, 1.0, 0.0, map.phi(zeta), zeta, dphi, d2phi);
                }
                Ok(mesh)
            }
            Grading::Corner { order } => {
                if order < 2 {
                    return Err(Error::InvalidArgument(format!("grading order must be at least 2, got {order}")));
                }
                let corners = map.corners();
                let theta_c = match corners {
                    [c] => *c,
                    [] => return Err(Error::InvalidArgument("corner grading requested for a map without corners".into())),
                    _ => return Err(Error::InvalidArgument("corner grading supports a single corner".into())),
                };
                let mut mesh = Self::empty(n, h, grading, Some(theta_c), map.corner_point(0));
                for q in 0..n {
                    let s = (q as f64 + 0.5) * h;
                    let (delta, ds, dss) = graded_delta(s, order);
                    let local = map.corner_local(0, delta);
                    mesh.push(s, theta_c + delta, delta, ds, dss, local.offset, local.zeta, local.dphi, local.d2phi);
                }
                Ok(mesh)
            }
        }
    }

    fn empty(n: usize, h: f64, grading: Grading, corner_angle: Option<f64>, anchor: Complex64) -> Self {
        Self {
            n,
            h,
            grading,
            corner_angle,
            s: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
            delta: Vec::with_capacity(n),
            theta_s: Vec::with_capacity(n),
            anchor,
            offset: Vec::with_capacity(n),
            xs: Vec::with_capacity(n),
            xss: Vec::with_capacity(n),
            jac: Vec::with_capacity(n),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        s: f64,
        theta: f64,
        delta: f64,
        theta_s: f64,
        theta_ss: f64,
        offset: Complex64,
        zeta: Complex64,
        dphi: Complex64,
        d2phi: Complex64,
    ) {
        let i = Complex64::i();
        let xs = dphi * i * zeta * theta_s;
        let xss = (-zeta * zeta * d2phi - zeta * dphi) * theta_s * theta_s + i * zeta * dphi * theta_ss;
        self.s.push(s);
        self.theta.push(theta);
        self.delta.push(delta);
        self.theta_s.push(theta_s);
        self.offset.push(offset);
        self.xs.push(xs);
        self.xss.push(xss);
        self.jac.push(dphi.norm());
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Parameter step `h = 2 pi / n`.
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn corner_angle(&self) -> Option<f64> {
        self.corner_angle
    }

    pub fn is_graded(&self) -> bool {
        self.corner_angle.is_some()
    }

    pub fn parameters(&self) -> &[f64] {
        &self.s
    }

    /// Preimage angles on the unit circle.
    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Angles relative to the corner (equal to the angles for smooth meshes).
    pub fn corner_offsets(&self) -> &[f64] {
        &self.delta
    }

    /// `d theta / ds`.
    pub fn theta_s(&self) -> &[f64] {
        &self.theta_s
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    pub fn offsets(&self) -> &[Complex64] {
        &self.offset
    }

    pub fn node(&self, q: usize) -> Complex64 {
        self.anchor + self.offset[q]
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.n).map(|q| self.node(q)).collect()
    }

    /// `x_i - x_j` without going through absolute positions.
    pub fn diff(&self, i: usize, j: usize) -> Complex64 {
        self.offset[i] - self.offset[j]
    }

    pub fn xs(&self) -> &[Complex64] {
        &self.xs
    }

    /// `|dx/ds|`.
    pub fn speed(&self, q: usize) -> f64 {
        self.xs[q].norm()
    }

    pub fn jacobians(&self) -> &[f64] {
        &self.jac
    }

    pub fn tangent(&self, q: usize) -> Complex64 {
        self.xs[q] / self.xs[q].norm()
    }

    /// Outward unit normal as a complex number.
    pub fn normal(&self, q: usize) -> Complex64 {
        let t = self.tangent(q);
        Complex64::new(t.im, -t.re)
    }

    /// Signed curvature, positive on convex parts.
    pub fn curvature(&self, q: usize) -> f64 {
        let xs = self.xs[q];
        (xs.conj() * self.xss[q]).im / xs.norm().powi(3)
    }

    /// Arclength weight `|dx/ds| h`.
    pub fn weight(&self, q: usize) -> f64 {
        self.speed(q) * self.h
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n).map(|q| self.weight(q)).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.weights().iter().sum()
    }

    pub fn translated(&self, t: Complex64) -> Self {
        let mut m = self.clone();
        m.anchor += t;
        m
    }

    /// The mesh rotated counter-clockwise by `rho` about the origin.
    pub fn rotated(&self, rho: f64) -> Self {
        let r = Complex64::from_polar(1.0, rho);
        let mut m = self.clone();
        m.anchor *= r;
        for v in m.offset.iter_mut().chain(m.xs.iter_mut()).chain(m.xss.iter_mut()) {
            *v *= r;
        }
        m
    }

    /// Winding number of the node polygon about `x`.
    pub fn winding_number(&self, x: Complex64) -> i64 {
        let rel: Vec<Complex64> = self.offset.iter().map(|o| self.anchor + o - x).collect();
        let total: f64 = (0..self.n).map(|q| (rel[(q + 1) % self.n] / rel[q]).arg()).sum();
        (total / (2.0 * PI)).round() as i64
    }

    pub fn contains(&self, x: Complex64) -> bool {
        self.winding_number(x) != 0
    }

    /// A point inside the curve (area centroid when it lies inside).
    pub fn interior_point(&self) -> Result<Complex64> {
        let mut area = 0.0;
        let mut c = Complex64::new(0.0, 0.0);
        for q in 0..self.n {
            let (a, b) = (self.offset[q], self.offset[(q + 1) % self.n]);
            let cr = a.re * b.im - a.im * b.re;
            area += cr;
            c += (a + b) * cr;
        }
        if area == 0.0 {
            return Err(Error::Degenerate("zero enclosed area".into()));
        }
        let centroid = self.anchor + c / (3.0 * area);
        if self.contains(centroid) {
            Ok(centroid)
        } else {
            Err(Error::Degenerate("area centroid lies outside the curve".into()))
        }
    }

    /// `(theta, x, y, nu1, nu2, w)` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,x,y,nu1,nu2,w\n");
        for q in 0..self.n {
            let p = self.node(q);
            let nu = self.normal(q);
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.theta[q],
                p.re,
                p.im,
                nu.re,
                nu.im,
                self.weight(q)
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grading_endpoints_and_symmetry() {
        for p in [2, 3, 4, 6] {
            let (w0, _, _) = grading_map(0.0, p);
            let (w1, _, _) = grading_map(2.0 * PI, p);
            let (wm, _, _) = grading_map(PI, p);
            assert!(w0.abs() < 1e-15);
            assert!((w1 - 2.0 * PI).abs() < 1e-13);
            assert!((wm - PI).abs() < 1e-13);
            for k in 1..20 {
                let s = 0.3 * k as f64;
                let (a, _, _) = grading_map(s, p);
                let (b, _, _) = grading_map(2.0 * PI - s, p);
                assert!((a + b - 2.0 * PI).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grading_derivatives_match_differences() {
        let h = 1e-5;
        for p in [3, 4, 5] {
            for k in 1..30 {
                let s = 0.2 * k as f64;
                let (_, dw, d2w) = grading_map(s, p);
                let (wp, dwp, _) = grading_map(s + h, p);
                let (wm, dwm, _) = grading_map(s - h, p);
                assert!((dw - (wp - wm) / (2.0 * h)).abs() < 1e-7 * dw.abs().max(1.0));
                assert!((d2w - (dwp - dwm) / (2.0 * h)).abs() < 1e-6 * d2w.abs().max(1.0));
            }
        }
    }

    #[test]
    fn circle_mesh() {
        let m = BoundaryMesh::discretize(&ConformalMap::identity(), 256, Grading::None).unwrap();
        assert!((m.perimeter() - 2.0 * PI).abs() < 1e-12);
        for q in 0..256 {
            assert!((m.curvature(q) - 1.0).abs() < 1e-13);
            assert!((m.normal(q) - m.node(q)).norm() < 1e-14);
        }
    }

    #[test]
    fn invalid_requests() {
        let drop = ConformalMap::droplet();
        assert_eq!(BoundaryMesh::discretize(&drop, 64, Grading::None).unwrap_err(), Error::GradingRequired);
        let disk = ConformalMap::identity();
        assert!(BoundaryMesh::discretize(&disk, 64, Grading::corner()).is_err());
        assert!(BoundaryMesh::discretize(&disk, 15, Grading::None).is_err());
        assert!(BoundaryMesh::discretize(&disk, 34, Grading::None).is_ok());
        assert!(BoundaryMesh::discretize(&disk, 35, Grading::None).is_err());
    }

    #[test]
    fn droplet_mesh_excludes_the_corner() {
        let drop = ConformalMap::droplet();
        let m = BoundaryMesh::discretize(&drop, 128, Grading::corner()).unwrap();
        assert!(m.offsets().iter().all(|o| o.norm() > 0.0));
        assert!((m.anchor() - Complex64::new(-1.5, 0.0)).norm() < 1e-15);
        for q in 0..128 {
            let direct = drop.boundary_point(m.angles()[q]);
            assert!((m.node(q) - direct).norm() < 1e-13);
        }
        // nodes mirror across the real axis
        for q in 0..64 {
            assert!((m.node(q) - m.node(127 - q).conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn rotation_and_translation() {
        let ell = ConformalMap::ellipse(1.25, 0.75).unwrap();
        let m = BoundaryMesh::discretize(&ell, 64, Grading::None).unwrap();
        let r = m.rotated(0.7).translated(Complex64::new(3.0, -2.0));
        for q in 0..64 {
            assert!((r.weight(q) - m.weight(q)).abs() < 1e-14);
            assert!((r.curvature(q) - m.curvature(q)).abs() < 1e-12);
            assert!((r.normal(q) - m.normal(q) * Complex64::from_polar(1.0, 0.7)).norm() < 1e-14);
        }
        assert!(r.contains(Complex64::new(3.0, -2.0)));
        assert!(!r.contains(Complex64::new(0.0, 0.0)));
    }
}
