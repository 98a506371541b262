//! Fourier solver for the imperfect-interface problem on the unit disk.
//!
//! On `|zeta| = 1` the density `phi_j` of the field `e_j` solves
//!
//! ```text
//! sum_k gamma_k phi_{j,n-k} + |n| phi_{j,n} = r_{j,n},    |n| <= N,
//! ```
//!
//! with `r_{1,+-1} = -1`, `r_{2,+-1} = +-i` and zero otherwise. Modes outside
//! `[-N, N]` are dropped. The `n = 0` row is the constraint `int gamma phi = 0`.

pub mod tridiagonal;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseLu;
use crate::tensor::{PolarizationTensor, Solver};

pub use tridiagonal::{odd_modes, solve_tridiagonal, thomas, OddModes, OddSystem, TridiagonalSystem};

/// Fourier coefficients of a real interface parameter on the unit circle.
///
/// Only `gamma_0..gamma_K` are stored; `gamma_{-k} = conj(gamma_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaModes {
    coeffs: Vec<Complex64>,
}

impl GammaModes {
    pub fn new(nonnegative: Vec<Complex64>) -> Result<Self> {
        if nonnegative.is_empty() {
            return Err(Error::InvalidArgument("at least gamma_0 is required".into()));
        }
        if nonnegative[0].im != 0.0 {
            return Err(Error::InvalidArgument("gamma_0 must be real".into()));
        }
        if nonnegative.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite gamma coefficient".into()));
        }
        let mut coeffs = nonnegative;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn constant(gamma0: f64) -> Self {
        Self { coeffs: vec![Complex64::new(gamma0, 0.0)] }
    }

    /// `gamma0 + 2 gamma2 cos(2 theta - phase)`.
    pub fn two_harmonic(gamma0: f64, gamma2: f64, phase: f64) -> Self {
        let g2 = Complex64::from_polar(gamma2, -phase);
        Self::new(vec![Complex64::new(gamma0, 0.0), Complex64::new(0.0, 0.0), g2])
            .expect("finite coefficients")
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.coeffs[0].re;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            v += 2.0 * (c * Complex64::from_polar(1.0, k as f64 * theta)).re;
        }
        v
    }

    /// Lower bound of `gamma` from dense sampling.
    pub fn sampled_min(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|q| self.eval(2.0 * PI * q as f64 / samples as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// `(k, gamma_k)` for `|k| <= K`, in increasing `k`.
    pub fn modes(&self) -> Vec<(i64, Complex64)> {
        let k = self.max_mode() as i64;
        (-k..=k).map(|m| (m, self.get(m))).collect()
    }
}

impl Serialize for GammaModes {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let modes: Vec<(i64, [f64; 2])> = self.modes().into_iter().map(|(k, c)| (k, [c.re, c.im])).collect();
        modes.serialize(s)
    }
}

/// Densities `phi_1`, `phi_2` for the fields `e_1`, `e_2`.
#[derive(Debug, Clone)]
pub struct FourierDensity {
    truncation: usize,
    gamma: GammaModes,
    phi1: Vec<Complex64>,
    phi2: Vec<Complex64>,
}

impl FourierDensity {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn gamma(&self) -> &GammaModes {
        &self.gamma
    }

    /// `phi_{j,n}` for `j` in `{1, 2}`; zero outside the truncation.
    pub fn phi(&self, j: usize, n: i64) -> Complex64 {
        let modes = match j {
            1 => &self.phi1,
            2 => &self.phi2,
            _ => panic!("density index must be 1 or 2, got {j}"),
        };
        let nn = self.truncation as i64;
        if n.abs() > nn {
            Complex64::new(0.0, 0.0)
        } else {
            modes[(n + nn) as usize]
        }
    }

    /// Modes of `psi = a_1 phi_1 + a_2 phi_2`, indices `-N..=N`.
    pub fn psi_modes(&self, a: [f64; 2]) -> Vec<Complex64> {
        self.phi1.iter().zip(&self.phi2).map(|(p1, p2)| p1 * a[0] + p2 * a[1]).collect()
    }

    /// `(gamma phi_j)_n` over the retained modes.
    pub fn convolved(&self, j: usize, n: i64) -> Complex64 {
        let kmax = self.gamma.max_mode() as i64;
        (-kmax..=kmax).map(|k| self.gamma.get(k) * self.phi(j, n - k)).sum()
    }

    /// `sum_k gamma_k phi_{j,-k}`, zero for an exact solution.
    pub fn constraint_residual(&self, j: usize) -> f64 {
        self.convolved(j, 0).norm()
    }

    /// Largest `|phi_{j,n} - conj(phi_{j,-n})|`.
    pub fn reality_defect(&self) -> f64 {
        let nn = self.truncation as i64;
        (1..=2)
            .flat_map(|j| (0..=nn).map(move |n| (j, n)))
            .map(|(j, n)| (self.phi(j, n) - self.phi(j, -n).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `T_{ij} = int_0^{2pi} (gamma - 1) nu_i phi_j dtheta` evaluated mode-wise.
    pub fn polarization(&self) -> PolarizationTensor {
        let mut t = [[0.0; 2]; 2];
        for j in 1..=2 {
            let c_plus = self.convolved(j, 1) - self.phi(j, 1);
            let c_minus = self.convolved(j, -1) - self.phi(j, -1);
            // int cos(theta) f = pi (f_1 + f_-1); int sin(theta) f = i pi (f_1 - f_-1)
            t[0][j - 1] = (PI * (c_plus + c_minus)).re;
            t[1][j - 1] = (Complex64::new(0.0, PI) * (c_plus - c_minus)).re;
        }
        PolarizationTensor::new(t, Solver::Spectral, self.truncation)
    }

    /// `u(zeta) - a . zeta` for `|zeta| > 1`.
    pub fn perturbation(&self, a: [f64; 2], zeta: Complex64) -> Result<f64> {
        let r = zeta.norm();
        if !(r > 1.0) {
            return Err(Error::InsideUnitDisk { re: zeta.re, im: zeta.im });
        }
        let psi = self.psi_modes(a);
        let nn = self.truncation as i64;
        let psi_at = |n: i64| if n.abs() > nn { Complex64::new(0.0, 0.0) } else { psi[(n + nn) as usize] };
        let kmax = self.gamma.max_mode() as i64;
        let gamma_psi = |n: i64| -> Complex64 { (-kmax..=kmax).map(|k| self.gamma.get(k) * psi_at(n - k)).sum() };

        let w = zeta / r;
        let mut total = -gamma_psi(0).re * r.ln();
        let top = nn + kmax;
        // u - a.x = -S[gamma psi] + D[psi]; per mode n != 0:
        // S[e^{in theta}] = -e^{in theta} / (2|n| r^|n|), D[e^{in theta}] = -e^{in theta} / (2 r^|n|)
        let mut rpow = 1.0;
        for m in 1..=top {
            rpow /= r;
            if rpow == 0.0 {
                break;
            }
            let mf = m as f64;
            let s = -rpow / (2.0 * mf);
            let d = -rpow / 2.0;
            let e_pos = w.powi(m as i32);
            for (n, e) in [(m, e_pos), (-m, e_pos.conj())] {
                let coeff = -gamma_psi(n) * s + psi_at(n) * d;
                total += (coeff * e).re;
            }
        }
        Ok(total)
    }

    /// `u(zeta)` for `|zeta| > 1`.
    pub fn field(&self, a: [f64; 2], zeta: Complex64) -> Result<f64> {
        Ok(a[0] * zeta.re + a[1] * zeta.im + self.perturbation(a, zeta)?)
    }
}

impl Serialize for FourierDensity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = |v: &[Complex64]| -> Vec<[f64; 2]> { v.iter().map(|c| [c.re, c.im]).collect() };
        let mut st = s.serialize_struct("FourierDensity", 4)?;
        st.serialize_field("N", &self.truncation)?;
        st.serialize_field("gamma_modes", &self.gamma)?;
        st.serialize_field("phi1_modes", &pairs(&self.phi1))?;
        st.serialize_field("phi2_modes", &pairs(&self.phi2))?;
        st.end()
    }
}

/// Solves the truncated convolution system for both field directions.
pub fn solve_dense(gamma: &GammaModes, truncation: usize) -> Result<FourierDensity> {
    if truncation < 2 * gamma.max_mode().max(1) {
        return Err(Error::InvalidArgument(format!(
            "truncation {truncation} too small for gamma modes up to {}",
            gamma.max_mode()
        )));
    }
    let nn = truncation as i64;
    let dim = 2 * truncation + 1;
    let kmax = gamma.max_mode() as i64;
    let matrix = DMatrix::from_fn(dim, dim, |row, col| {
        let n = row as i64 - nn;
        let m = col as i64 - nn;
        let mut v = if (n - m).abs() <= kmax { gamma.get(n - m) } else { Complex64::new(0.0, 0.0) };
        if n == m {
            v += n.abs() as f64;
        }
        v
    });
    let mut rhs = DMatrix::<Complex64>::zeros(dim, 2);
    let (plus, minus) = ((nn + 1) as usize, (nn - 1) as usize);
    rhs[(plus, 0)] = Complex64::new(-1.0, 0.0);
    rhs[(minus, 0)] = Complex64::new(-1.0, 0.0);
    rhs[(plus, 1)] = Complex64::new(0.0, 1.0);
    rhs[(minus, 1)] = Complex64::new(0.0, -1.0);

    let lu = DenseLu::new(matrix)?;
    let sol = lu.solve_matrix(&rhs)?;
    if sol.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Singular("truncated Fourier system".into()));
    }
    let col = |j: usize| -> Vec<Complex64> { sol.column(j).iter().copied().collect() };
    Ok(FourierDensity { truncation, gamma: gamma.clone(), phi1: col(0), phi2: col(1) })
}

/// Modes `-N..=N` of the density for the field direction `a`.
pub fn solve_direction(gamma: &GammaModes, truncation: usize, a: [f64; 2]) -> Result<Vec<Complex64>> {
    Ok(solve_dense(gamma, truncation)?.psi_modes(a))
}

/// Disk polarization tensor from the dense densities.
pub fn polarization(gamma: &GammaModes, truncation: usize) -> Result<PolarizationTensor> {
    Ok(solve_dense(gamma, truncation)?.polarization())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-13;

    #[test]
    fn gamma_modes_roundtrip() {
        let g = GammaModes::two_harmonic(17.0 / 15.0, -8.0 / 15.0, 0.0);
        assert_eq!(g.max_mode(), 2);
        assert!((g.eval(0.0) - 1.0 / 15.0).abs() < 1e-15);
        assert!((g.eval(PI / 2.0) - 33.0 / 15.0).abs() < 1e-15);
        assert_eq!(g.get(-2), g.get(2).conj());
        assert_eq!(g.get(3), Complex64::new(0.0, 0.0));
        assert_eq!(GammaModes::constant(1.0).max_mode(), 0);
        assert!(GammaModes::new(vec![Complex64::new(1.0, 0.5)]).is_err());
    }

    #[test]
    fn phased_gamma_evaluates_rotated_cosine() {
        let g = GammaModes::two_harmonic(1.5, 0.3, 0.7);
        for k in 0..10 {
            let th = 0.37 * k as f64;
            assert!((g.eval(th) - (1.5 + 0.6 * (2.0 * th - 0.7).cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_gamma_densities() {
        let d = solve_dense(&GammaModes::constant(1.0), 16).unwrap();
        assert!((d.phi(1, 1) - Complex64::new(-0.5, 0.0)).norm() < TOL);
        assert!((d.phi(1, -1) - Complex64::new(-0.5, 0.0)).norm() < TOL);
        assert!((d.phi(2, 1) - Complex64::new(0.0, 0.5)).norm() < TOL);
        assert!((d.phi(2, -1) - Complex64::new(0.0, -0.5)).norm() < TOL);
        for n in [-16, -3, 0, 2, 5, 16] {
            assert!(d.phi(1, n).norm() < TOL);
        }
        assert!(d.polarization().norm() < 1e-12);
    }

    #[test]
    fn two_harmonic_structure() {
        let d = solve_dense(&GammaModes::two_harmonic(17.0 / 15.0, -8.0 / 15.0, 0.0), 32).unwrap();
        for n in -32..=32i64 {
            if n % 2 == 0 {
                assert!(d.phi(1, n).norm() < 1e-12);
                assert!(d.phi(2, n).norm() < 1e-12);
            } else {
                assert!(d.phi(1, n).im.abs() < 1e-12);
                assert!(d.phi(2, n).re.abs() < 1e-12);
            }
        }
        assert!(d.reality_defect() < 1e-12);
        assert!(d.constraint_residual(1) < 1e-12);
        assert!(d.constraint_residual(2) < 1e-12);
    }

    #[test]
    fn perfectly_conducting_limit() {
        let t = polarization(&GammaModes::constant(1e6), 16).unwrap();
        let target = -2.0 * PI;
        assert!((t.t[0][0] - target).abs() < 1e-4);
        assert!((t.t[1][1] - target).abs() < 1e-4);
        assert!(t.t[0][1].abs() < 1e-12);

        let d = solve_dense(&GammaModes::constant(1e6), 16).unwrap();
        let u = d.field([1.0, 0.0], Complex64::new(2.0, 0.0)).unwrap();
        assert!((u - 1.5).abs() < 1e-5);
    }

    #[test]
    fn neutral_disk_field_is_uniform() {
        let d = solve_dense(&GammaModes::constant(1.0), 8).unwrap();
        for &z in &[Complex64::new(3.0, 4.0), Complex64::new(-1.2, 0.1), Complex64::new(0.0, 7.0)] {
            assert!(d.perturbation([0.6, 0.8], z).unwrap().abs() < 1e-15);
        }
        assert!(d.field([1.0, 0.0], Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn truncation_must_cover_gamma() {
        let g = GammaModes::two_harmonic(1.0, 0.1, 0.0);
        assert!(solve_dense(&g, 3).is_err());
        assert!(solve_dense(&g, 4).is_ok());
    }

    #[test]
    fn dense_matches_tridiagonal() {
        let (g0, g2) = (17.0 / 15.0, -8.0 / 15.0);
        let d = solve_dense(&GammaModes::two_harmonic(g0, g2, 0.0), 128).unwrap();
        let odd = odd_modes(g0, g2, 64).unwrap();
        for k in 1..=64usize {
            let n = 2 * k as i64 - 1;
            assert!((d.phi(1, n).re - odd.phi1_real[k - 1]).abs() < 1e-12);
            assert!((d.phi(2, n).im - odd.phi2_imag[k - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let d = solve_dense(&GammaModes::constant(1.0), 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["N"], 2);
        assert_eq!(v["phi1_modes"].as_array().unwrap().len(), 5);
        assert_eq!(v["gamma_modes"][0][0], 0);
    }
}
