//! Interface parameters: `gamma` on the unit circle and its pull-back `beta`
//! on the inclusion boundary, related by `gamma(theta) = beta(Phi(e^{i theta})) |Phi'(e^{i theta})|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::disk_spectral::{self, GammaModes};
use crate::error::{Error, Result};
use crate::B_MAX;

/// Default Fourier truncation for calibration.
pub const DEFAULT_TRUNCATION: usize = 128;

const CALIBRATION_TOL: f64 = 1e-12;
const CALIBRATION_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Calibrated,
}

/// `gamma(theta) = gamma0 + 2 gamma2 cos(2 theta - phase)` together with the
/// map used to pull it back to the boundary of the inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceParameter {
    pub gamma0: f64,
    pub gamma2: f64,
    pub phase: f64,
    pub provenance: Provenance,
    /// Truncation the calibration was run at.
    pub truncation: Option<usize>,
    map: ConformalMap,
}

/// `(gamma0, gamma2)` of the closed-form design for `|b| = b_abs`.
pub fn gamma_closed_form(b_abs: f64) -> Result<(f64, f64)> {
    if !(0.0..=B_MAX).contains(&b_abs) {
        return Err(Error::Inadmissible(b_abs));
    }
    let (p, m) = (1.0 / (1.0 + b_abs), 1.0 / (1.0 - b_abs));
    Ok((p + m - 1.0, p - m))
}

/// The closed form in exact rational arithmetic.
pub fn gamma_closed_form_exact(b: Ratio<i64>) -> (Ratio<i64>, Ratio<i64>) {
    let one = Ratio::from_integer(1);
    let p = one / (one + b);
    let m = one / (one - b);
    (p + m - one, p - m)
}

/// Rotation of the `cos 2 theta` term that makes the design work for complex `b`.
pub fn phase_for_complex_b(b: Complex64) -> f64 {
    if b.norm() == 0.0 {
        0.0
    } else {
        b.arg()
    }
}

/// Constant `beta` making a disk of radius `r` neutral; `sigma_c = None` is
/// the perfectly conducting core.
pub fn neutral_disk_beta(r: f64, sigma_c: Option<f64>, sigma_m: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    match sigma_c {
        None => Ok(sigma_m / r),
        Some(c) if c == sigma_m => Err(Error::InvalidArgument("sigma_c equals sigma_m".into())),
        Some(c) if c.is_infinite() => Ok(sigma_m / r),
        Some(c) => Ok(c * sigma_m / ((c - sigma_m) * r)),
    }
}

fn calibration_residual(gamma0: f64, gamma2: f64, b_abs: f64, truncation: usize) -> Result<[f64; 2]> {
    let t = disk_spectral::polarization(&GammaModes::two_harmonic(gamma0, gamma2, 0.0), truncation)?;
    Ok([t.t[0][0] - 2.0 * PI * b_abs, t.t[1][1] + 2.0 * PI * b_abs])
}

/// `(gamma0, gamma2)` for which the truncated disk problem has the polarization
/// tensor `2 pi diag(b_abs, -b_abs)` exactly, by damped Newton from the closed form.
pub fn calibrate_gamma(b_abs: f64, truncation: usize) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&b_abs) {
        return Err(Error::InvalidArgument(format!("|b| = {b_abs} outside [0, 1)")));
    }
    let mut x = match gamma_closed_form(b_abs.min(B_MAX)) {
        Ok(g) => [g.0, g.1],
        Err(_) => [1.0, 0.0],
    };
    let norm = |f: &[f64; 2]| f[0].hypot(f[1]);
    let mut f = calibration_residual(x[0], x[1], b_abs, truncation)?;
    for _ in 0..CALIBRATION_MAX_ITER {
        if norm(&f) <= CALIBRATION_TOL {
            break;
        }
        let mut jac = [[0.0; 2]; 2];
        for c in 0..2 {
            let h = 1e-7 * x[c].abs().max(1.0);
            let mut xp = x;
            xp[c] += h;
            let fp = calibration_residual(xp[0], xp[1], b_abs, truncation)?;
            jac[0][c] = (fp[0] - f[0]) / h;
            jac[1][c] = (fp[1] - f[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::CalibrationFailed("singular Jacobian".into()));
        }
        let step = [
            (jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let trial = [x[0] - lambda * step[0], x[1] - lambda * step[1]];
            let ok = trial[0] > 0.0 && trial[0] >= 2.0 * trial[1].abs();
            if ok {
                if let Ok(ft) = calibration_residual(trial[0], trial[1], b_abs, truncation) {
                    if norm(&ft) < norm(&f) || lambda < 1e-3 {
                        x = trial;
                        f = ft;
                        break;
                    }
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::CalibrationFailed(format!(
                    "line search stalled at |F| = {:.3e}; a nonnegative two-harmonic gamma reaches only |b| < 0.294",
                    norm(&f)
                )));
            }
        }
    }
    if norm(&f) > 1e-10 {
        return Err(Error::CalibrationFailed(format!(
            "no convergence: |F| = {:.3e}",
            norm(&f)
        )));
    }
    if x[0] < 2.0 * x[1].abs() {
        return Err(Error::NegativeInterface { gamma0: x[0], gamma2: x[1] });
    }
    Ok((x[0], x[1]))
}

impl InterfaceParameter {
    /// The closed-form design for `map`.
    pub fn closed_form(map: &ConformalMap) -> Result<Self> {
        let b = map.b_omega();
        let (gamma0, gamma2) = gamma_closed_form(b.norm())?;
        Ok(Self {
            gamma0,
            gamma2,
            phase: phase_for_complex_b(b),
            provenance: Provenance::ClosedForm,
            truncation: None,
            map: map.clone(),
        })
    }

    /// The design calibrated against the spectral solver at `truncation`.
    pub fn calibrated(map: &ConformalMap, truncation: usize) -> Result<Self> {
        let b = map.b_omega();
        let (gamma0, gamma2) = calibrate_gamma(b.norm(), truncation)?;
        Ok(Self {
            gamma0,
            gamma2,
            phase: phase_for_complex_b(b),
            provenance: Provenance::Calibrated,
            truncation: Some(truncation),
            map: map.clone(),
        })
    }

    /// Explicit coefficients; rejects a `gamma` that is negative somewhere.
    pub fn from_coefficients(
        map: &ConformalMap,
        gamma0: f64,
        gamma2: f64,
        phase: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        if !(gamma0 > 0.0) || gamma0 < 2.0 * gamma2.abs() {
            return Err(Error::NegativeInterface { gamma0, gamma2 });
        }
        Ok(Self { gamma0, gamma2, phase, provenance, truncation: None, map: map.clone() })
    }

    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    pub fn gamma_modes(&self) -> GammaModes {
        GammaModes::two_harmonic(self.gamma0, self.gamma2, self.phase)
    }

    pub fn gamma(&self, theta: f64) -> f64 {
        self.gamma0 + 2.0 * self.gamma2 * (2.0 * theta - self.phase).cos()
    }

    pub fn min_gamma(&self) -> f64 {
        self.gamma0 - 2.0 * self.gamma2.abs()
    }

    /// `beta` at the boundary point `Phi(e^{i theta})`.
    pub fn beta(&self, theta: f64) -> Result<f64> {
        let jac = self.map.jacobian(theta);
        if self.map.corner_distance(theta) < 1e-12 || jac == 0.0 {
            return Err(Error::CornerPoint(theta));
        }
        Ok(self.gamma(theta) / jac)
    }

    /// `(theta, beta)` on `samples` equispaced angles; corner angles are skipped.
    pub fn beta_samples(&self, samples: usize) -> Vec<(f64, f64)> {
        (0..samples)
            .map(|q| 2.0 * PI * q as f64 / samples as f64)
            .filter_map(|th| self.beta(th).ok().map(|b| (th, b)))
            .collect()
    }

    pub fn record(&self) -> ParameterRecord {
        let b = self.map.b_omega();
        ParameterRecord {
            b_re: b.re,
            b_im: b.im,
            gamma0: self.gamma0,
            gamma2: self.gamma2,
            phase: self.phase,
            provenance: self.provenance,
            N: self.truncation,
        }
    }
}

/// Exported parameter record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ParameterRecord {
    pub b_re: f64,
    pub b_im: f64,
    pub gamma0: f64,
    pub gamma2: f64,
    pub phase: f64,
    pub provenance: Provenance,
    pub N: Option<usize>,
}

/// CSV with header `theta,beta`.
pub fn beta_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("theta,beta\n");
    for (th, b) in samples {
        out.push_str(&format!("{th:.17e},{b:.17e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let (g0, g2) = gamma_closed_form(0.25).unwrap();
        assert!((g0 - 17.0 / 15.0).abs() < 1e-15);
        assert!((g2 + 8.0 / 15.0).abs() < 1e-15);
        assert_eq!(gamma_closed_form(0.0).unwrap(), (1.0, 0.0));
        let (g0, g2) = gamma_closed_form(B_MAX).unwrap();
        assert!((g0 - 2.0 * g2.abs()).abs() < 1e-14);
        assert!(matches!(gamma_closed_form(0.3), Err(Error::Inadmissible(_))));
        assert!(gamma_closed_form(-0.1).is_err());
    }

    #[test]
    fn closed_form_is_rational_at_one_quarter() {
        let (g0, g2) = gamma_closed_form_exact(Ratio::new(1, 4));
        assert_eq!(g0, Ratio::new(17, 15));
        assert_eq!(g2, Ratio::new(-8, 15));
        assert_eq!(g2 * 2, Ratio::new(-16, 15));
    }

    #[test]
    fn gamma_evaluation() {
        let map = ConformalMap::ellipse(1.25, 0.75).unwrap();
        let p = InterfaceParameter::closed_form(&map).unwrap();
        assert!((p.gamma(0.0) - 1.0 / 15.0).abs() < 1e-15);
        assert!((p.gamma(PI / 2.0) - 33.0 / 15.0).abs() < 1e-15);
        let disk = InterfaceParameter::closed_form(&ConformalMap::identity()).unwrap();
        assert_eq!(disk.gamma(1.234), 1.0);
        assert_eq!(disk.beta(0.3).unwrap(), 1.0);
    }

    #[test]
    fn beta_of_the_ellipse() {
        let map = ConformalMap::ellipse(1.25, 0.75).unwrap();
        let p = InterfaceParameter::closed_form(&map).unwrap();
        for k in 0..32 {
            let th = 2.0 * PI * k as f64 / 32.0;
            let expected = (17.0 / 15.0 - 16.0 / 15.0 * (2.0 * th).cos())
                / (Complex64::new(1.0, 0.0) - 0.25 * Complex64::from_polar(1.0, -2.0 * th)).norm();
            assert!((p.beta(th).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn beta_of_the_droplet_and_its_corner() {
        let map = ConformalMap::droplet();
        let p = InterfaceParameter::closed_form(&map).unwrap();
        for k in 0..32 {
            let th = -3.0 + 6.0 * k as f64 / 31.0;
            let e = Complex64::from_polar(1.0, th);
            let jac = ((1.0 + e.inv()) / (1.0 + 0.5 * e.inv()).powi(2)).norm();
            let expected = (17.0 / 15.0 - 16.0 / 15.0 * (2.0 * th).cos()) / jac;
            assert!((p.beta(th).unwrap() - expected).abs() < 1e-12 * expected.max(1.0));
        }
        assert!(matches!(p.beta(PI), Err(Error::CornerPoint(_))));
        assert_eq!(p.beta_samples(8).len(), 7);
    }

    #[test]
    fn phases() {
        assert_eq!(phase_for_complex_b(Complex64::new(0.25, 0.0)), 0.0);
        assert!((phase_for_complex_b(Complex64::new(0.0, 0.25)) - PI / 2.0).abs() < 1e-15);
        assert!((phase_for_complex_b(Complex64::new(-0.25, 0.0)) - PI).abs() < 1e-15);
    }

    #[test]
    fn neutral_disk_examples() {
        assert_eq!(neutral_disk_beta(1.0, None, 1.0).unwrap(), 1.0);
        assert_eq!(neutral_disk_beta(2.0, Some(f64::INFINITY), 1.0).unwrap(), 0.5);
        assert!((neutral_disk_beta(1.0, Some(3.0), 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(neutral_disk_beta(1.0, Some(1.0), 1.0).is_err());
        assert!(neutral_disk_beta(0.0, None, 1.0).is_err());
    }

    #[test]
    fn calibration_fixed_point_at_zero() {
        let (g0, g2) = calibrate_gamma(0.0, 64).unwrap();
        assert!((g0 - 1.0).abs() < 1e-12);
        assert!(g2.abs() < 1e-12);
    }

    #[test]
    fn record_fields() {
        let map = ConformalMap::ellipse(1.25, 0.75).unwrap();
        let v = serde_json::to_value(InterfaceParameter::closed_form(&map).unwrap().record()).unwrap();
        assert_eq!(v["provenance"], "closed_form");
        assert!(v["N"].is_null());
        assert_eq!(v["b_re"], 0.25);
    }
}
