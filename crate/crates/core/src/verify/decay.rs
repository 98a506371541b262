//! Far-field decay rate of a field perturbation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Perturbations below this are treated as exact zeros.
pub const DECAY_FLOOR: f64 = 1e-13;

/// Angles sampled per radius.
pub const DECAY_ANGLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    /// `max_theta |u(r e^{i theta}) - a.x|` per radius.
    pub max_perturbation: Vec<f64>,
    /// Least-squares slope of `log max_perturbation` against `log r`; `None` when below the floor.
    pub slope: Option<f64>,
    /// 95% confidence half-width of the slope.
    pub half_width: Option<f64>,
    pub below_floor: bool,
}

impl DecayFit {
    pub fn verdict(&self) -> String {
        match (self.slope, self.half_width) {
            (Some(s), Some(hw)) => format!("slope {s:.4} +- {hw:.4}"),
            _ => "neutral: below floor".to_string(),
        }
    }
}

/// Two-sided 95% Student-t quantiles for 1..=10 degrees of freedom.
const T95: [f64; 10] = [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];

fn t95(dof: usize) -> f64 {
    if dof == 0 {
        f64::INFINITY
    } else {
        T95.get(dof - 1).copied().unwrap_or(1.96)
    }
}

/// Least-squares line through `(x, y)`: `(slope, 95% half-width)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let dof = x.len().saturating_sub(2);
    let se = if dof > 0 { (ssr / dof as f64 / sxx).sqrt() } else { f64::INFINITY };
    (slope, t95(dof) * se)
}

/// Fits the decay of `perturbation(x) = u(x) - a.x` over circles of the given radii.
pub fn farfield_decay<F>(perturbation: F, radii: &[f64]) -> Result<DecayFit>
where
    F: Fn(Complex64) -> Result<f64>,
{
    if radii.len() < 4 {
        return Err(Error::InvalidArgument(format!("at least 4 radii needed, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
    }
    let mut maxima = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut m: f64 = 0.0;
        for k in 0..DECAY_ANGLES {
            let x = Complex64::from_polar(r, 2.0 * PI * k as f64 / DECAY_ANGLES as f64);
            m = m.max(perturbation(x)?.abs());
        }
        maxima.push(m);
    }
    if maxima.iter().all(|m| *m < DECAY_FLOOR) {
        return Ok(DecayFit {
            radii: radii.to_vec(),
            max_perturbation: maxima,
            slope: None,
            half_width: None,
            below_floor: true,
        });
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(&maxima)
        .filter(|(_, m)| **m >= DECAY_FLOOR)
        .map(|(r, m)| (r.ln(), m.ln()))
        .unzip();
    if lx.len() < 3 {
        return Err(Error::Degenerate(format!(
            "only {} radii above the {DECAY_FLOOR:e} floor",
            lx.len()
        )));
    }
    let (slope, hw) = fit_line(&lx, &ly);
    Ok(DecayFit {
        radii: radii.to_vec(),
        max_perturbation: maxima,
        slope: Some(slope),
        half_width: Some(hw),
        below_floor: false,
    })
}
