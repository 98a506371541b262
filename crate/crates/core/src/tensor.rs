use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Spectral,
    Bem,
}

/// A 2x2 polarization tensor and the discretization it came from.
///
/// `t[i][j]` is `T_{i+1, j+1}`; column `j` is the response to the field `e_{j+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationTensor {
    pub t: [[f64; 2]; 2],
    pub provenance: Solver,
    /// Fourier truncation `N` (spectral) or node count `n` (boundary elements).
    pub resolution: usize,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct Record {
    T11: f64,
    T12: f64,
    T21: f64,
    T22: f64,
    provenance: Solver,
    resolution: usize,
}

impl Serialize for PolarizationTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Record {
            T11: self.t[0][0],
            T12: self.t[0][1],
            T21: self.t[1][0],
            T22: self.t[1][1],
            provenance: self.provenance,
            resolution: self.resolution,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolarizationTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = Record::deserialize(d)?;
        Ok(Self {
            t: [[r.T11, r.T12], [r.T21, r.T22]],
            provenance: r.provenance,
            resolution: r.resolution,
        })
    }
}

impl PolarizationTensor {
    pub fn new(t: [[f64; 2]; 2], provenance: Solver, resolution: usize) -> Self {
        Self { t, provenance, resolution }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        frobenius(&self.t)
    }

    /// Frobenius norm of the difference from `other`.
    pub fn distance(&self, other: &[[f64; 2]; 2]) -> f64 {
        frobenius(&sub(&self.t, other))
    }

    pub fn asymmetry(&self) -> f64 {
        (self.t[0][1] - self.t[1][0]).abs()
    }

    /// `R T R^T` with `R` the counter-clockwise rotation by `rho`.
    pub fn rotated(&self, rho: f64) -> Self {
        Self { t: rotate(&self.t, rho), ..*self }
    }

    /// Response to a general field direction `a`: the vector `T a`.
    pub fn apply(&self, a: [f64; 2]) -> [f64; 2] {
        [
            self.t[0][0] * a[0] + self.t[0][1] * a[1],
            self.t[1][0] * a[0] + self.t[1][1] * a[1],
        ]
    }
}

pub fn rotate(t: &[[f64; 2]; 2], rho: f64) -> [[f64; 2]; 2] {
    let (s, c) = rho.sin_cos();
    let r = [[c, -s], [s, c]];
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (0..2)
                .flat_map(|k| (0..2).map(move |l| (k, l)))
                .map(|(k, l)| r[i][k] * t[k][l] * r[j][l])
                .sum();
        }
    }
    out
}

pub fn sub(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn frobenius(t: &[[f64; 2]; 2]) -> f64 {
    t.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}
