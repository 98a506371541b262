//! The odd-mode tridiagonal systems of the two-harmonic disk problem.
//!
//! With `gamma = gamma0 + 2 gamma2 cos 2theta` the Fourier system decouples
//! into odd modes only. Writing `phi_{1,2k-1} = phi'_k + i phi''_k` for the
//! `e_1` density and similarly for `e_2`, the real unknowns satisfy
//!
//! ```text
//! A_N phi'_1 = -e_1      B_N phi''_1 = 0
//! A_N phi'_2 = 0         B_N phi''_2 = e_1
//! ```
//!
//! where both matrices have off-diagonal `gamma2`, diagonal `gamma0 + 2k - 1`
//! for `k >= 2`, and first diagonal entry `gamma0 + gamma2 + 1` (A) or
//! `gamma0 - gamma2 + 1` (B). The mode `2N+1` coupling of the last row is
//! dropped.
//!
//! The solution uses the explicit inverse of a symmetric tridiagonal matrix
//! built from the leading minors `xi_k` and trailing minors `tau_k`:
//!
//! ```text
//! (M^-1)_{kj} = (-gamma2)^{|k-j|} xi_{min-1} tau_{max+1} / xi_N
//! ```
//!
//! Minors grow factorially, so they are stored with a separate binary exponent.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OddSystem {
    A,
    B,
}

/// `m * 2^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub exponent: i32,
}

const CHUNK: i32 = 256;

fn ldexp(mut m: f64, mut e: i32) -> f64 {
    let up = 2f64.powi(CHUNK);
    let down = 2f64.powi(-CHUNK);
    while e > CHUNK {
        m *= up;
        e -= CHUNK;
        if !m.is_finite() {
            return m;
        }
    }
    while e < -CHUNK {
        m *= down;
        e += CHUNK;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e)
}

impl Scaled {
    pub const ONE: Scaled = Scaled { mantissa: 1.0, exponent: 0 };
    pub const ZERO: Scaled = Scaled { mantissa: 0.0, exponent: 0 };

    fn normalized(mut self) -> Self {
        let big = 2f64.powi(CHUNK);
        if self.mantissa == 0.0 {
            self.exponent = 0;
            return self;
        }
        while self.mantissa.abs() > big {
            self.mantissa /= big;
            self.exponent += CHUNK;
        }
        while self.mantissa.abs() < 1.0 / big {
            self.mantissa *= big;
            self.exponent -= CHUNK;
        }
        self
    }

    pub fn value(self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    fn mul(self, o: Scaled) -> Scaled {
        Scaled { mantissa: self.mantissa * o.mantissa, exponent: self.exponent + o.exponent }.normalized()
    }

    fn div(self, o: Scaled) -> Scaled {
        Scaled { mantissa: self.mantissa / o.mantissa, exponent: self.exponent - o.exponent }.normalized()
    }

    /// `a x + b y`.
    fn lin(a: f64, x: Scaled, b: f64, y: Scaled) -> Scaled {
        let e = if x.mantissa == 0.0 {
            y.exponent
        } else if y.mantissa == 0.0 {
            x.exponent
        } else {
            x.exponent.max(y.exponent)
        };
        let m = a * ldexp(x.mantissa, x.exponent - e) + b * ldexp(y.mantissa, y.exponent - e);
        Scaled { mantissa: m, exponent: e }.normalized()
    }
}

#[derive(Debug, Clone)]
pub struct TridiagonalSystem {
    which: OddSystem,
    gamma2: f64,
    /// `d_1..d_N` at indices `0..N`.
    diag: Vec<f64>,
    /// `xi_0..xi_N`.
    xi: Vec<Scaled>,
    /// `tau_1..tau_{N+2}` at indices `0..N+2`; `tau_{N+1} = 1`, `tau_{N+2} = 0`.
    tau: Vec<Scaled>,
}

impl TridiagonalSystem {
    pub fn new(gamma0: f64, gamma2: f64, n: usize, which: OddSystem) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tridiagonal size must be at least 1".into()));
        }
        if !(gamma0 > 0.0) || gamma0 < 2.0 * gamma2.abs() {
            return Err(Error::NegativeInterface { gamma0, gamma2 });
        }
        let first = match which {
            OddSystem::A => gamma0 + gamma2 + 1.0,
            OddSystem::B => gamma0 - gamma2 + 1.0,
        };
        let diag: Vec<f64> = (1..=n)
            .map(|k| if k == 1 { first } else { gamma0 + 2.0 * k as f64 - 1.0 })
            .collect();
        let g2sq = gamma2 * gamma2;

        let mut xi = Vec::with_capacity(n + 1);
        xi.push(Scaled::ONE);
        let mut prev2 = Scaled::ZERO; // xi_{-1}
        for k in 1..=n {
            let prev1 = xi[k - 1];
            let next = Scaled::lin(diag[k - 1], prev1, -g2sq, prev2);
            prev2 = prev1;
            xi.push(next);
        }

        let mut tau = vec![Scaled::ZERO; n + 2];
        tau[n] = Scaled::ONE;
        for k in (1..=n).rev() {
            let t1 = tau[k];
            let t2 = tau[k + 1];
            tau[k - 1] = Scaled::lin(diag[k - 1], t1, -g2sq, t2);
        }

        let sys = Self { which, gamma2, diag, xi, tau };
        if sys.xi[n].mantissa == 0.0 {
            return Err(Error::Singular("tridiagonal determinant vanishes".into()));
        }
        Ok(sys)
    }

    pub fn which(&self) -> OddSystem {
        self.which
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> f64 {
        self.gamma2
    }

    /// Leading minor `xi_k`, `0 <= k <= N`.
    pub fn xi(&self, k: usize) -> Scaled {
        self.xi[k]
    }

    /// Trailing minor `tau_k`, `1 <= k <= N + 2`.
    pub fn tau(&self, k: usize) -> Scaled {
        self.tau[k - 1]
    }

    /// `det M = xi_N`.
    pub fn determinant(&self) -> Scaled {
        self.xi[self.size()]
    }

    /// Entry `(k, j)` of the inverse, 1-based.
    pub fn inverse_entry(&self, k: usize, j: usize) -> f64 {
        let (lo, hi) = if k <= j { (k, j) } else { (j, k) };
        let sign_pow = Scaled { mantissa: (-self.gamma2).powi((hi - lo) as i32), exponent: 0 };
        sign_pow
            .mul(self.xi(lo - 1))
            .mul(self.tau(hi + 1))
            .div(self.determinant())
            .value()
    }

    /// First column of the inverse, `m_{k1}` for `k = 1..N`, via
    /// `m_11 = 1/(d_1 - gamma2^2 tau_3/tau_2)` and
    /// `m_{k1} = (-gamma2)^{k-1} (tau_{k+1}/tau_2) m_11`.
    pub fn inverse_first_column(&self) -> Vec<f64> {
        let g2sq = self.gamma2 * self.gamma2;
        let tau2 = self.tau(2);
        let m11 = 1.0 / (self.diag[0] - g2sq * self.tau(3).div(tau2).value());
        (1..=self.size())
            .map(|k| {
                let ratio = self.tau(k + 1).div(tau2);
                Scaled { mantissa: (-self.gamma2).powi(k as i32 - 1), exponent: 0 }
                    .mul(ratio)
                    .value()
                    * m11
            })
            .collect()
    }

    /// Solves `M x = rhs` by elimination (the independent check of the explicit inverse).
    pub fn thomas_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        thomas(&self.diag, self.gamma2, rhs)
    }
}

/// Symmetric tridiagonal solve with constant off-diagonal `c`.
pub fn thomas(diag: &[f64], c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::InvalidArgument("right-hand side length mismatch".into()));
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut denom = diag[0];
    for i in 0..n {
        if i > 0 {
            denom = diag[i] - c * cp[i - 1];
        }
        if denom == 0.0 {
            return Err(Error::Singular("zero pivot in tridiagonal elimination".into()));
        }
        cp[i] = c / denom;
        dp[i] = (rhs[i] - if i > 0 { c * dp[i - 1] } else { 0.0 }) / denom;
    }
    let mut x = dp;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Real and imaginary parts of the odd modes `phi_{j,2k-1}`, `k = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddModes {
    pub phi1_real: Vec<f64>,
    pub phi1_imag: Vec<f64>,
    pub phi2_real: Vec<f64>,
    pub phi2_imag: Vec<f64>,
}

/// Solution of system `which` for the unit-direction right-hand sides:
/// `A` returns `phi'_{1,2k-1} = -a_{k1}`, `B` returns `phi''_{2,2k-1} = b_{k1}`.
pub fn solve_tridiagonal(gamma0: f64, gamma2: f64, n: usize, which: OddSystem) -> Result<Vec<f64>> {
    let sys = TridiagonalSystem::new(gamma0, gamma2, n, which)?;
    let col = sys.inverse_first_column();
    Ok(match which {
        OddSystem::A => col.into_iter().map(|v| -v).collect(),
        OddSystem::B => col,
    })
}

/// All four odd-mode families; the two homogeneous systems have the zero solution.
pub fn odd_modes(gamma0: f64, gamma2: f64, n: usize) -> Result<OddModes> {
    Ok(OddModes {
        phi1_real: solve_tridiagonal(gamma0, gamma2, n, OddSystem::A)?,
        phi1_imag: vec![0.0; n],
        phi2_real: vec![0.0; n],
        phi2_imag: solve_tridiagonal(gamma0, gamma2, n, OddSystem::B)?,
    })
}
