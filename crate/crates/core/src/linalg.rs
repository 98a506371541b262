//! Dense LU with adjoint solves and a 1-norm condition estimate.

use nalgebra::{ComplexField, DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

/// LU factorization `P A = L U` of a square matrix.
pub struct DenseLu<T: ComplexField<RealField = f64>> {
    lu: LU<T, Dyn, Dyn>,
    l: DMatrix<T>,
    u: DMatrix<T>,
    norm1: f64,
}

impl<T: ComplexField<RealField = f64>> DenseLu<T> {
    pub fn new(a: DMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(format!(
                "LU needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let norm1 = norm1(&a);
        if !norm1.is_finite() {
            return Err(Error::Singular("matrix has non-finite entries".into()));
        }
        let lu = a.lu();
        let u = lu.u();
        let pivot_min = u.diagonal().iter().map(|p| p.clone().modulus()).fold(f64::INFINITY, f64::min);
        if pivot_min == 0.0 || !pivot_min.is_finite() {
            return Err(Error::Singular("zero pivot in LU factorization".into()));
        }
        let l = lu.l();
        Ok(Self { lu, l, u, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn solve(&self, b: &DVector<T>) -> Result<DVector<T>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }

    pub fn solve_matrix(&self, b: &DMatrix<T>) -> Result<DMatrix<T>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &DVector<T>) -> Result<DVector<T>> {
        // A^H = U^H L^H P, so U^H y = b, L^H z = y, x = P^T z
        let mut x = b.clone();
        if !self.u.ad_solve_upper_triangular_mut(&mut x) || !self.l.ad_solve_lower_triangular_mut(&mut x) {
            return Err(Error::Singular("adjoint triangular solve failed".into()));
        }
        self.lu.p().inv_permute_rows(&mut x);
        Ok(x)
    }

    /// Estimate of `||A||_1 ||A^{-1}||_1` (Hager's method with Higham's extra test vector).
    pub fn cond1_estimate(&self) -> Result<f64> {
        Ok(self.norm1 * self.inverse_norm1_estimate()?)
    }

    fn inverse_norm1_estimate(&self) -> Result<f64> {
        let n = self.dim();
        let nf = n as f64;
        let mut x = DVector::from_element(n, T::from_real(1.0 / nf));
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x)?;
            est = vec_norm1(&y);
            let xi = y.map(|v| {
                let m = v.clone().modulus();
                if m == 0.0 {
                    T::one()
                } else {
                    v.unscale(m)
                }
            });
            let z = self.solve_adjoint(&xi)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.clone().modulus()))
                .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let ztx = z.dotc(&x).real();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = DVector::zeros(n);
            x[j] = T::one();
        }
        let alt = DVector::from_fn(n, |i, _| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            T::from_real(s * (1.0 + i as f64 / (nf - 1.0).max(1.0)))
        });
        let alt_est = 2.0 * vec_norm1(&self.solve(&alt)?) / (3.0 * nf);
        Ok(est.max(alt_est))
    }
}

pub fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn vec_norm1<T: ComplexField<RealField = f64>>(v: &DVector<T>) -> f64 {
    v.iter().map(|x| x.clone().modulus()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn sample_real() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, -1.0, 4.0])
    }

    #[test]
    fn solves_match_matrix_products() {
        let a = sample_real();
        let lu = DenseLu::new(a.clone()).unwrap();
        let b = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let x = lu.solve(&b).unwrap();
        assert!((&a * &x - &b).norm() < 1e-14);
        let y = lu.solve_adjoint(&b).unwrap();
        assert!((a.transpose() * &y - &b).norm() < 1e-14);
    }

    #[test]
    fn complex_adjoint_solve() {
        let a = DMatrix::from_fn(4, 4, |i, j| {
            Complex64::new((i + 2 * j) as f64 % 5.0 + if i == j { 4.0 } else { 0.0 }, (i as f64 - j as f64) * 0.3)
        });
        let lu = DenseLu::new(a.clone()).unwrap();
        let b = DVector::from_fn(4, |i, _| Complex64::new(i as f64, 1.0));
        let y = lu.solve_adjoint(&b).unwrap();
        assert!((a.adjoint() * &y - &b).norm() < 1e-13);
    }

    #[test]
    fn condition_estimate_is_exact_for_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-3, 10.0]));
        let c = DenseLu::new(a).unwrap().cond1_estimate().unwrap();
        assert!((c - 1e4).abs() < 1e-8);
    }

    #[test]
    fn condition_estimate_bounds_true_value() {
        let a = sample_real();
        let inv = a.clone().try_inverse().unwrap();
        let exact = norm1(&a) * norm1(&inv);
        let est = DenseLu::new(a).unwrap().cond1_estimate().unwrap();
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= exact / 3.0);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(DenseLu::new(a), Err(Error::Singular(_))));
    }
}
