//! Dense eigenvalues of collocation matrices.
//!
//! Triangular matrices (every `phi(x) <= x` collocation is one) are read off
//! the diagonal exactly; the dense QR eigensolver would otherwise report the
//! O(eps^{1/N}) pseudospectral halo of a near-nilpotent matrix as its spectrum.
//! Everything else goes to faer's real Schur-based solver.

use faer::complex::Complex;
use faer::Mat;
use serde::Serialize;

use crate::discretize::VMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<Complex<f64>> for Eigenvalue {
    fn from(c: Complex<f64>) -> Self {
        Eigenvalue { re: c.re, im: c.im }
    }
}

pub fn is_lower_triangular(a: &Mat<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| ((i + 1)..n).all(|j| a[(i, j)] == 0.0))
}

/// All eigenvalues, sorted by decreasing modulus (ties by real part).
pub fn dense_eigenvalues(a: &Mat<f64>) -> Result<Vec<Eigenvalue>> {
    if a.nrows() != a.ncols() {
        return Err(Error::SizeMismatch(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
    }
    let mut values: Vec<Eigenvalue> = if is_lower_triangular(a) {
        (0..a.nrows()).map(|i| Eigenvalue { re: a[(i, i)], im: 0.0 }).collect()
    } else {
        a.eigenvalues()
            .map_err(|_| Error::EigenNoConvergence)?
            .into_iter()
            .map(Eigenvalue::from)
            .collect()
    };
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::EigenNoConvergence);
    }
    values.sort_by(|x, y| y.modulus().total_cmp(&x.modulus()).then(y.re.total_cmp(&x.re)));
    Ok(values)
}

/// The `k` largest-modulus eigenvalues of the matrix.
pub fn spectrum(matrix: &VMatrix, k: usize) -> Result<Vec<Eigenvalue>> {
    let n = matrix.size();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
    }
    let mut all = dense_eigenvalues(&matrix.entries)?;
    all.truncate(k);
    Ok(all)
}

pub fn spectral_radius(a: &Mat<f64>) -> Result<f64> {
    Ok(dense_eigenvalues(a)?.first().map(|v| v.modulus()).unwrap_or(0.0))
}

/// `||A U - U S||_F / (||A||_F ||U||_F)` for the full eigendecomposition.
pub fn backward_error(a: &Mat<f64>) -> Result<f64> {
    let evd = a.eigen().map_err(|_| Error::EigenNoConvergence)?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = a.nrows();
    let mut num = 0.0;
    let mut u_norm = 0.0;
    for j in 0..n {
        for i in 0..n {
            let mut au = Complex::new(0.0, 0.0);
            for k in 0..n {
                au += u[(k, j)] * a[(i, k)];
            }
            let r = au - u[(i, j)] * s[j];
            num += r.norm_sqr();
            u_norm += u[(i, j)].norm_sqr();
        }
    }
    let a_norm: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)] * a[(i, j)])
        .sum::<f64>()
        .sqrt();
    Ok(num.sqrt() / (a_norm * u_norm.sqrt()))
}

/// Parlett–Reinsch balancing by powers of two, in place. Returns the scaling
/// `d` with `A_balanced = D^{-1} A D`.
pub fn balance(a: &mut Mat<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut d = vec![1.0; n];
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_shortcut_is_exact() {
        let a = Mat::from_fn(4, 4, |i, j| if j <= i { (i + 2 * j + 1) as f64 } else { 0.0 });
        let ev = dense_eigenvalues(&a).unwrap();
        let moduli: Vec<f64> = ev.iter().map(|v| v.modulus()).collect();
        assert_eq!(moduli, vec![10.0, 7.0, 4.0, 1.0]);
    }

    #[test]
    fn general_matrix_eigenvalues() {
        // rotation-scaling block plus a real eigenvalue
        let mut a = Mat::zeros(3, 3);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = -2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 1.0;
        a[(2, 2)] = 0.5;
        let ev = dense_eigenvalues(&a).unwrap();
        assert!((ev[0].modulus() - 5f64.sqrt()).abs() < 1e-14);
        assert!((ev[0].im.abs() - 2.0).abs() < 1e-14);
        assert!((ev[2].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn backward_error_is_small() {
        let n = 40;
        let a = Mat::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.4);
        let be = backward_error(&a).unwrap();
        assert!(be < 10.0 * n as f64 * f64::EPSILON, "{be:e}");
    }

    #[test]
    fn balancing_preserves_spectrum() {
        let mut a = Mat::from_fn(3, 3, |i, j| 10f64.powi(3 * (j as i32 - i as i32)) * (1.0 + i as f64));
        let before = dense_eigenvalues(&a).unwrap();
        let d = balance(&mut a);
        assert!(d.iter().all(|v| v.log2().fract() == 0.0));
        let after = dense_eigenvalues(&a).unwrap();
        for (x, y) in before.iter().zip(&after) {
            assert!((x.modulus() - y.modulus()).abs() < 1e-9 * x.modulus().max(1.0));
        }
    }
}
