//! q-Pochhammer products, the entire function `F_q` and the polynomials `P_n`.
//!
//! ```text
//! F_q(z) = ∏_{k>=1} (1 - q^k z) = 1 + Σ_{k>=1} q^{k(k+1)/2} / ((q-1)···(q^k-1)) z^k
//! P_n(z) = 1 + Σ_{k=1}^{n} n!/(n-k)! · q^{k(k+1)/2} / ((q-1)···(q^k-1)) z^k
//! ```
//!
//! The series form alternates for `z > 0` with terms far larger than the sum
//! (at `q = 0.9, z = 10` the largest term is ~8e15 while `F_q` is ~-2e-3), so
//! its terms are generated and summed in double-double arithmetic.

use serde::Serialize;
use twofloat::TwoFloat;

use crate::eigensystem::AlphaParam;
use crate::precision::dd_div;
use crate::sum::ExtendedSum;
use crate::{Error, Result};

/// Hard cap on the degree of `P_n`: `n!` overflows `f64` above 170.
pub const PN_HARD_CAP: usize = 170;
/// Above this degree the coefficients of `P_n` span more than 15 decades.
pub const PN_SOFT_CAP: usize = 60;

/// The base `q` of a q-series, `|q| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q.abs() < 1.0 {
            Ok(QParam(q))
        } else {
            Err(Error::InvalidQ(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<AlphaParam> for QParam {
    fn from(alpha: AlphaParam) -> Self {
        QParam(alpha.value())
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// `∏_{j=1}^{k} (1 - q^j)`; the empty product is 1.
pub fn qpoch(q: QParam, k: usize) -> f64 {
    let mut qj = 1.0;
    let mut prod = 1.0;
    for _ in 0..k {
        qj *= q.0;
        prod *= 1.0 - qj;
    }
    prod
}

/// Truncated product `∏_{k=1}^{K} (1 - q^k z)`.
///
/// `K` is the first index at which the logarithm of the neglected tail is
/// bounded by `tol`:
/// `|ln ∏_{k>K}(1 - q^k z)| <= |q^{K+1} z| / ((1-|q|)(1-|q^{K+1} z|))`.
pub fn fq_product(q: QParam, z: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let q = q.0;
    let mut prod = 1.0;
    let mut qk = 1.0;
    loop {
        qk *= q;
        prod *= 1.0 - qk * z;
        if prod == 0.0 {
            return Ok(0.0);
        }
        let next = (qk * q * z).abs();
        if next < 1.0 && next / ((1.0 - q.abs()) * (1.0 - next)) < tol {
            return Ok(prod);
        }
    }
}

/// Partial sum of the power series of `F_q`.
///
/// Terms follow `t_k = t_{k-1} · q^k z / (q^k - 1)` in double-double; once the
/// term ratio is below 1/2 the tail is bounded by the current term, and the
/// sum stops when that bound drops below `tol · (1 + |sum|)`.
pub fn fq_series(q: QParam, z: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let q = q.0;
    let mut acc = ExtendedSum::new();
    acc.add(TwoFloat::from(1.0));
    let mut term = TwoFloat::from(1.0);
    let mut qk = TwoFloat::from(1.0);
    loop {
        qk *= q;
        term = dd_div(term * qk * z, qk - 1.0);
        acc.add(term);
        if term.hi() == 0.0 {
            break;
        }
        let next_q = (qk.hi() * q).abs();
        let ratio = next_q * z.abs() / (1.0 - next_q);
        if ratio < 0.5 {
            let tail = term.hi().abs() * ratio / (1.0 - ratio);
            let sum = acc.value();
            if tail <= tol * (1.0 + (sum.hi() + sum.lo()).abs()) {
                break;
            }
        }
    }
    let sum = acc.value();
    Ok(sum.hi() + sum.lo())
}

/// The `k`-th power-series coefficient of `F_q`.
pub fn fq_series_coeff(q: QParam, k: usize) -> f64 {
    let q = q.0;
    let mut qj = 1.0;
    let mut c = 1.0;
    for _ in 0..k {
        qj *= q;
        c *= qj / (qj - 1.0);
    }
    c
}

/// `F_alpha(alpha^{-n-1})`, which vanishes because the factor `k = n+1` of the
/// product is `1 - alpha^{n+1} alpha^{-n-1} = 0`.
pub fn fq_root_check(alpha: AlphaParam, n: usize) -> f64 {
    let a = alpha.value();
    let z = a.powi(-(n as i32 + 1));
    // tol is a fixed valid constant
    fq_product(QParam(a), z, 1e-17).expect("positive tolerance")
}

/// Coefficients `a_0..a_n` of `P_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PnPolynomial {
    pub n: usize,
    pub q: QParam,
    pub coeffs: Vec<f64>,
    /// `(sign, ln|a_k|)`, immune to the underflow of `coeffs` for small `q`.
    #[serde(skip)]
    pub log_terms: Vec<(f64, f64)>,
}

pub fn pn_coeffs(q: QParam, n: usize) -> Result<PnPolynomial> {
    if n > PN_HARD_CAP {
        return Err(Error::DegreeTooLarge { n, cap: PN_HARD_CAP });
    }
    let qv = q.0;
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut log_terms = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    log_terms.push((1.0, 0.0));
    let (mut a, mut sign, mut log_mag) = (1.0_f64, 1.0_f64, 0.0_f64);
    let mut qk = 1.0;
    for k in 1..=n {
        qk *= qv;
        let step = (n - k + 1) as f64 * qk / (qk - 1.0);
        a *= step;
        sign *= step.signum();
        log_mag += ((n - k + 1) as f64).ln() + qk.abs().ln() - (1.0 - qk).ln();
        coeffs.push(a);
        log_terms.push((sign, log_mag));
    }
    Ok(PnPolynomial { n, q, coeffs, log_terms })
}

impl PnPolynomial {
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Horner evaluation in `f64`.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n > PN_SOFT_CAP {
            out.push(format!(
                "P_{} coefficients span more than 15 decades; expect degraded root accuracy",
                self.n
            ));
        }
        if self.coeffs.iter().any(|c| *c == 0.0 || c.is_subnormal()) && self.q.0 != 0.0 {
            out.push(format!("P_{} has coefficients below the f64 range; use log_terms", self.n));
        }
        out
    }
}

/// Both sides of the derivative relation between consecutive `P_n`.
#[derive(Debug, Clone, Serialize)]
pub struct AppellDiagnostic {
    pub n: usize,
    pub points: Vec<f64>,
    /// `max |(x^n P_{n+1}(1/x))' - n x^{n-1} P_n(1/x)|`, relative.
    pub literal_max_discrepancy: f64,
    /// `max |(x^{n+1} P_{n+1}(1/x))' - (n+1) x^n P_n(1/x)|`, relative.
    pub shifted_max_discrepancy: f64,
}

/// Evaluates the relation `(x^n P_{n+1}(1/x))' = n x^{n-1} P_n(1/x)` as printed
/// alongside the degree-consistent form with `n+1`, at the given points `x > 0`.
///
/// Only reports; nothing downstream relies on either identity.
pub fn appell_diagnostic(q: QParam, n: usize, points: &[f64]) -> Result<AppellDiagnostic> {
    let p_next = pn_coeffs(q, n + 1)?;
    let p = pn_coeffs(q, n)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut literal = 0.0_f64;
    let mut shifted = 0.0_f64;
    for &x in points {
        if !(x > 0.0) {
            return Err(Error::InvalidArgument(format!("sample point {x} must be positive")));
        }
        let nf = n as f64;
        let mut lhs_lit = 0.0;
        let mut lhs_shift = 0.0;
        for (k, &a) in p_next.coeffs.iter().enumerate() {
            let kf = k as f64;
            lhs_lit += a * (nf - kf) * x.powf(nf - kf - 1.0);
            lhs_shift += a * (nf + 1.0 - kf) * x.powf(nf - kf);
        }
        let mut rhs_lit = 0.0;
        let mut rhs_shift = 0.0;
        for (k, &a) in p.coeffs.iter().enumerate() {
            let kf = k as f64;
            rhs_lit += nf * a * x.powf(nf - 1.0 - kf);
            rhs_shift += (nf + 1.0) * a * x.powf(nf - kf);
        }
        literal = literal.max(rel(lhs_lit, rhs_lit));
        shifted = shifted.max(rel(lhs_shift, rhs_shift));
    }
    Ok(AppellDiagnostic {
        n,
        points: points.to_vec(),
        literal_max_discrepancy: literal,
        shifted_max_discrepancy: shifted,
    })
}
