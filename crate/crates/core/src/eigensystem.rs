//! Closed-form eigenvalues and eigenfunctions of `V_alpha` and its adjoint.
//!
//! With 1-based `n` and `m = n - 1`:
//!
//! ```text
//! lambda_n = (1 - alpha) alpha^m
//! f_n(x)   = x^beta (ln^m x + Σ_{k=1}^{m} C_{m-k} ln^{m-k} x),   beta = alpha / (1 - alpha)
//! C_{m-k}  = m!/(m-k)! · alpha^{k(k-1)/2} (1-alpha)^k / ((1-alpha)···(1-alpha^k))
//! g_n(x)   = 1 + Σ_{j>=1} (-1)^j alpha^{j(j-1-2m)/2} / ((1-alpha)···(1-alpha^j)) · x^{mu_j}
//! mu_j     = (1 - alpha^j) / ((1 - alpha) alpha^j)
//! ```
//!
//! `V_alpha f_n = lambda_n f_n` and `V_alpha* g_n = lambda_n g_n`. No
//! normalisation is applied: `f_n` has leading log-coefficient 1 and `g_n` has
//! constant term 1.
//!
//! The terms of `g_n` peak near `j = m + 1` at roughly `alpha^{-m(m+1)/2}` while
//! `g_n` itself is O(1), so evaluation is gated by a cancellation budget, see
//! [`Precision`].

use serde::Serialize;
use twofloat::TwoFloat;

use crate::precision::{dd_div, dd_ln, dd_pow};
use crate::qseries::{qpoch, QParam, PN_HARD_CAP};
use crate::sum::{ExtendedSum, NeumaierSum};
use crate::{Error, Precision, Result};

/// Exponent `alpha` of the power map, `0 < alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(AlphaParam(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Leading exponent `alpha / (1 - alpha)` of every `f_n`.
    pub fn beta(self) -> f64 {
        self.0 / (1.0 - self.0)
    }
}

/// `lambda_n = (1 - alpha) alpha^{n-1}`.
pub fn eigenvalue(alpha: AlphaParam, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    Ok((1.0 - alpha.0) * alpha.0.powi(n as i32 - 1))
}

/// Müntz exponent `mu_j = (1 - alpha^j) / ((1 - alpha) alpha^j)`; `mu_0 = 0`.
pub fn muntz_exponent(alpha: AlphaParam, j: usize) -> f64 {
    let aj = alpha.0.powi(j as i32);
    (1.0 - aj) / ((1.0 - alpha.0) * aj)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FEigenfunction {
    pub n: usize,
    pub alpha: AlphaParam,
    pub lambda: f64,
    /// `[C_{m-1}, C_{m-2}, ..., C_0]`: the coefficient of `ln^{m-k} x` at index `k-1`.
    pub coeffs: Vec<f64>,
    pub beta: f64,
}

pub fn f_coeffs(alpha: AlphaParam, n: usize) -> Result<FEigenfunction> {
    let lambda = eigenvalue(alpha, n)?;
    let m = n - 1;
    if m > PN_HARD_CAP {
        return Err(Error::DegreeTooLarge { n: m, cap: PN_HARD_CAP });
    }
    let a = alpha.0;
    let mut coeffs = Vec::with_capacity(m);
    let mut c = 1.0;
    let mut ak = 1.0;
    for k in 1..=m {
        // C_{m-k} / C_{m-k+1} = (m-k+1) alpha^{k-1} (1-alpha) / (1-alpha^k)
        let prev_ak = ak;
        ak *= a;
        c *= (m - k + 1) as f64 * prev_ak * (1.0 - a) / (1.0 - ak);
        coeffs.push(c);
    }
    Ok(FEigenfunction {
        n,
        alpha,
        lambda,
        coeffs,
        beta: alpha.beta(),
    })
}

impl FEigenfunction {
    /// The bracket `ln^m x + ...` as a polynomial in `L = ln x`, by Horner.
    pub fn bracket(&self, log_x: f64) -> f64 {
        self.coeffs.iter().fold(1.0, |acc, &c| acc * log_x + c)
    }

    /// `Σ |coefficient| |L|^k`, the scale against which bracket residuals are measured.
    pub fn bracket_scale(&self, log_x: f64) -> f64 {
        let l = log_x.abs();
        self.coeffs.iter().fold(1.0, |acc, &c| acc * l + c.abs())
    }

    /// Unchecked evaluation for `x` in `[0, 1]`.
    pub(crate) fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x == 1.0 {
            self.coeffs.last().copied().unwrap_or(1.0)
        } else {
            x.powf(self.beta) * self.bracket(x.ln())
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.value(x))
    }
}

pub fn f_eval(f: &FEigenfunction, x: f64) -> Result<f64> {
    f.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GEigenfunction {
    pub n: usize,
    pub alpha: AlphaParam,
    pub lambda: f64,
    pub terms: Vec<GTerm>,
    /// Bound on the neglected tail, uniform on `[0, 1]`.
    pub truncation_error_bound: f64,
    /// `max |coefficient|`, i.e. `max |term|` over `[0, 1]` against an O(1) result.
    pub cancellation_ratio: f64,
    pub precision: Precision,
    #[serde(skip)]
    extended: Vec<(TwoFloat, TwoFloat)>,
}

/// A value of `g_n` together with an a-priori bound on its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GValue {
    pub value: f64,
    pub error_bound: f64,
}

const G_MAX_TERMS: usize = 4096;

/// Terms of `g_n` up to the point where the tail is below `tol`.
///
/// Fails with [`Error::PrecisionBudget`] when the largest term exceeds the
/// cancellation budget of `precision`.
pub fn g_terms(alpha: AlphaParam, n: usize, tol: f64, precision: Precision) -> Result<GEigenfunction> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let lambda = eigenvalue(alpha, n)?;
    let m = n - 1;
    let a = alpha.0;

    // magnitudes first, in log space, so the budget check cannot overflow
    let mut log_c = 0.0_f64;
    let mut log_max = 0.0_f64;
    let mut aj = 1.0_f64;
    let mut j = 0usize;
    let mut tail;
    loop {
        j += 1;
        aj *= a;
        log_c += (j as f64 - 1.0 - m as f64) * a.ln() - (1.0 - aj).ln();
        log_max = log_max.max(log_c);
        // next ratio alpha^{j-m} / (1 - alpha^{j+1}), decreasing once j > m
        let r = a.powi(j as i32 - m as i32) / (1.0 - aj * a);
        tail = log_c.exp() * r / (1.0 - r);
        if (j > m + 1 && r < 0.5 && tail < tol) || j >= G_MAX_TERMS {
            break;
        }
    }
    let count = j;
    let ratio = log_max.exp();
    if ratio > precision.cancellation_limit() || !ratio.is_finite() {
        return Err(Error::PrecisionBudget {
            ratio,
            limit: precision.cancellation_limit(),
            precision,
        });
    }
    if j >= G_MAX_TERMS && tail >= tol {
        return Err(Error::InvalidArgument(format!(
            "g_{n} series did not reach tol {tol:e} within {G_MAX_TERMS} terms"
        )));
    }

    let mut terms = Vec::with_capacity(count + 1);
    terms.push(GTerm {
        coefficient: 1.0,
        exponent: 0.0,
    });
    let mut extended = Vec::new();
    // c_j = -c_{j-1} alpha^{j-1-m} / (1 - alpha^j)
    match precision {
        Precision::Double => {
            let a_m = a.powi(m as i32);
            let mut c = 1.0;
            let mut aj = 1.0;
            for _ in 1..=count {
                let prev = aj;
                aj *= a;
                c *= -(prev / a_m) / (1.0 - aj);
                terms.push(GTerm {
                    coefficient: c,
                    exponent: (1.0 - aj) / ((1.0 - a) * aj),
                });
            }
        }
        Precision::Extended => {
            extended.push((TwoFloat::from(1.0), TwoFloat::from(0.0)));
            let a_m = dd_powi(a, m);
            let mut c = TwoFloat::from(1.0);
            let mut aj = TwoFloat::from(1.0);
            for _ in 1..=count {
                let prev = aj;
                aj *= a;
                c = -dd_div(dd_div(c * prev, a_m), 1.0 - aj);
                let mu = dd_div(1.0 - aj, aj * (1.0 - a));
                extended.push((c, mu));
                terms.push(GTerm {
                    coefficient: c.hi() + c.lo(),
                    exponent: mu.hi() + mu.lo(),
                });
            }
        }
    }

    Ok(GEigenfunction {
        n,
        alpha,
        lambda,
        terms,
        truncation_error_bound: tail,
        cancellation_ratio: ratio,
        precision,
        extended,
    })
}

fn dd_powi(a: f64, mut k: usize) -> TwoFloat {
    let mut base = TwoFloat::from(a);
    let mut acc = TwoFloat::from(1.0);
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}

impl GEigenfunction {
    /// Evaluation with error bound for `x` in `[0, 1]`.
    pub fn eval(&self, x: f64) -> Result<GValue> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.value_with_bound(x))
    }

    fn value_with_bound(&self, x: f64) -> GValue {
        if x == 0.0 {
            return GValue {
                value: 1.0,
                error_bound: 0.0,
            };
        }
        let ln_x = x.ln().abs();
        match self.precision {
            Precision::Double => {
                let mut acc = NeumaierSum::new();
                let mut weighted = 0.0;
                for t in &self.terms {
                    let v = t.coefficient * x.powf(t.exponent);
                    acc.add(v);
                    // powf error grows with |mu ln x|
                    weighted += v.abs() * (4.0 + t.exponent * ln_x);
                }
                GValue {
                    value: acc.value(),
                    error_bound: self.truncation_error_bound
                        + Precision::Double.unit_roundoff() * (weighted + 2.0 * acc.abs_sum()),
                }
            }
            Precision::Extended => {
                let v = self.value_dd(x);
                GValue {
                    value: v.0,
                    error_bound: self.truncation_error_bound
                        + Precision::Extended.unit_roundoff() * v.1 * (4.0 + self.max_exponent() * ln_x)
                        + f64::EPSILON * v.0.abs(),
                }
            }
        }
    }

    fn max_exponent(&self) -> f64 {
        self.terms.last().map(|t| t.exponent).unwrap_or(0.0)
    }

    fn value_dd(&self, x: f64) -> (f64, f64) {
        let ln_x = dd_ln(x);
        let mut acc = ExtendedSum::new();
        for &(c, mu) in &self.extended {
            acc.add(c * dd_pow(x, ln_x, mu));
        }
        let v = acc.value();
        (v.hi() + v.lo(), acc.abs_sum())
    }

    /// Unchecked evaluation for `x` in `[0, 1]`.
    pub(crate) fn value(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 1.0;
        }
        match self.precision {
            Precision::Double => {
                let mut acc = NeumaierSum::new();
                for t in &self.terms {
                    acc.add(t.coefficient * x.powf(t.exponent));
                }
                acc.value()
            }
            Precision::Extended => self.value_dd(x).0,
        }
    }
}

pub fn g_eval(g: &GEigenfunction, x: f64) -> Result<GValue> {
    g.eval(x)
}

/// Partial sum `S_1 = Σ_{k>=1} (-1)^{k-1} alpha^{k(k-1-2n)/2} / ((1-alpha)···(1-alpha^k))`.
///
/// `n` here is 0-based, matching `g_{n+1}`: `S_1 = 1 - g_{n+1}(1)`, and the
/// identity `S_1 = 1 - F_alpha(alpha^{-n-1}) = 1` holds because the product
/// has a vanishing factor.
pub fn s1_check(alpha: AlphaParam, n: usize, precision: Precision) -> Result<f64> {
    let g = g_terms(alpha, n + 1, 1e-20, precision)?;
    Ok(match precision {
        Precision::Double => {
            let acc: NeumaierSum = g.terms.iter().skip(1).map(|t| -t.coefficient).collect();
            acc.value()
        }
        Precision::Extended => {
            let mut acc = ExtendedSum::new();
            for &(c, _) in g.extended.iter().skip(1) {
                acc.add(-c);
            }
            let v = acc.value();
            v.hi() + v.lo()
        }
    })
}

/// `(1 - alpha)···(1 - alpha^k)` for an [`AlphaParam`].
pub fn alpha_pochhammer(alpha: AlphaParam, k: usize) -> f64 {
    qpoch(QParam::from(alpha), k)
}
