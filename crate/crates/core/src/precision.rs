use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

/// Arithmetic used for the cancellation-prone series (`g_n`, `S_1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// Double-double accumulation, about 32 significant digits.
    Extended,
}

impl Precision {
    /// Largest tolerated ratio `max |term| / |expected result|`.
    pub fn cancellation_limit(self) -> f64 {
        match self {
            Precision::Double => 1e12,
            Precision::Extended => 1e24,
        }
    }

    /// Unit roundoff used in a-priori error bounds.
    pub fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON / 2.0,
            // a few bits below the nominal 2^-106 for exp/ln round-off
            Precision::Extended => 1e-29,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        })
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision '{other}' (expected double or extended)")),
        }
    }
}

// twofloat's own exp is only good to ~1e-17 relative, and its TwoFloat /
// TwoFloat division computes the reciprocal residual without an fma, which
// leaves it at double accuracy. These replacements reach ~1e-30.

/// `a / b` in double-double by three rounds of long division.
pub(crate) fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

const EXP_HALVINGS: i32 = 4;

/// `e^x` in double-double: reduce by `ln 2`, halve four times, Taylor, square back.
pub(crate) fn dd_exp(x: TwoFloat) -> TwoFloat {
    if x.hi() < -745.0 {
        return TwoFloat::from(0.0);
    }
    if x.hi() > 709.0 {
        return TwoFloat::from(f64::INFINITY);
    }
    let k = (x.hi() / std::f64::consts::LN_2).round();
    let r = (x - twofloat::consts::LN_2 * k) / 2f64.powi(EXP_HALVINGS);
    // |r| < 0.022, so 16 Taylor terms leave < 1e-40; Horner from the top
    let mut sum = TwoFloat::from(1.0);
    for i in (1..=16).rev() {
        sum = sum * r / i as f64 + 1.0;
    }
    for _ in 0..EXP_HALVINGS {
        sum = sum * sum;
    }
    // split the scaling so 2^k never overflows on its own
    let k = k as i32;
    let (k1, k2) = (k / 2, k - k / 2);
    sum * 2f64.powi(k1) * 2f64.powi(k2)
}

/// Natural logarithm of a positive double, in double-double (two Newton steps on `dd_exp`).
pub(crate) fn dd_ln(x: f64) -> TwoFloat {
    debug_assert!(x > 0.0);
    if x == 1.0 {
        return TwoFloat::from(0.0);
    }
    let mut y = TwoFloat::from(x.ln());
    for _ in 0..2 {
        y = y + TwoFloat::from(x) * dd_exp(-y) - 1.0;
    }
    y
}

/// `x^mu` for `x` in `(0, 1]`, in double-double.
pub(crate) fn dd_pow(x: f64, ln_x: TwoFloat, mu: TwoFloat) -> TwoFloat {
    if x == 1.0 || mu.hi() == 0.0 {
        return TwoFloat::from(1.0);
    }
    dd_exp(ln_x * mu)
}
