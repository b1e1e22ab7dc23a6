//! Graded, adaptive Gauss–Legendre panel quadrature on `[0, 1]`.
//!
//! The integrands in this crate behave like `t^beta ln^m t` near 0: integrable,
//! with unbounded derivatives. Panels with breakpoints `(j / n_panels)^gamma`
//! cluster there; the panels with the largest halving discrepancy are then
//! bisected until the summed discrepancy is below `abs_tol` (or below the
//! roundoff floor `64 eps ∫|f|`).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::sum::NeumaierSum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre points per panel.
    pub panel_order: usize,
    /// Breakpoint grading `gamma >= 1`.
    pub grading_exponent: f64,
    pub n_panels: usize,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_order: 16,
            grading_exponent: 3.0,
            n_panels: 64,
            abs_tol: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panel_order < 2 {
            return Err(Error::InvalidQuadrature(format!(
                "panel order {} below 2",
                self.panel_order
            )));
        }
        if !(self.grading_exponent >= 1.0 && self.grading_exponent.is_finite()) {
            return Err(Error::InvalidQuadrature(format!(
                "grading exponent {} below 1",
                self.grading_exponent
            )));
        }
        if self.n_panels == 0 {
            return Err(Error::InvalidQuadrature("no panels".into()));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.abs_tol));
        }
        Ok(())
    }

    /// `(j / n_panels)^gamma` for `j = 0..=n_panels`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let n = self.n_panels as f64;
        (0..=self.n_panels)
            .map(|j| (j as f64 / n).powf(self.grading_exponent))
            .collect()
    }
}

/// Result of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the panel `|I_halves - I_whole|`; pessimistic.
    pub error: f64,
    pub panels: usize,
}

/// Panel budget per call to [`Integrator::integrate`].
pub const PANEL_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, Copy)]
struct Leaf {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Leaf {}

impl PartialOrd for Leaf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Leaf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// A [`QuadratureSpec`] with its rule tabulated once.
#[derive(Debug, Clone)]
pub struct Integrator {
    spec: QuadratureSpec,
    rule: Vec<(f64, f64)>,
    breaks: Vec<f64>,
}

impl Integrator {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        // panel_order >= 2 checked above
        let gl = GaussLegendre::new(NonZeroUsize::new(spec.panel_order).unwrap());
        Ok(Self {
            spec,
            rule: gl.as_node_weight_pairs().to_vec(),
            breaks: spec.breakpoints(),
        })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> (f64, f64) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = NeumaierSum::new();
        for &(x, w) in &self.rule {
            acc.add(w * half * f(mid + half * x));
        }
        (acc.value(), acc.abs_sum())
    }

    fn leaf<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> Leaf {
        let mid = 0.5 * (lo + hi);
        let (whole, _) = self.panel(f, lo, hi);
        let (left, left_abs) = self.panel(f, lo, mid);
        let (right, right_abs) = self.panel(f, mid, hi);
        let value = left + right;
        Leaf {
            lo,
            hi,
            value,
            error: (value - whole).abs(),
            abs: left_abs + right_abs,
        }
    }

    /// `∫_a^b f`. The graded breakpoints inside `(a, b)` seed the panels, so
    /// both limits always sit on a panel boundary.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite limits [{a}, {b}]")));
        }
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
                panels: 0,
            });
        }
        if a > b {
            let r = self.integrate(f, b, a)?;
            return Ok(Integral { value: -r.value, ..r });
        }

        let mut cuts = vec![a];
        cuts.extend(self.breaks.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);

        let mut heap: BinaryHeap<Leaf> = cuts.windows(2).map(|w| self.leaf(&f, w[0], w[1])).collect();
        let floor = 64.0 * f64::EPSILON;
        loop {
            let (error, abs): (f64, f64) = heap.iter().fold((0.0, 0.0), |(e, s), l| (e + l.error, s + l.abs));
            if error <= self.spec.abs_tol.max(floor * abs) {
                break;
            }
            if heap.len() >= PANEL_BUDGET {
                return Err(Error::QuadratureBudget {
                    a,
                    b,
                    budget: PANEL_BUDGET,
                });
            }
            // refine the worst panels until the total drops below target
            let target = 0.5 * error;
            let mut removed = 0.0;
            while removed < target {
                let Some(worst) = heap.pop() else { break };
                let mid = 0.5 * (worst.lo + worst.hi);
                if mid <= worst.lo || mid >= worst.hi {
                    // cannot split further: keep the estimate, drop its error
                    heap.push(Leaf { error: 0.0, ..worst });
                    removed += worst.error;
                    continue;
                }
                removed += worst.error;
                heap.push(self.leaf(&f, worst.lo, mid));
                heap.push(self.leaf(&f, mid, worst.hi));
            }
        }
        let error = heap.iter().map(|l| l.error).sum();
        let panels = heap.len();
        let value: NeumaierSum = heap.iter().map(|l| l.value).collect();
        let value = value.value();
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("integrand not finite on [{a}, {b}]")));
        }
        Ok(Integral { value, error, panels })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints_are_graded() {
        let spec = QuadratureSpec::default();
        let b = spec.breakpoints();
        assert_eq!(b.len(), 65);
        assert_eq!(b[0], 0.0);
        assert_eq!(b[64], 1.0);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert!((b[1] - 1.0 / 64f64.powi(3)).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_specs() {
        let d = QuadratureSpec::default();
        assert!(Integrator::new(QuadratureSpec { panel_order: 1, ..d }).is_err());
        assert!(Integrator::new(QuadratureSpec { grading_exponent: 0.5, ..d }).is_err());
        assert!(Integrator::new(QuadratureSpec { n_panels: 0, ..d }).is_err());
        assert!(Integrator::new(d.with_tol(0.0)).is_err());
    }

    #[test]
    fn polynomials_and_orientation() {
        let q = Integrator::new(QuadratureSpec::default()).unwrap();
        let r = q.integrate(|t| t * t, 0.0, 0.7).unwrap();
        assert!((r.value - 0.7f64.powi(3) / 3.0).abs() < 1e-15);
        let back = q.integrate(|t| t * t, 0.7, 0.0).unwrap();
        assert_eq!(back.value, -r.value);
        assert_eq!(q.integrate(|t| t, 0.3, 0.3).unwrap().value, 0.0);
    }

    #[test]
    fn endpoint_singularity() {
        let q = Integrator::new(QuadratureSpec::default()).unwrap();
        // ∫_0^1 t^{1/3} ln^4 t dt = 4! / (4/3)^5
        let r = q.integrate(|t: f64| if t > 0.0 { t.cbrt() * t.ln().powi(4) } else { 0.0 }, 0.0, 1.0).unwrap();
        let want = 24.0 / (4.0f64 / 3.0).powi(5);
        assert!((r.value - want).abs() < 1e-11, "{} vs {want}", r.value);
        // ∫_0^1 t^{-1/2} = 2
        let r = q.integrate(|t: f64| if t > 0.0 { 1.0 / t.sqrt() } else { 0.0 }, 0.0, 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let q = Integrator::new(QuadratureSpec::default()).unwrap();
        // ~1.6e8 oscillations cannot be resolved within the panel budget
        let err = q.integrate(|t: f64| (1e9 * t).sin(), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::QuadratureBudget { .. }), "{err}");
    }
}
