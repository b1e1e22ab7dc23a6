//! Application of `V_phi` and `V_alpha*` by quadrature, and L² eigen-residuals.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensystem::{f_coeffs, g_terms, AlphaParam};
use crate::quadrature::{Integrator, QuadratureSpec};
use crate::{Error, Precision, Result};

/// Monotone piecewise-linear self-map of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneTable {
    /// `xs` must run strictly increasing from 0 to 1; `ys` non-decreasing in `[0, 1]`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidMap("table needs at least two (x, y) pairs of equal length".into()));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(Error::InvalidMap("table abscissae must start at 0 and end at 1".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMap("table abscissae must be strictly increasing".into()));
        }
        if ys.windows(2).any(|w| !(w[1] >= w[0])) || ys.iter().any(|y| !(0.0..=1.0).contains(y)) {
            return Err(Error::InvalidMap("table values must be non-decreasing in [0, 1]".into()));
        }
        Ok(Self { xs, ys })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&t| t <= x).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        let s = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
        y0 + s * (y1 - y0)
    }
}

/// The substitution `phi` in `(V_phi f)(x) = ∫_0^{phi(x)} f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubstitutionMap {
    /// `x^alpha`
    Power { alpha: f64 },
    Identity,
    /// `1 - (1 - x)^{1/alpha}`
    FlippedPower { alpha: f64 },
    /// `x^2`
    Square,
    Table(MonotoneTable),
}

impl SubstitutionMap {
    pub fn power(alpha: AlphaParam) -> Self {
        SubstitutionMap::Power { alpha: alpha.value() }
    }

    pub fn flipped_power(alpha: AlphaParam) -> Self {
        SubstitutionMap::FlippedPower { alpha: alpha.value() }
    }

    /// `x / 2` as a two-point table.
    pub fn half() -> Self {
        // constant, valid table
        SubstitutionMap::Table(MonotoneTable::new(vec![0.0, 1.0], vec![0.0, 0.5]).unwrap())
    }

    /// Parses `power`, `identity`, `flipped`, `square` or `half`.
    pub fn from_name(name: &str, alpha: AlphaParam) -> Result<Self> {
        match name {
            "power" => Ok(Self::power(alpha)),
            "identity" => Ok(SubstitutionMap::Identity),
            "flipped" | "flipped_power" => Ok(Self::flipped_power(alpha)),
            "square" => Ok(SubstitutionMap::Square),
            "half" => Ok(Self::half()),
            other => Err(Error::InvalidMap(format!(
                "unknown map '{other}' (expected power, identity, flipped, square or half)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SubstitutionMap::Power { .. } => "power",
            SubstitutionMap::Identity => "identity",
            SubstitutionMap::FlippedPower { .. } => "flipped",
            SubstitutionMap::Square => "square",
            SubstitutionMap::Table(_) => "table",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SubstitutionMap::Power { alpha } => x.powf(*alpha),
            SubstitutionMap::Identity => x,
            // accurate for small x, where 1 - (1-x)^{1/alpha} ~ x / alpha
            SubstitutionMap::FlippedPower { alpha } => -((-x).ln_1p() / alpha).exp_m1(),
            SubstitutionMap::Square => x * x,
            SubstitutionMap::Table(t) => t.eval(x),
        }
    }

    /// The eigenvalue ladder `(1-alpha) alpha^{n-1}` this map shares with
    /// `x^alpha`, if any.
    pub fn ladder_alpha(&self) -> Option<f64> {
        match self {
            SubstitutionMap::Power { alpha } | SubstitutionMap::FlippedPower { alpha } => Some(*alpha),
            _ => None,
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(x))
    }
}

/// `∫_0^{phi(x)} f(t) dt`.
pub fn apply_v<F: Fn(f64) -> f64>(phi: &SubstitutionMap, f: F, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_x(x)?;
    let q = Integrator::new(*quad)?;
    apply_v_with(&q, phi, &f, x)
}

fn apply_v_with<F: Fn(f64) -> f64>(q: &Integrator, phi: &SubstitutionMap, f: &F, x: f64) -> Result<f64> {
    let upper = phi.eval(x);
    Ok(q.integrate(f, 0.0, upper)?.value)
}

/// `∫_{x^{1/alpha}}^1 g(t) dt`.
pub fn apply_vstar<F: Fn(f64) -> f64>(alpha: AlphaParam, g: F, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_x(x)?;
    let q = Integrator::new(*quad)?;
    apply_vstar_with(&q, alpha, &g, x)
}

fn apply_vstar_with<F: Fn(f64) -> f64>(q: &Integrator, alpha: AlphaParam, g: &F, x: f64) -> Result<f64> {
    let lower = x.powf(1.0 / alpha.value());
    Ok(q.integrate(g, lower, 1.0)?.value)
}

/// `∫_0^1 u v`.
pub fn inner_product<U: Fn(f64) -> f64, V: Fn(f64) -> f64>(u: U, v: V, quad: &QuadratureSpec) -> Result<f64> {
    let q = Integrator::new(*quad)?;
    Ok(q.integrate(|t| u(t) * v(t), 0.0, 1.0)?.value)
}

/// Graded mesh `(i / size)^gamma`, `i = 0..=size`, with trapezoid weights.
pub fn residual_mesh(size: usize, gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!("residual mesh of size {size} is below 2")));
    }
    let xs: Vec<f64> = (0..=size).map(|i| (i as f64 / size as f64).powf(gamma)).collect();
    let mut ws = vec![0.0; xs.len()];
    for i in 0..size {
        let h = xs[i + 1] - xs[i];
        ws[i] += 0.5 * h;
        ws[i + 1] += 0.5 * h;
    }
    Ok((xs, ws))
}

fn relative_l2(residual: &[f64], reference: &[f64], weights: &[f64]) -> f64 {
    let num: f64 = residual.iter().zip(weights).map(|(r, w)| w * r * r).sum();
    let den: f64 = reference.iter().zip(weights).map(|(r, w)| w * r * r).sum();
    (num / den).sqrt()
}

/// `||V_alpha f_n - lambda_n f_n|| / ||f_n||` on a graded mesh of `mesh + 1` points.
pub fn residual_f(alpha: AlphaParam, n: usize, quad: &QuadratureSpec, mesh: usize) -> Result<f64> {
    let f = f_coeffs(alpha, n)?;
    let q = Integrator::new(*quad)?;
    let phi = SubstitutionMap::power(alpha);
    let (xs, ws) = residual_mesh(mesh, quad.grading_exponent)?;
    let eval = |t: f64| f.value(t);
    let applied: Vec<f64> = xs
        .par_iter()
        .map(|&x| apply_v_with(&q, &phi, &eval, x))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
    let residual: Vec<f64> = applied.iter().zip(&values).map(|(a, v)| a - f.lambda * v).collect();
    Ok(relative_l2(&residual, &values, &ws))
}

/// `||V_alpha* g_n - lambda_n g_n|| / ||g_n||` on a graded mesh of `mesh + 1` points.
pub fn residual_g(
    alpha: AlphaParam,
    n: usize,
    quad: &QuadratureSpec,
    mesh: usize,
    precision: Precision,
) -> Result<f64> {
    let g = g_terms(alpha, n, 1e-18, precision)?;
    let q = Integrator::new(*quad)?;
    let (xs, ws) = residual_mesh(mesh, quad.grading_exponent)?;
    let eval = |t: f64| g.value(t);
    let applied: Vec<f64> = xs
        .par_iter()
        .map(|&x| apply_vstar_with(&q, alpha, &eval, x))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = xs.iter().map(|&x| g.value(x)).collect();
    let residual: Vec<f64> = applied.iter().zip(&values).map(|(a, v)| a - g.lambda * v).collect();
    Ok(relative_l2(&residual, &values, &ws))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn maps_fix_endpoints() {
        let maps = [
            SubstitutionMap::power(alpha(0.3)),
            SubstitutionMap::Identity,
            SubstitutionMap::flipped_power(alpha(0.3)),
            SubstitutionMap::Square,
        ];
        for m in &maps {
            assert_eq!(m.eval(0.0), 0.0, "{m:?}");
            assert_eq!(m.eval(1.0), 1.0, "{m:?}");
        }
        assert_eq!(SubstitutionMap::half().eval(1.0), 0.5);
        assert_eq!(SubstitutionMap::half().eval(0.3), 0.15);
        assert!(MonotoneTable::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.6, 0.4]).is_err());
        assert!(MonotoneTable::new(vec![0.1, 1.0], vec![0.0, 0.4]).is_err());
        assert!(SubstitutionMap::from_name("cube", alpha(0.5)).is_err());
    }

    #[test]
    fn apply_v_examples() {
        let quad = QuadratureSpec::default();
        let one = |_: f64| 1.0;
        let v = apply_v(&SubstitutionMap::Identity, one, 0.7, &quad).unwrap();
        assert!((v - 0.7).abs() < 1e-15);
        let v = apply_v(&SubstitutionMap::power(alpha(0.5)), one, 0.5, &quad).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let v = apply_v(&SubstitutionMap::power(alpha(0.5)), |t| t, 0.25, &quad).unwrap();
        assert!((v - 0.125).abs() < 1e-15);
        assert!(apply_v(&SubstitutionMap::Identity, one, 1.2, &quad).is_err());
    }

    #[test]
    fn apply_vstar_examples() {
        let quad = QuadratureSpec::default();
        let one = |_: f64| 1.0;
        assert_eq!(apply_vstar(alpha(0.5), one, 1.0, &quad).unwrap(), 0.0);
        assert!((apply_vstar(alpha(0.5), one, 0.0, &quad).unwrap() - 1.0).abs() < 1e-15);
        assert!((apply_vstar(alpha(0.5), one, 0.25, &quad).unwrap() - 0.9375).abs() < 1e-15);
    }

    #[test]
    fn identity_map_gives_antiderivative() {
        let quad = QuadratureSpec::default();
        for p in 0..=3 {
            for x in [0.0, 0.1, 0.55, 1.0] {
                let v = apply_v(&SubstitutionMap::Identity, |t: f64| t.powi(p), x, &quad).unwrap();
                let want = x.powi(p + 1) / (p + 1) as f64;
                assert!((v - want).abs() <= quad.abs_tol, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn adjoint_duality() {
        let quad = QuadratureSpec::default();
        let u = |t: f64| (2.0 * t).cos() + t;
        let v = |t: f64| (t - 0.3).exp();
        let norm = |h: &dyn Fn(f64) -> f64| inner_product(h, h, &quad).unwrap().sqrt();
        let (nu, nv) = (norm(&u), norm(&v));
        for a in [0.25, 0.5, 0.75] {
            let al = alpha(a);
            let phi = SubstitutionMap::power(al);
            let lhs = inner_product(|x| apply_v(&phi, u, x, &quad).unwrap(), v, &quad).unwrap();
            let rhs = inner_product(u, |x| apply_vstar(al, v, x, &quad).unwrap(), &quad).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * nu * nv, "a={a}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn residual_f_examples() {
        let quad = QuadratureSpec::default();
        assert!(residual_f(alpha(0.5), 1, &quad, 64).unwrap() < 1e-10);
        assert!(residual_f(alpha(0.25), 5, &quad, 64).unwrap() < 1e-8);
        assert!(residual_f(alpha(0.75), 10, &quad, 64).unwrap() < 1e-7);
    }

    #[test]
    fn residual_g_examples() {
        let quad = QuadratureSpec::default();
        assert!(residual_g(alpha(0.5), 1, &quad, 64, Precision::Double).unwrap() < 1e-8);
        assert!(residual_g(alpha(0.5), 4, &quad, 64, Precision::Double).unwrap() < 1e-6);
        assert!(residual_g(alpha(0.25), 6, &quad, 64, Precision::Double).unwrap() < 1e-6);
    }

    #[test]
    fn residual_does_not_grow_as_tolerance_tightens() {
        for (a, n) in [(0.3, 3), (0.6, 6), (0.8, 2)] {
            let mut prev = f64::INFINITY;
            let mut tol = 1e-6;
            for _ in 0..5 {
                let r = residual_f(alpha(a), n, &QuadratureSpec::default().with_tol(tol), 32).unwrap();
                assert!(r <= prev + 1e-12, "a={a} n={n} tol={tol}: {r} after {prev}");
                prev = r;
                tol /= 2.0;
            }
        }
    }
}
