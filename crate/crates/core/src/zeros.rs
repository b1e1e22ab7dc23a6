//! Zeros of `P_n` and `f_n`, interlacing, and a scan for the zeros of `g_n`.
//!
//! `f_{m+1}(x) = x^beta ln^m x · P_m(z)` with `z = -(1-alpha) / (alpha ln x)`
//! (base `q = alpha`), so every positive root `z_j` of `P_m` gives a zero
//! `x_j = exp(-(1-alpha) / (alpha z_j))` in `(0, 1)`; `x = 0` is the remaining one.

use faer::complex::Complex;
use faer::Mat;
use serde::Serialize;

use crate::eigensystem::{f_coeffs, g_terms, AlphaParam};
use crate::qseries::{pn_coeffs, PnPolynomial, QParam};
use crate::spectrum::balance;
use crate::{Error, Precision, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootDomain {
    /// Roots of `P_n` in the `z` variable.
    ZDomain,
    /// Zeros in `[0, 1]`.
    XDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub domain: RootDomain,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub certified_real: bool,
}

impl RootSet {
    /// Sorts `values` (carrying residuals along); residuals default to 0.
    pub fn new(domain: RootDomain, values: Vec<f64>) -> Self {
        let residuals = vec![0.0; values.len()];
        Self::with_residuals(domain, values, residuals, true)
    }

    fn with_residuals(domain: RootDomain, values: Vec<f64>, residuals: Vec<f64>, certified_real: bool) -> Self {
        let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(residuals).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (values, residuals) = pairs.into_iter().unzip();
        RootSet {
            domain,
            values,
            residuals,
            certified_real,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }
}

/// Monic polynomial in `w = z / s`, coefficients `d_0..d_{n-1}` (and `d_n = 1`).
struct ScaledPoly {
    scale: f64,
    d: Vec<f64>,
}

impl ScaledPoly {
    fn new(p: &PnPolynomial) -> Self {
        let n = p.n;
        let (sign_n, log_n) = p.log_terms[n];
        let (_, log_0) = p.log_terms[0];
        let ls = (log_0 - log_n) / n as f64;
        let d = p.log_terms[..n]
            .iter()
            .enumerate()
            .map(|(k, &(sign, l))| sign * sign_n * (l - log_n + (k as f64 - n as f64) * ls).exp())
            .collect();
        ScaledPoly { scale: ls.exp(), d }
    }

    /// Horner on the coefficients in the given order: `(p(u), p'(u), Σ |c_k| |u|^k)`.
    fn horner<'a, I: Iterator<Item = &'a f64>>(coeffs: I, u: Complex<f64>) -> (Complex<f64>, Complex<f64>, f64) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        let mut mag = 0.0;
        let au = u.norm();
        for &c in coeffs {
            dp = dp * u + p;
            p = p * u + c;
            mag = mag * au + c.abs();
        }
        (p, dp, mag)
    }

    /// `(p(w) / p'(w), |p(w)| / Σ |d_k| |w|^k)`. Outside the unit disc the
    /// reversed polynomial in `1/w` is used, so nothing overflows.
    fn newton_ratio(&self, w: Complex<f64>) -> (Complex<f64>, f64) {
        let n = self.d.len() as f64;
        let one = [1.0];
        if w.norm() <= 1.0 {
            let (p, dp, mag) = Self::horner(one.iter().chain(self.d.iter().rev()), w);
            (p / dp, p.norm() / mag)
        } else {
            // p(w) = w^n r(1/w)
            let u = w.inv();
            let (r, dr, mag) = Self::horner(self.d.iter().chain(one.iter()), u);
            (w * r / (r * n - u * dr), r.norm() / mag)
        }
    }

    fn companion_roots(&self) -> Result<Vec<Complex<f64>>> {
        let n = self.d.len();
        let mut c = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            c[(0, j)] = -self.d[n - 1 - j];
        }
        for i in 1..n {
            c[(i, i - 1)] = 1.0;
        }
        balance(&mut c);
        c.eigenvalues().map_err(|_| Error::RootCertification("companion eigenvalues did not converge".into()))
    }
}

const NEWTON_STEPS: usize = 5;

/// The `n` roots of `P_n` with base `q` in `(0, 1)`.
pub fn pn_roots(q: QParam, n: usize) -> Result<RootSet> {
    let qv = q.value();
    if !(qv > 0.0 && qv < 1.0) {
        return Err(Error::InvalidQ(qv));
    }
    if n == 0 {
        return Ok(RootSet::new(RootDomain::ZDomain, Vec::new()));
    }
    let p = pn_coeffs(q, n)?;
    let poly = ScaledPoly::new(&p);
    let mut roots = poly.companion_roots()?;
    for w in roots.iter_mut() {
        let (mut step, mut res) = poly.newton_ratio(*w);
        for _ in 0..NEWTON_STEPS {
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let next = *w - step;
            let (next_step, next_res) = poly.newton_ratio(next);
            if !(next_res < res) {
                break;
            }
            *w = next;
            step = next_step;
            res = next_res;
        }
    }
    let max_mod = roots.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let max_im = roots.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
    let certified = max_im < 1e-9 * max_mod;
    let residuals = roots
        .iter()
        .map(|w| poly.newton_ratio(Complex::new(w.re, 0.0)).1)
        .collect();
    let values = roots.iter().map(|w| w.re * poly.scale).collect();
    Ok(RootSet::with_residuals(RootDomain::ZDomain, values, residuals, certified))
}

/// The `n` zeros of `f_n` in `[0, 1]`, including `x = 0`.
pub fn f_zeros(alpha: AlphaParam, n: usize) -> Result<RootSet> {
    let f = f_coeffs(alpha, n)?;
    let a = alpha.value();
    let z = pn_roots(QParam::from(alpha), n - 1)?;
    if z.values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::RootCertification(format!("P_{} has a non-positive root", n - 1)));
    }
    let mut values = vec![0.0];
    let mut residuals = vec![0.0];
    for &zj in &z.values {
        let log_x = -(1.0 - a) / (a * zj);
        values.push(log_x.exp());
        residuals.push(f.bracket(log_x).abs() / f.bracket_scale(log_x));
    }
    Ok(RootSet::with_residuals(RootDomain::XDomain, values, residuals, z.certified_real))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlaceReport {
    pub holds: bool,
    /// Both sets contained `x = 0`, which was left out of the comparison.
    pub shared_zero_excluded: bool,
    /// Adjacent pairs closer than `1e-12` relative, counted as failures.
    pub ties: usize,
}

/// Whether `b_1 < a_1 < b_2 < ... < a_k < b_{k+1}`.
pub fn interlace_report(a: &RootSet, b: &RootSet) -> Result<InterlaceReport> {
    if a.domain != b.domain {
        return Err(Error::SizeMismatch("root sets live in different domains".into()));
    }
    if b.len() != a.len() + 1 {
        return Err(Error::SizeMismatch(format!(
            "interlacing needs |b| = |a| + 1, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let shared = a.domain == RootDomain::XDomain && a.values.first() == Some(&0.0) && b.values.first() == Some(&0.0);
    let skip = usize::from(shared);
    let av = &a.values[skip..];
    let bv = &b.values[skip..];
    let mut merged = Vec::with_capacity(av.len() + bv.len());
    for i in 0..av.len() {
        merged.push(bv[i]);
        merged.push(av[i]);
    }
    merged.push(bv[av.len()]);
    let mut ties = 0;
    let mut holds = true;
    for w in merged.windows(2) {
        let scale = w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE);
        if (w[1] - w[0]).abs() <= 1e-12 * scale {
            ties += 1;
            holds = false;
        } else if w[1] <= w[0] {
            holds = false;
        }
    }
    Ok(InterlaceReport {
        holds,
        shared_zero_excluded: shared,
        ties,
    })
}

pub fn check_interlace(a: &RootSet, b: &RootSet) -> Result<bool> {
    Ok(interlace_report(a, b)?.holds)
}

/// Sign-change scan of `g_n` on `[0, 1]`. Exploratory: counts are reported,
/// nothing about them is asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GZeroScan {
    pub n: usize,
    pub mesh: usize,
    /// Interior zeros followed, if present, by the endpoint `x = 1`.
    pub roots: RootSet,
    pub interior_count: usize,
    pub endpoint_zero_at_one: bool,
    /// The count the conjecture predicts, `n`.
    pub conjectured_count: usize,
    /// Mesh intervals skipped because `|g|` was below its error bound at an end.
    pub unresolved_intervals: usize,
}

pub fn g_zero_scan(alpha: AlphaParam, n: usize, mesh: usize, precision: Precision) -> Result<GZeroScan> {
    if mesh < 2 {
        return Err(Error::InvalidArgument(format!("scan mesh {mesh} below 2")));
    }
    let g = g_terms(alpha, n, 1e-18, precision)?;
    let samples: Vec<(f64, f64, f64)> = (0..=mesh)
        .map(|i| {
            let x = i as f64 / mesh as f64;
            let v = g.eval(x)?;
            Ok((x, v.value, v.error_bound))
        })
        .collect::<Result<_>>()?;
    let resolved = |v: f64, e: f64| v.abs() > e;
    let mut values = Vec::new();
    let mut residuals = Vec::new();
    let mut unresolved = 0;
    for w in samples.windows(2) {
        let (x0, v0, e0) = w[0];
        let (x1, v1, e1) = w[1];
        if x1 == 1.0 {
            // the endpoint zero is handled below
            if resolved(v0, e0) && resolved(v1, e1) && v0.signum() != v1.signum() {
                unresolved += 1;
            }
            continue;
        }
        if !(resolved(v0, e0) && resolved(v1, e1)) {
            unresolved += 1;
            continue;
        }
        if v0.signum() == v1.signum() {
            continue;
        }
        let (mut lo, mut hi, mut vlo) = (x0, x1, v0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let vm = g.eval(mid)?.value;
            if vm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if vm.signum() == vlo.signum() {
                lo = mid;
                vlo = vm;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        values.push(root);
        residuals.push(g.eval(root)?.value.abs());
    }
    let interior_count = values.len();
    let end = g.eval(1.0)?;
    let endpoint = end.value.abs() <= end.error_bound + 1e-8;
    if endpoint {
        values.push(1.0);
        residuals.push(end.value.abs());
    }
    Ok(GZeroScan {
        n,
        mesh,
        roots: RootSet::with_residuals(RootDomain::XDomain, values, residuals, true),
        interior_count,
        endpoint_zero_at_one: endpoint,
        conjectured_count: n,
        unresolved_intervals: unresolved,
    })
}
