//! Completeness of `{f_n}`, non-completeness of `{g_n}`, and the compressed
//! operator on `span{g_n}^⊥`.
//!
//! `g_n` is a combination of `1, x^{mu_1}, x^{mu_2}, ...` with `Σ 1/mu_k < ∞`,
//! so by Müntz–Szász the `g_n` cannot reach every power: the distance from `x^p`
//! to their span is bounded below by [`muntz_floor`] for every `N`.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt_pivoting::factor as piv_llt;
use faer::{Mat, Par, Side};
use rayon::prelude::*;
use serde::Serialize;

use crate::discretize::{build_matrix, Grid};
use crate::eigensystem::{f_coeffs, g_terms, muntz_exponent, AlphaParam, FEigenfunction, GEigenfunction};
use crate::operator::SubstitutionMap;
use crate::quadrature::{Integrator, QuadratureSpec};
use crate::spectrum::spectral_radius;
use crate::{Error, Precision, Result};

/// Largest family sizes whose Gram matrices stay usable in double precision.
pub const F_FAMILY_CAP: usize = 16;
pub const G_FAMILY_CAP: usize = 8;
/// Normalized Gram condition numbers above this raise `precision_flag`.
pub const GRAM_CONDITION_LIMIT: f64 = 1e15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuntzSeries {
    pub alpha: f64,
    /// `s_K = Σ_{k<=K} 1/mu_k`.
    pub partial_sums: Vec<f64>,
    /// `mu_k / mu_{k+1}` for `k = 1..K-1`.
    pub ratios: Vec<f64>,
    /// Iterated Aitken extrapolation of `ratios`.
    pub ratio_limit: f64,
    pub last_ratio: f64,
    /// `s_K + (1/mu_K) alpha / (1 - alpha)`, an upper bound for the full series.
    pub tail_bound: f64,
}

pub fn muntz_sum(alpha: AlphaParam, k: usize) -> Result<MuntzSeries> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("Müntz sum needs K >= 2, got {k}")));
    }
    let a = alpha.value();
    let mu: Vec<f64> = (1..=k).map(|j| muntz_exponent(alpha, j)).collect();
    let partial_sums: Vec<f64> = mu
        .iter()
        .scan(0.0, |s, m| {
            *s += 1.0 / m;
            Some(*s)
        })
        .collect();
    let ratios: Vec<f64> = mu.windows(2).map(|w| w[0] / w[1]).collect();
    let last_ratio = *ratios.last().expect("K >= 2");
    let ratio_limit = aitken(&ratios, AITKEN_PASSES);
    let tail_bound = partial_sums[k - 1] + a / ((1.0 - a) * mu[k - 1]);
    Ok(MuntzSeries {
        alpha: a,
        partial_sums,
        ratios,
        ratio_limit,
        last_ratio,
        tail_bound,
    })
}

/// The ratio error is a sum of geometric modes `alpha^{jk}`; each pass removes one.
const AITKEN_PASSES: usize = 3;

fn aitken(seq: &[f64], passes: usize) -> f64 {
    let mut s = seq.to_vec();
    for _ in 0..passes {
        if s.len() < 3 {
            break;
        }
        s = s
            .windows(3)
            .map(|w| {
                let denom = w[2] - 2.0 * w[1] + w[0];
                if denom.abs() > f64::EPSILON * w[2].abs() {
                    w[2] - (w[2] - w[1]).powi(2) / denom
                } else {
                    w[2]
                }
            })
            .collect();
    }
    *s.last().expect("non-empty sequence")
}

/// `dist(x^p, span{1, x^{mu_1}, x^{mu_2}, ...})` in `L²(0, 1)`, by the Müntz
/// product formula. Zero when `p` is one of the exponents.
pub fn muntz_floor(alpha: AlphaParam, p: f64) -> f64 {
    let mut prod = (p / (p + 1.0)).abs() / (2.0 * p + 1.0).sqrt();
    for j in 1.. {
        let mu = muntz_exponent(alpha, j);
        prod *= (p - mu).abs() / (p + mu + 1.0);
        if prod == 0.0 || mu > 1e18 || !mu.is_finite() {
            break;
        }
    }
    prod
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    F,
    G,
}

impl Family {
    pub fn cap(self) -> usize {
        match self {
            Family::F => F_FAMILY_CAP,
            Family::G => G_FAMILY_CAP,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Family::F),
            "g" => Ok(Family::G),
            other => Err(Error::InvalidArgument(format!("unknown family `{other}` (expected f or g)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    One,
    Power { p: f64 },
    FMember { n: usize },
    GMember { n: usize },
    /// `𝟙` minus its projection onto `g_1..g_m`.
    OneMinusGProjection { m: usize },
}

impl Witness {
    pub fn name(&self) -> String {
        match self {
            Witness::One => "one".into(),
            Witness::Power { p } => format!("x^{p}"),
            Witness::FMember { n } => format!("f_{n}"),
            Witness::GMember { n } => format!("g_{n}"),
            Witness::OneMinusGProjection { m } => format!("one_minus_g_projection_{m}"),
        }
    }
}

enum Member {
    F(FEigenfunction),
    G(GEigenfunction),
}

impl Member {
    fn new(family: Family, alpha: AlphaParam, n: usize) -> Result<Self> {
        Ok(match family {
            Family::F => Member::F(f_coeffs(alpha, n)?),
            Family::G => Member::G(g_terms(alpha, n, 1e-18, Precision::Double)?),
        })
    }

    fn value(&self, x: f64) -> f64 {
        match self {
            Member::F(f) => f.value(x),
            Member::G(g) => g.value(x),
        }
    }
}

type Func = Box<dyn Fn(f64) -> f64 + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramReport {
    pub family: Family,
    pub alpha: f64,
    pub witness: String,
    pub size: usize,
    /// Of the unit-diagonal Gram matrix of all `size` members.
    pub smallest_singular_value: f64,
    pub condition_estimate: f64,
    /// Numerical rank found by the pivoted factorization.
    pub rank: usize,
    /// `(n, dist(witness, span of the first n members))` for `n = 1..=size`.
    pub distance_profile: Vec<(usize, f64)>,
    pub witness_norm: f64,
    /// Set when the Gram conditioning exceeds `1e15`: the tail of the profile is
    /// then limited by roundoff, not by the span.
    pub precision_flag: bool,
}

impl GramReport {
    pub fn final_distance(&self) -> f64 {
        self.distance_profile.last().map(|p| p.1).unwrap_or(f64::NAN)
    }

    /// Non-increasing up to `slack` (relative to the witness norm).
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.distance_profile
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 + slack * self.witness_norm)
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.distance_profile.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

struct Span {
    members: Vec<Member>,
    /// Unnormalized Gram matrix.
    gram: Mat<f64>,
    integrator: Integrator,
}

impl Span {
    fn new(family: Family, alpha: AlphaParam, n: usize, quad: &QuadratureSpec) -> Result<Self> {
        let integrator = Integrator::new(*quad)?;
        let members = (1..=n).map(|k| Member::new(family, alpha, k)).collect::<Result<Vec<_>>>()?;
        let diag: Vec<f64> = members
            .par_iter()
            .map(|m| Ok(integrator.integrate(|t| m.value(t).powi(2), 0.0, 1.0)?.value))
            .collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        let off: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let q = Integrator::new(quad.with_tol(quad.abs_tol * (diag[i] * diag[j]).sqrt()))?;
                let (u, v) = (&members[i], &members[j]);
                Ok(q.integrate(|t| u.value(t) * v.value(t), 0.0, 1.0)?.value)
            })
            .collect::<Result<_>>()?;
        let mut gram = Mat::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 });
        for (&(i, j), &v) in pairs.iter().zip(&off) {
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        Ok(Span {
            members,
            gram,
            integrator,
        })
    }

    fn normalized(&self, n: usize) -> Mat<f64> {
        let g = &self.gram;
        Mat::from_fn(n, n, |i, j| g[(i, j)] / (g[(i, i)] * g[(j, j)]).sqrt())
    }

    /// Coefficients of the projection of `w` onto the first `n` members,
    /// through a diagonally pivoted Cholesky factorization truncated at its
    /// numerical rank. Returns `(coefficients, rank)`.
    fn project(&self, rhs: &[f64], n: usize) -> Result<(Vec<f64>, usize)> {
        let scale: Vec<f64> = (0..n).map(|i| self.gram[(i, i)].sqrt()).collect();
        let mut a = self.normalized(n);
        let mut perm = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let mut buf = MemBuffer::new(piv_llt::cholesky_in_place_scratch::<usize, f64>(n, Par::Seq, Default::default()));
        let (info, _) = piv_llt::cholesky_in_place(
            a.as_mut(),
            &mut perm,
            &mut perm_inv,
            Par::Seq,
            MemStack::new(&mut buf),
            Default::default(),
        )
        .map_err(|_| Error::InvalidArgument("Gram matrix is not positive semidefinite".into()))?;
        let r = info.rank;
        // solve L L^T y = b on the r pivoted members
        let b: Vec<f64> = perm[..r].iter().map(|&p| rhs[p] / scale[p]).collect();
        let mut y = b;
        for i in 0..r {
            let s: f64 = (0..i).map(|k| a[(i, k)] * y[k]).sum();
            y[i] = (y[i] - s) / a[(i, i)];
        }
        for i in (0..r).rev() {
            let s: f64 = ((i + 1)..r).map(|k| a[(k, i)] * y[k]).sum();
            y[i] = (y[i] - s) / a[(i, i)];
        }
        let mut coeffs = vec![0.0; n];
        for (k, &p) in perm[..r].iter().enumerate() {
            coeffs[p] = y[k] / scale[p];
        }
        Ok((coeffs, r))
    }

    fn combination(&self, coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().zip(&self.members).map(|(c, m)| c * m.value(x)).sum()
    }
}

fn witness_fn(witness: Witness, alpha: AlphaParam, quad: &QuadratureSpec) -> Result<Func> {
    Ok(match witness {
        Witness::One => Box::new(|_| 1.0),
        Witness::Power { p } => {
            if !(p > -0.5 && p.is_finite()) {
                return Err(Error::InvalidArgument(format!("x^{p} is not in L²(0, 1)")));
            }
            Box::new(move |x: f64| if x == 0.0 && p != 0.0 { 0.0 } else { x.powf(p) })
        }
        Witness::FMember { n } => {
            let f = f_coeffs(alpha, n)?;
            Box::new(move |x| f.value(x))
        }
        Witness::GMember { n } => {
            let g = g_terms(alpha, n, 1e-18, Precision::Double)?;
            Box::new(move |x| g.value(x))
        }
        Witness::OneMinusGProjection { m } => {
            check_cap(Family::G, m)?;
            let span = Span::new(Family::G, alpha, m, quad)?;
            let rhs = inner_products(&span, &|_| 1.0)?;
            let (coeffs, _) = span.project(&rhs, m)?;
            Box::new(move |x| 1.0 - span.combination(&coeffs, x))
        }
    })
}

fn check_cap(family: Family, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    if n > family.cap() {
        return Err(Error::DegreeTooLarge { n, cap: family.cap() });
    }
    Ok(())
}

fn inner_products(span: &Span, w: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Vec<f64>> {
    span.members
        .par_iter()
        .map(|m| Ok(span.integrator.integrate(|t| w(t) * m.value(t), 0.0, 1.0)?.value))
        .collect()
}

/// L² distance from `witness` to the span of the first `n` members of `family`,
/// with the whole profile `n = 1..=size`. Distances are evaluated directly as
/// `||w - Σ c_k u_k||` by quadrature rather than from the normal equations.
pub fn distance_to_span(
    witness: Witness,
    family: Family,
    alpha: AlphaParam,
    size: usize,
    quad: &QuadratureSpec,
) -> Result<GramReport> {
    check_cap(family, size)?;
    let w = witness_fn(witness, alpha, quad)?;
    let span = Span::new(family, alpha, size, quad)?;
    let rhs = inner_products(&span, &*w)?;
    let witness_norm = span.integrator.integrate(|t| w(t).powi(2), 0.0, 1.0)?.value.sqrt();

    let eigs = span.normalized(size).self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenNoConvergence)?;
    let smallest = eigs.first().copied().unwrap_or(0.0).max(0.0);
    let largest = eigs.last().copied().unwrap_or(0.0);
    let condition_estimate = if smallest > 0.0 { largest / smallest } else { f64::INFINITY };

    let mut profile = Vec::with_capacity(size);
    let mut rank = 0;
    for n in 1..=size {
        let (coeffs, r) = span.project(&rhs, n)?;
        rank = r;
        let d2 = span
            .integrator
            .integrate(|t| (w(t) - span.combination(&coeffs, t)).powi(2), 0.0, 1.0)?
            .value;
        profile.push((n, d2.max(0.0).sqrt()));
    }
    Ok(GramReport {
        family,
        alpha: alpha.value(),
        witness: witness.name(),
        size,
        smallest_singular_value: smallest,
        condition_estimate,
        rank,
        distance_profile: profile,
        witness_norm,
        precision_flag: condition_estimate > GRAM_CONDITION_LIMIT,
    })
}

/// Spectral radius of the `size`-point discretization of `V_alpha` compressed
/// to the orthogonal complement of the sampled `g_1..g_m`.
pub fn invariant_subspace_demo(alpha: AlphaParam, m: usize, size: usize) -> Result<f64> {
    if m > G_FAMILY_CAP {
        return Err(Error::DegreeTooLarge { n: m, cap: G_FAMILY_CAP });
    }
    let grid = Grid::for_alpha(alpha, size)?;
    let vm = build_matrix(&SubstitutionMap::power(alpha), &grid)?;
    let nodes = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let n = nodes.len();
    // similarity to the weighted inner product: W^{1/2} A W^{-1/2}
    let mut a = Mat::from_fn(n, n, |i, j| sw[i] * vm.entries[(i, j)] / sw[j]);
    if m == 0 {
        return spectral_radius(&a);
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for k in 1..=m {
        let g = g_terms(alpha, k, 1e-18, Precision::Double)?;
        let mut v: Vec<f64> = nodes.iter().zip(&sw).map(|(&x, s)| s * g.value(x)).collect();
        // two passes of Gram–Schmidt
        for _ in 0..2 {
            for u in &basis {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument(format!("sampled g_{k} is dependent on g_1..g_{}", k - 1)));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    let u = Mat::from_fn(n, m, |i, j| basis[j][i]);
    // P A P with P = I - U U^T
    let ut_a = u.transpose() * &a;
    a -= &u * &ut_a;
    let a_u = &a * &u;
    a -= &a_u * u.transpose();
    spectral_radius(&a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn muntz_partial_sums() {
        let s = muntz_sum(alpha(0.5), 4).unwrap();
        let want = [0.5, 0.5 + 1.0 / 6.0, 0.5 + 1.0 / 6.0 + 1.0 / 14.0, 0.5 + 1.0 / 6.0 + 1.0 / 14.0 + 1.0 / 30.0];
        for (a, b) in s.partial_sums.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let a = 0.37;
        let s = muntz_sum(alpha(a), 2).unwrap();
        let direct = a + a * a * (1.0 - a) / (1.0 - a * a);
        assert!((s.partial_sums[1] - direct).abs() < 1e-15);
        assert!(muntz_sum(alpha(a), 1).is_err());
    }

    #[test]
    fn muntz_ratio_and_tail() {
        for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let s = muntz_sum(alpha(a), 40).unwrap();
            assert!((s.ratio_limit - a).abs() < 1e-6, "a={a}: {}", s.ratio_limit);
            let long = muntz_sum(alpha(a), 60).unwrap();
            let total = *long.partial_sums.last().unwrap();
            for k in 2..=60 {
                let sk = muntz_sum(alpha(a), k).unwrap();
                assert!(sk.partial_sums[k - 1] <= sk.tail_bound);
                assert!(total <= sk.tail_bound * (1.0 + 1e-15), "a={a} K={k}");
            }
        }
    }

    #[test]
    fn muntz_floor_reference() {
        // mpmath product to 1e-30
        assert!((muntz_floor(alpha(0.5), 1.0) - 0.030_194_781_439_765_08).abs() < 1e-15);
        assert!((muntz_floor(alpha(0.25), 1.0) - 0.118_902_384_891_262_12).abs() < 1e-15);
        assert_eq!(muntz_floor(alpha(0.5), 2.0), 0.0);
    }

    #[test]
    fn f_family_reaches_one() {
        // dist(1, span{f_1..f_N}) = alpha^N exactly
        let q = QuadratureSpec::default();
        let r = distance_to_span(Witness::One, Family::F, alpha(0.5), 12, &q).unwrap();
        assert!(!r.precision_flag);
        for &(n, d) in &r.distance_profile {
            let want = 0.5f64.powi(n as i32);
            assert!((d - want).abs() < 1e-6 * want.max(1e-3), "n={n}: {d} vs {want}");
        }
        assert!(r.strictly_decreasing());
        assert!(r.final_distance() < 0.05);
    }

    #[test]
    fn member_witness_has_zero_distance() {
        let q = QuadratureSpec::default();
        let r = distance_to_span(Witness::FMember { n: 1 }, Family::F, alpha(0.5), 3, &q).unwrap();
        for &(_, d) in &r.distance_profile {
            assert!(d < 1e-7 * r.witness_norm, "{d}");
        }
    }

    #[test]
    fn g_family_reference_and_floor() {
        let q = QuadratureSpec::default();
        let want = [
            0.595_282_454_854,
            0.389_514_942_762,
            0.264_153_880_899,
            0.182_420_124_941,
            0.127_252_592_741,
            0.089_283_583_478_8,
            0.062_853_406_986_9,
            0.044_332_642_079,
        ];
        let r = distance_to_span(Witness::One, Family::G, alpha(0.5), 8, &q).unwrap();
        for (&(_, d), w) in r.distance_profile.iter().zip(want) {
            assert!((d - w).abs() < 1e-6 * w, "{d} vs {w}");
        }
        let floor = muntz_floor(alpha(0.5), 1.0);
        let r = distance_to_span(Witness::Power { p: 1.0 }, Family::G, alpha(0.5), 8, &q).unwrap();
        assert!(r.is_monotone(1e-10));
        assert!(r.distance_profile.iter().all(|&(_, d)| d >= floor));
        let r = distance_to_span(Witness::OneMinusGProjection { m: 8 }, Family::G, alpha(0.5), 8, &q).unwrap();
        assert!(r.is_monotone(1e-8));
        assert!(distance_to_span(Witness::One, Family::G, alpha(0.5), 9, &q).is_err());
    }

    #[test]
    fn compression_removes_top_eigenvalues() {
        let a = alpha(0.5);
        let mut prev = f64::INFINITY;
        for m in 0..=4 {
            let r = invariant_subspace_demo(a, m, 256).unwrap();
            let cap = 0.5 * 0.5f64.powi(m as i32);
            assert!(r <= 1.1 * cap, "m={m}: {r} vs {cap}");
            assert!(r <= prev + 1e-8);
            prev = r;
        }
    }
}
