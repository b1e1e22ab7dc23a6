//! Piecewise-linear collocation of `V_phi` on graded grids.
//!
//! A function is represented by its values at nodes `0 < x_1 < ... < x_N <= 1`
//! and interpolated linearly between nodes, constantly on `[0, x_1]` and
//! `[x_N, 1]`. Row `i` of the matrix integrates that interpolant exactly over
//! `[0, phi(x_i)]`, splitting the cell that contains `phi(x_i)`.

use std::io::{Read, Write};

use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigensystem::{eigenvalue, AlphaParam};
use crate::operator::SubstitutionMap;
use crate::spectrum::{dense_eigenvalues, Eigenvalue};
use crate::{Error, Result};

/// Dense storage limit: 4096² doubles are 128 MiB.
pub const MAX_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    nodes: Vec<f64>,
    pub grading_exponent: f64,
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("{n} nodes; need at least 2")));
    }
    if n > MAX_GRID {
        return Err(Error::GridTooLarge { n, max: MAX_GRID });
    }
    Ok(())
}

impl Grid {
    /// `x_i = (i / n)^gamma`, `i = 1..=n`.
    pub fn graded(n: usize, gamma: f64) -> Result<Self> {
        check_size(n)?;
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidGrid(format!("grading exponent {gamma} below 1")));
        }
        let nodes = (1..=n).map(|i| (i as f64 / n as f64).powf(gamma)).collect();
        Ok(Grid {
            nodes,
            grading_exponent: gamma,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::graded(n, 1.0)
    }

    /// Grading `(2 - 2 alpha) / alpha`, clamped to `[1, 4]`, for the
    /// eigenfunction singularity `x^{alpha/(1-alpha)}` at 0.
    pub fn for_alpha(alpha: AlphaParam, n: usize) -> Result<Self> {
        let a = alpha.value();
        Self::graded(n, ((2.0 - 2.0 * a) / a).clamp(1.0, 4.0))
    }

    /// Nodes graded towards both ends and mirrored: `x_{N+1-i} = 1 - x_i`.
    ///
    /// Midpoints `u_i = (i - 1/2) / N` are mapped through `s(u) = 2^{gamma-1} u^gamma`
    /// on `[0, 1/2]` and `1 - s(1 - u)` beyond, so `x_N = 1 - x_1 < 1`.
    pub fn symmetric(n: usize, gamma: f64) -> Result<Self> {
        check_size(n)?;
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidGrid(format!("grading exponent {gamma} below 1")));
        }
        let s = |u: f64| 2f64.powf(gamma - 1.0) * u.powf(gamma);
        let mut nodes: Vec<f64> = (1..=n)
            .map(|i| {
                let u = (i as f64 - 0.5) / n as f64;
                if u <= 0.5 {
                    s(u)
                } else {
                    1.0 - s(1.0 - u)
                }
            })
            .collect();
        // make the mirror exact in floating point
        for i in 0..n / 2 {
            nodes[n - 1 - i] = 1.0 - nodes[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.5;
        }
        Ok(Grid {
            nodes,
            grading_exponent: gamma,
        })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        check_size(nodes.len())?;
        if !(nodes[0] > 0.0) || *nodes.last().unwrap() > 1.0 {
            return Err(Error::InvalidGrid("nodes must lie in (0, 1]".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
        }
        Ok(Grid {
            nodes,
            grading_exponent: f64::NAN,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.nodes.len();
        (0..n).all(|i| (self.nodes[i] + self.nodes[n - 1 - i] - 1.0).abs() <= 4.0 * f64::EPSILON)
    }

    /// `∫_0^1` of the interpolant of the node values, as weights.
    pub fn weights(&self) -> Vec<f64> {
        let x = &self.nodes;
        let n = x.len();
        let mut w = vec![0.0; n];
        w[0] = x[0];
        for k in 0..n - 1 {
            let h = x[k + 1] - x[k];
            w[k] += 0.5 * h;
            w[k + 1] += 0.5 * h;
        }
        w[n - 1] += 1.0 - x[n - 1];
        w
    }

    /// Row of weights integrating the interpolant over `[0, y]`.
    fn integration_row(&self, y: f64, row: &mut [f64]) {
        let x = &self.nodes;
        let n = x.len();
        row.fill(0.0);
        if y <= x[0] {
            row[0] = y;
            return;
        }
        row[0] = x[0];
        // last node not exceeding y
        let k = x.partition_point(|&t| t <= y) - 1;
        for c in 0..k {
            let h = x[c + 1] - x[c];
            row[c] += 0.5 * h;
            row[c + 1] += 0.5 * h;
        }
        if k + 1 < n {
            let h = x[k + 1] - x[k];
            let s = (y - x[k]) / h;
            row[k] += h * (s - 0.5 * s * s);
            row[k + 1] += h * 0.5 * s * s;
        } else {
            row[n - 1] += y - x[n - 1];
        }
    }

    /// Piecewise-linear interpolation of node values at `t`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let x = &self.nodes;
        let n = x.len();
        if t <= x[0] {
            return values[0];
        }
        if t >= x[n - 1] {
            return values[n - 1];
        }
        let k = x.partition_point(|&v| v <= t) - 1;
        let s = (t - x[k]) / (x[k + 1] - x[k]);
        values[k] + s * (values[k + 1] - values[k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixOrigin {
    Collocation { phi: SubstitutionMap },
    /// `U^{-1} A U` with `(U f)(x) = f(1 - x)`.
    FlipConjugate { phi: SubstitutionMap },
    Imported,
}

#[derive(Debug, Clone)]
pub struct VMatrix {
    pub entries: Mat<f64>,
    pub grid: Grid,
    pub origin: MatrixOrigin,
}

pub fn build_matrix(phi: &SubstitutionMap, grid: &Grid) -> Result<VMatrix> {
    let n = grid.len();
    let targets: Vec<f64> = grid.nodes().iter().map(|&x| phi.eval(x)).collect();
    if let Some(bad) = targets.iter().find(|y| !(0.0..=1.0).contains(*y)) {
        return Err(Error::InvalidMap(format!("phi takes the value {bad} outside [0, 1]")));
    }
    let mut flat = vec![0.0; n * n];
    flat.par_chunks_mut(n)
        .zip(targets.par_iter())
        .for_each(|(row, &y)| grid.integration_row(y, row));
    Ok(VMatrix {
        entries: Mat::from_fn(n, n, |i, j| flat[i * n + j]),
        grid: grid.clone(),
        origin: MatrixOrigin::Collocation { phi: phi.clone() },
    })
}

/// Reverse-permutation similarity `B_{ij} = A_{N-1-i, N-1-j}`.
pub fn flip_conjugate(matrix: &VMatrix) -> Result<VMatrix> {
    if !matrix.grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let n = matrix.size();
    let a = &matrix.entries;
    let origin = match &matrix.origin {
        MatrixOrigin::Collocation { phi } => MatrixOrigin::FlipConjugate { phi: phi.clone() },
        MatrixOrigin::FlipConjugate { phi } => MatrixOrigin::Collocation { phi: phi.clone() },
        MatrixOrigin::Imported => MatrixOrigin::Imported,
    };
    Ok(VMatrix {
        entries: Mat::from_fn(n, n, |i, j| a[(n - 1 - i, n - 1 - j)]),
        grid: matrix.grid.clone(),
        origin,
    })
}

impl VMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| self.entries[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dominant eigenpair by power iteration, the vector normalised to unit
    /// maximum with positive sum.
    pub fn top_eigenvector(&self, max_iter: usize, tol: f64) -> (f64, Vec<f64>) {
        let n = self.size();
        let mut v = vec![1.0; n];
        let mut lambda = 0.0;
        for _ in 0..max_iter {
            let w = self.apply(&v);
            let scale = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if scale == 0.0 {
                return (0.0, v);
            }
            let next: Vec<f64> = w.iter().map(|x| x / scale).collect();
            let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            // Rayleigh-type estimate on the normalised iterate
            let num: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
            let den: f64 = v.iter().map(|b| b * b).sum();
            lambda = num / den;
            v = next;
            if change < tol {
                break;
            }
        }
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        (lambda, v)
    }

    /// `u64` LE size `N`, then `N²` LE doubles row-major, then the `N` nodes.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.size();
        w.write_all(&(n as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * n * (n + 1));
        for i in 0..n {
            for j in 0..n {
                buf.extend_from_slice(&self.entries[(i, j)].to_le_bytes());
            }
        }
        for x in self.grid.nodes() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        let n = u64::from_le_bytes(head) as usize;
        check_size(n)?;
        let mut buf = vec![0u8; 8 * n * (n + 1)];
        r.read_exact(&mut buf)?;
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::InvalidArgument(format!("{} trailing bytes after matrix", rest.len())));
        }
        let vals: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let grid = Grid::from_nodes(vals[n * n..].to_vec())?;
        Ok(VMatrix {
            entries: Mat::from_fn(n, n, |i, j| vals[i * n + j]),
            grid,
            origin: MatrixOrigin::Imported,
        })
    }
}

/// The top-`k` moduli matched against the ladder `(1-alpha) alpha^{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderMatch {
    pub moduli: Vec<f64>,
    pub relative_errors: Vec<f64>,
    /// Complex eigenvalues among the leading ones, skipped as discretisation artifacts.
    pub artifacts: Vec<Eigenvalue>,
}

/// Greedy matching by modulus; eigenvalues with `|Im| > 1e-8 ||A||` are
/// reported as artifacts rather than matched.
pub fn match_ladder(eigenvalues: &[Eigenvalue], alpha: AlphaParam, k: usize, norm: f64) -> Result<LadderMatch> {
    let mut moduli = Vec::with_capacity(k);
    let mut artifacts = Vec::new();
    for ev in eigenvalues {
        if moduli.len() == k {
            break;
        }
        if ev.im.abs() > 1e-8 * norm {
            artifacts.push(*ev);
        } else {
            moduli.push(ev.modulus());
        }
    }
    let relative_errors = moduli
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let want = eigenvalue(alpha, i + 1)?;
            Ok((m - want).abs() / want)
        })
        .collect::<Result<_>>()?;
    Ok(LadderMatch {
        moduli,
        relative_errors,
        artifacts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub size: usize,
    #[serde(flatten)]
    pub ladder: LadderMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub alpha: AlphaParam,
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Whether the top-eigenvalue error is non-increasing in `N`.
    pub top_error_monotone: bool,
}

impl ConvergenceTable {
    /// `|lambda_{n+1}| / |lambda_n|` at the largest size.
    pub fn ladder_ratios(&self) -> Vec<f64> {
        self.rows
            .last()
            .map(|r| r.ladder.moduli.windows(2).map(|w| w[1] / w[0]).collect())
            .unwrap_or_default()
    }
}

pub fn convergence_study(alpha: AlphaParam, sizes: &[usize], k: usize) -> Result<ConvergenceTable> {
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sizes must be strictly increasing".into()));
    }
    let phi = SubstitutionMap::power(alpha);
    let rows = sizes
        .iter()
        .map(|&n| {
            let m = build_matrix(&phi, &Grid::for_alpha(alpha, n)?)?;
            let ev = dense_eigenvalues(&m.entries)?;
            let ladder = match_ladder(&ev, alpha, k, m.norm_inf())?;
            Ok(ConvergenceRow { size: n, ladder })
        })
        .collect::<Result<Vec<_>>>()?;
    let top: Vec<f64> = rows
        .iter()
        .map(|r| r.ladder.relative_errors.first().copied().unwrap_or(f64::INFINITY))
        .collect();
    Ok(ConvergenceTable {
        alpha,
        k,
        top_error_monotone: top.windows(2).all(|w| w[1] <= w[0]),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn row_sums(m: &VMatrix) -> Vec<f64> {
        m.apply(&vec![1.0; m.size()])
    }

    #[test]
    fn grid_constructors() {
        let g = Grid::graded(8, 2.0).unwrap();
        assert_eq!(g.nodes()[7], 1.0);
        assert!((g.nodes()[0] - 1.0 / 64.0).abs() < 1e-17);
        assert!(Grid::graded(1, 2.0).is_err());
        assert!(matches!(Grid::graded(MAX_GRID + 1, 1.0), Err(Error::GridTooLarge { .. })));
        assert!(Grid::from_nodes(vec![0.2, 0.1, 1.0]).is_err());
        assert!(Grid::from_nodes(vec![0.0, 0.5, 1.0]).is_err());
        for n in [7, 8] {
            let s = Grid::symmetric(n, 2.0).unwrap();
            assert!(s.is_symmetric());
            assert!(s.nodes().windows(2).all(|w| w[1] > w[0]));
        }
        assert!(!g.is_symmetric());
        let w = g.weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_rows_integrate_constants_exactly() {
        let g = Grid::graded(50, 2.0).unwrap();
        let m = build_matrix(&SubstitutionMap::Identity, &g).unwrap();
        for (s, x) in row_sums(&m).iter().zip(g.nodes()) {
            assert!((s - x).abs() < 1e-15);
        }
        assert!(crate::spectrum::is_lower_triangular(&m.entries));
    }

    #[test]
    fn power_rows_integrate_constants() {
        let g = Grid::uniform(4).unwrap();
        let m = build_matrix(&SubstitutionMap::power(alpha(0.5)), &g).unwrap();
        for (s, x) in row_sums(&m).iter().zip(g.nodes()) {
            assert!((s - x.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn below_identity_maps_are_lower_triangular() {
        let g = Grid::uniform(64).unwrap();
        for phi in [SubstitutionMap::Square, SubstitutionMap::half()] {
            let m = build_matrix(&phi, &g).unwrap();
            assert!(crate::spectrum::is_lower_triangular(&m.entries), "{phi:?}");
            let diag_max = (0..64).map(|i| m.entries[(i, i)]).fold(0.0, f64::max);
            assert!(diag_max <= 1.0 / 64.0 + 1e-15);
        }
    }

    #[test]
    fn linear_functions_integrate_exactly() {
        let g = Grid::graded(40, 1.5).unwrap();
        let m = build_matrix(&SubstitutionMap::power(alpha(0.3)), &g).unwrap();
        // the interpolant of t is t on [x_1, 1] and x_1 on [0, x_1]
        let vals: Vec<f64> = g.nodes().to_vec();
        let x1 = g.nodes()[0];
        for (out, x) in m.apply(&vals).iter().zip(g.nodes()) {
            let y = x.powf(0.3);
            let want = if y <= x1 { x1 * y } else { x1 * x1 + 0.5 * (y * y - x1 * x1) };
            assert!((out - want).abs() < 1e-15);
        }
    }

    #[test]
    fn flip_is_an_involution_and_similarity() {
        let g = Grid::symmetric(30, 2.0).unwrap();
        let m = build_matrix(&SubstitutionMap::power(alpha(0.5)), &g).unwrap();
        let f = flip_conjugate(&m).unwrap();
        let ff = flip_conjugate(&f).unwrap();
        assert_eq!(ff.entries, m.entries);
        // the leading eigenvalues are well conditioned; the tail is a
        // pseudospectral cloud and only agrees to backward-error level
        let a = dense_eigenvalues(&m.entries).unwrap();
        let b = dense_eigenvalues(&f.entries).unwrap();
        for (x, y) in a.iter().zip(&b).take(4) {
            assert!((x.modulus() - y.modulus()).abs() < 1e-12, "{x:?} vs {y:?}");
        }
        // characteristic polynomial at a few points
        let n = m.size();
        for z in [0.1, -0.37, 0.77] {
            let shift = |e: &Mat<f64>| Mat::from_fn(n, n, |i, j| e[(i, j)] - if i == j { z } else { 0.0 });
            let p = shift(&m.entries).as_ref().determinant();
            let q = shift(&f.entries).as_ref().determinant();
            assert!((p - q).abs() <= 1e-10 * p.abs(), "z={z}: {p} vs {q}");
        }
        let asym = build_matrix(&SubstitutionMap::Identity, &Grid::graded(10, 2.0).unwrap()).unwrap();
        assert!(matches!(flip_conjugate(&asym), Err(Error::AsymmetricGrid)));
    }

    #[test]
    fn binary_round_trip() {
        let g = Grid::graded(5, 2.0).unwrap();
        let m = build_matrix(&SubstitutionMap::Square, &g).unwrap();
        let mut bytes = Vec::new();
        m.write_binary(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 8 + 8 * 25 + 8 * 5);
        assert_eq!(&bytes[..8], &5u64.to_le_bytes());
        let back = VMatrix::read_binary(bytes.as_slice()).unwrap();
        assert_eq!(back.entries, m.entries);
        assert_eq!(back.grid.nodes(), g.nodes());
        assert!(VMatrix::read_binary(&bytes[..20]).is_err());
    }

    #[test]
    fn convergence_is_monotone_for_half() {
        let t = convergence_study(alpha(0.5), &[256, 512, 1024], 1).unwrap();
        let errs: Vec<f64> = t.rows.iter().map(|r| r.ladder.relative_errors[0]).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(t.top_error_monotone);
        assert!((t.rows[2].ladder.moduli[0] - 0.5).abs() < 1e-3);
        assert!(convergence_study(alpha(0.5), &[512, 256], 1).is_err());
    }

    #[test]
    fn ladder_ratios_for_alpha_near_one() {
        let t = convergence_study(alpha(0.9), &[512, 1024], 3).unwrap();
        for r in t.ladder_ratios() {
            assert!((r - 0.9).abs() < 5e-2, "{r}");
        }
    }
}
