//! Spectral theory of the Volterra composition operator
//!
//! ```text
//! (V_phi f)(x) = ∫_0^{phi(x)} f(t) dt        on L²(0, 1)
//! ```
//!
//! with the power map `phi(x) = x^alpha`, `0 < alpha < 1`, as the main case.
//!
//! The crate is organised bottom-up:
//!
//! - [`qseries`]: q-Pochhammer products, the entire function `F_q` (product and
//!   series forms, cross-checked) and the polynomials `P_n` whose zeros control
//!   the zeros of the eigenfunctions.
//! - [`eigensystem`]: closed-form eigenvalues `(1-alpha) alpha^(n-1)`, the
//!   log-polynomial eigenfunctions `f_n` of `V_alpha` and the power-series
//!   eigenfunctions `g_n` of the adjoint.
//! - [`quadrature`] and [`operator`]: graded Gauss–Legendre panels, application
//!   of `V_phi` and `V_alpha*`, L² eigen-residuals.
//! - [`discretize`] and [`spectrum`](mod@spectrum): piecewise-linear collocation matrices on
//!   graded grids and their dense spectra.
//! - [`zeros`]: zeros of `P_n` and `f_n`, interlacing, and an exploratory scan for
//!   the zeros of `g_n`.
//! - [`completeness`]: Gram-matrix distances to the spans of `{f_n}` and `{g_n}`,
//!   the Müntz series, and the compressed operator on `span{g_n}^⊥`.
//! - [`acceptance`], [`report`] and [`cli`]: the verification suite and the
//!   machine-readable reports emitted by the `volterra` binary.
//!
//! Eigen-indices are 1-based throughout: `lambda_n = (1 - alpha) alpha^(n-1)` is
//! the eigenvalue of `f_n` and `g_n`.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod acceptance;
pub mod cli;
pub mod completeness;
pub mod discretize;
pub mod eigensystem;
mod error;
pub mod operator;
pub mod precision;
pub mod qseries;
pub mod quadrature;
pub mod report;
pub mod spectrum;
pub mod sum;
pub mod zeros;

pub use error::{Error, Result};
pub use precision::Precision;

pub use completeness::{distance_to_span, invariant_subspace_demo, muntz_sum, Family, GramReport, Witness};
pub use discretize::{build_matrix, convergence_study, flip_conjugate, Grid, VMatrix};
pub use eigensystem::{eigenvalue, f_coeffs, g_terms, AlphaParam, FEigenfunction, GEigenfunction};
pub use operator::{apply_v, apply_vstar, residual_f, residual_g, SubstitutionMap};
pub use qseries::{fq_product, fq_series, pn_coeffs, qpoch, PnPolynomial, QParam};
pub use quadrature::QuadratureSpec;
pub use spectrum::{spectrum, Eigenvalue};
pub use zeros::{check_interlace, f_zeros, g_zero_scan, pn_roots, RootSet};
