//! The `volterra` command line: every pipeline behind one subcommand, reports
//! as JSON or CSV.
//!
//! Exit codes: 0 success, 1 a contract failed (or a module error), 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::acceptance::run_suite;
use crate::completeness::{distance_to_span, invariant_subspace_demo, muntz_sum, Family, Witness};
use crate::discretize::{build_matrix, match_ladder, Grid, MAX_GRID};
use crate::eigensystem::{eigenvalue, f_coeffs, g_terms, AlphaParam};
use crate::operator::{residual_f, residual_g, SubstitutionMap};
use crate::qseries::{fq_product, fq_series, QParam};
use crate::quadrature::QuadratureSpec;
use crate::report::{Report, Table};
use crate::spectrum::dense_eigenvalues;
use crate::zeros::{f_zeros, g_zero_scan, interlace_report, pn_roots, RootSet};
use crate::{Precision, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Closed-form eigenvalues lambda_1..lambda_n
    Spectrum,
    /// Coefficients and samples of f_n or g_n
    Eigenfun,
    /// L² eigen-residuals for n = 1..n
    Residuals,
    /// Collocation matrix of V_phi and its leading eigenvalues
    Discretize,
    /// Zeros of f_n, P_n or g_n
    Zeros,
    /// F_q product against series at (q, z)
    Qcheck,
    /// Distance to span{f_n} or span{g_n}, Müntz series, compressed spectrum
    Completeness,
    /// The full acceptance suite
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Eigenfun => "eigenfun",
            Command::Residuals => "residuals",
            Command::Discretize => "discretize",
            Command::Zeros => "zeros",
            Command::Qcheck => "qcheck",
            Command::Completeness => "completeness",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    ForAlpha,
    Uniform,
    Graded,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    F,
    P,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    F,
    G,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::F => Family::F,
            FamilyArg::G => Family::G,
        }
    }
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "volterra", version, about = "Spectral theory of f -> ∫_0^{x^alpha} f on L²(0, 1)")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0.5, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, global = true, default_value_t = 5)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 512, value_parser = parse_grid_size)]
    pub grid_size: usize,
    /// Contract tolerance (defaults per command)
    #[arg(long, global = true, value_parser = parse_tol)]
    pub tol: Option<f64>,
    #[arg(long, global = true, env = "VOLTERRA_PRECISION", default_value = "double")]
    pub precision: Precision,
    #[arg(long = "format", global = true, value_enum, default_value = "json")]
    pub output_format: OutputFormat,
    #[arg(long = "output", short = 'o', global = true)]
    pub output_path: Option<PathBuf>,

    /// q-series base (defaults to alpha)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long, global = true, default_value = "power", value_parser = ["power", "identity", "flipped", "square", "half"])]
    pub map: String,
    #[arg(long, global = true, value_enum, default_value = "for-alpha")]
    pub grid: GridKind,
    /// Grading exponent for graded and symmetric grids
    #[arg(long, global = true, default_value_t = 2.0)]
    pub gamma: f64,
    /// Number of leading eigenvalues
    #[arg(long, global = true, default_value_t = 5)]
    pub k: usize,
    #[arg(long, global = true, value_enum, default_value = "f")]
    pub family: FamilyArg,
    /// one | power:P | f:N | g:N | one-minus-g:M
    #[arg(long, global = true, default_value = "one", value_parser = parse_witness)]
    pub witness: Witness,
    /// Müntz series length
    #[arg(long, global = true, default_value_t = 40)]
    pub terms: usize,
    /// Adjoint eigenfunctions removed in the compressed-spectrum demo
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Residual mesh or zero-scan mesh size
    #[arg(long, global = true, default_value_t = 256)]
    pub mesh: usize,
    /// Sample points for eigenfun
    #[arg(long, global = true, default_value_t = 11)]
    pub points: usize,
    #[arg(long, global = true, value_enum, default_value = "f")]
    pub kind: ZeroKind,
    /// Binary export of the collocation matrix
    #[arg(long, global = true)]
    pub matrix_out: Option<PathBuf>,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    AlphaParam::new(a).map(|p| p.value()).map_err(|e| e.to_string())
}

fn parse_grid_size(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if !(2..=MAX_GRID).contains(&n) {
        return Err(format!("grid size must lie in 2..={MAX_GRID}"));
    }
    Ok(n)
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err("tolerance must be positive".into());
    }
    Ok(t)
}

fn parse_witness(s: &str) -> std::result::Result<Witness, String> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let int = || arg.parse::<usize>().map_err(|e| format!("witness `{s}`: {e}"));
    match kind {
        "one" if arg.is_empty() => Ok(Witness::One),
        "power" => Ok(Witness::Power {
            p: arg.parse().map_err(|e| format!("witness `{s}`: {e}"))?,
        }),
        "f" => Ok(Witness::FMember { n: int()? }),
        "g" => Ok(Witness::GMember { n: int()? }),
        "one-minus-g" => Ok(Witness::OneMinusGProjection { m: int()? }),
        _ => Err(format!("unknown witness `{s}`")),
    }
}

impl RunConfig {
    fn alpha_param(&self) -> AlphaParam {
        AlphaParam::new(self.alpha).expect("validated at parse time")
    }
}

/// Runs the configured pipeline. Module errors end up in `errors`.
pub fn run(config: &RunConfig) -> Report {
    let params = serde_json::to_value(config).expect("config serializes");
    let mut report = Report::new(config.command.name(), params);
    let outcome = match config.command {
        Command::Spectrum => spectrum(config, &mut report),
        Command::Eigenfun => eigenfun(config, &mut report),
        Command::Residuals => residuals(config, &mut report),
        Command::Discretize => discretize(config, &mut report),
        Command::Zeros => zeros(config, &mut report),
        Command::Qcheck => qcheck(config, &mut report),
        Command::Completeness => completeness(config, &mut report),
        Command::Report => suite(&mut report),
    };
    if let Err(e) = outcome {
        report.error(&e);
    }
    report
}

fn spectrum(c: &RunConfig, r: &mut Report) -> Result<()> {
    let values = (1..=c.n).map(|n| eigenvalue(c.alpha_param(), n)).collect::<Result<Vec<f64>>>()?;
    r.table = Table::new(["n", "eigenvalue"]);
    for (i, v) in values.iter().enumerate() {
        r.table.push(vec![(i + 1) as f64, *v]);
    }
    r.results = json!(values);
    Ok(())
}

fn sample_points(count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}

fn eigenfun(c: &RunConfig, r: &mut Report) -> Result<()> {
    let a = c.alpha_param();
    let xs = sample_points(c.points);
    match c.family {
        FamilyArg::F => {
            let f = f_coeffs(a, c.n)?;
            r.table = Table::new(["x", "value"]);
            for &x in &xs {
                r.table.push(vec![x, f.eval(x)?]);
            }
            r.results = json!({ "eigenfunction": f, "samples": r.table.rows });
        }
        FamilyArg::G => {
            let tol = c.tol.unwrap_or(1e-18);
            r.tolerance("truncation", tol);
            let g = g_terms(a, c.n, tol, c.precision)?;
            r.table = Table::new(["x", "value", "error_bound"]);
            for &x in &xs {
                let v = g.eval(x)?;
                r.table.push(vec![x, v.value, v.error_bound]);
            }
            let end = g.eval(1.0)?;
            r.check(end.value.abs() <= end.error_bound, format!("|g_{}(1)| = {:e} exceeds its bound {:e}", c.n, end.value.abs(), end.error_bound));
            r.results = json!({ "eigenfunction": g, "samples": r.table.rows });
        }
    }
    Ok(())
}

fn residuals(c: &RunConfig, r: &mut Report) -> Result<()> {
    let a = c.alpha_param();
    let tol = c.tol.unwrap_or(1e-8);
    let quad = QuadratureSpec::default();
    r.tolerance("residual", tol);
    r.tolerance("quadrature_abs_tol", quad.abs_tol);
    r.table = Table::new(["n", "residual"]);
    for n in 1..=c.n {
        let res = match c.family {
            FamilyArg::F => residual_f(a, n, &quad, c.mesh)?,
            FamilyArg::G => residual_g(a, n, &quad, c.mesh, c.precision)?,
        };
        r.check(res < tol, format!("residual of n = {n} is {res:e}, above {tol:e}"));
        r.table.push(vec![n as f64, res]);
    }
    r.results = json!({
        "family": c.family,
        "residuals": r.table.rows.iter().map(|row| json!({ "n": row[0] as usize, "residual": row[1] })).collect::<Vec<_>>(),
    });
    Ok(())
}

fn discretize(c: &RunConfig, r: &mut Report) -> Result<()> {
    let a = c.alpha_param();
    let phi = SubstitutionMap::from_name(&c.map, a)?;
    let grid = match c.grid {
        GridKind::ForAlpha => Grid::for_alpha(a, c.grid_size)?,
        GridKind::Uniform => Grid::uniform(c.grid_size)?,
        GridKind::Graded => Grid::graded(c.grid_size, c.gamma)?,
        GridKind::Symmetric => Grid::symmetric(c.grid_size, c.gamma)?,
    };
    let m = build_matrix(&phi, &grid)?;
    if let Some(path) = &c.matrix_out {
        m.write_binary(BufWriter::new(File::create(path)?))?;
    }
    let ev = dense_eigenvalues(&m.entries)?;
    let k = c.k.min(ev.len());
    r.table = Table::new(["index", "re", "im", "modulus"]);
    for (i, v) in ev.iter().take(k).enumerate() {
        r.table.push(vec![(i + 1) as f64, v.re, v.im, v.modulus()]);
    }
    let ladder = match phi.ladder_alpha() {
        Some(la) => Some(match_ladder(&ev, AlphaParam::new(la)?, k, m.norm_inf())?),
        None => None,
    };
    r.results = json!({
        "map": phi.name(),
        "grid": c.grid,
        "size": m.size(),
        "spectral_radius": ev.first().map(|v| v.modulus()).unwrap_or(0.0),
        "eigenvalues": &ev[..k],
        "ladder": ladder,
    });
    Ok(())
}

fn root_table(set: &RootSet) -> Table {
    let mut t = Table::new(["index", "value", "residual"]);
    for (i, (v, res)) in set.values.iter().zip(&set.residuals).enumerate() {
        t.push(vec![(i + 1) as f64, *v, *res]);
    }
    t
}

fn zeros(c: &RunConfig, r: &mut Report) -> Result<()> {
    let a = c.alpha_param();
    r.tolerance("realness", 1e-9);
    r.tolerance("interlace_tie", 1e-12);
    match c.kind {
        ZeroKind::F | ZeroKind::P => {
            let (set, prev) = if c.kind == ZeroKind::F {
                let set = f_zeros(a, c.n)?;
                r.check(set.len() == c.n, format!("f_{} has {} zeros, expected {}", c.n, set.len(), c.n));
                let prev = if c.n >= 2 { Some(f_zeros(a, c.n - 1)?) } else { None };
                (set, prev)
            } else {
                let q = QParam::new(c.q.unwrap_or(c.alpha))?;
                let set = pn_roots(q, c.n)?;
                let prev = if c.n >= 2 { Some(pn_roots(q, c.n - 1)?) } else { None };
                (set, prev)
            };
            r.check(set.certified_real, "roots not certified real");
            let interlace = prev.map(|p| interlace_report(&p, &set)).transpose()?;
            if let Some(rep) = &interlace {
                r.check(rep.holds, format!("zeros of degree {} and {} do not interlace", c.n - 1, c.n));
            }
            r.table = root_table(&set);
            r.results = json!({ "roots": set, "interlace_with_previous": interlace });
        }
        ZeroKind::G => {
            let scan = g_zero_scan(a, c.n, c.mesh, c.precision)?;
            r.warnings.push("exploratory scan: the zero count is reported, not asserted".into());
            r.table = root_table(&scan.roots);
            r.results = json!(scan);
        }
    }
    Ok(())
}

fn qcheck(c: &RunConfig, r: &mut Report) -> Result<()> {
    let q = QParam::new(c.q.unwrap_or(c.alpha))?;
    let tol = c.tol.unwrap_or(1e-12);
    r.tolerance("agreement", tol);
    let p = fq_product(q, c.z, 1e-17)?;
    let s = fq_series(q, c.z, 1e-17)?;
    let scaled = (p - s).abs() / (1.0 + p.abs());
    r.check(scaled <= tol, format!("product and series differ by {scaled:e}"));
    r.table = Table::new(["q", "z", "product", "series", "scaled_difference"]);
    r.table.push(vec![q.value(), c.z, p, s, scaled]);
    r.results = json!({ "q": q.value(), "z": c.z, "product": p, "series": s, "scaled_difference": scaled });
    Ok(())
}

fn completeness(c: &RunConfig, r: &mut Report) -> Result<()> {
    let a = c.alpha_param();
    let quad = QuadratureSpec::default();
    r.tolerance("monotone_slack", 1e-10);
    let gram = distance_to_span(c.witness, c.family.into(), a, c.n, &quad)?;
    if gram.precision_flag {
        r.warnings.push(format!("Gram condition {:e} exceeds 1e15; tail distances are roundoff-limited", gram.condition_estimate));
    } else {
        r.check(gram.is_monotone(1e-10), "distance profile increases");
    }
    let muntz = muntz_sum(a, c.terms)?;
    let demo = match c.m {
        Some(m) => {
            let radius = invariant_subspace_demo(a, m, c.grid_size)?;
            let cap = 1.1 * eigenvalue(a, m + 1)?;
            r.tolerance("compressed_radius_factor", 1.1);
            r.check(radius <= cap, format!("compressed spectral radius {radius:e} above {cap:e}"));
            Some(json!({ "m": m, "size": c.grid_size, "spectral_radius": radius, "cap": cap }))
        }
        None => None,
    };
    r.table = Table::new(["n", "distance"]);
    for &(n, d) in &gram.distance_profile {
        r.table.push(vec![n as f64, d]);
    }
    r.results = json!({ "gram": gram, "muntz": muntz, "compressed": demo });
    Ok(())
}

fn suite(r: &mut Report) -> Result<()> {
    let s = run_suite();
    for c in &s.criteria {
        r.check(c.passed, format!("criterion {} ({}) failed", c.id, c.name));
    }
    r.table = Table::new(["criterion", "passed"]);
    for c in &s.criteria {
        r.table.push(vec![f64::from(c.id), f64::from(u8::from(c.passed))]);
    }
    r.results = json!(s);
    Ok(())
}

fn emit(config: &RunConfig, report: &Report) -> io::Result<()> {
    let mut out: Box<dyn Write> = match &config.output_path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    match config.output_format {
        OutputFormat::Json => out.write_all(report.to_json().as_bytes())?,
        OutputFormat::Csv => report.table.write_csv(&mut out).map_err(|e| io::Error::other(e.to_string()))?,
    }
    out.flush()
}

/// Parses `args`, runs, writes the report; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let report = run(&config);
    if config.output_format == OutputFormat::Csv {
        for e in &report.errors {
            eprintln!("error: {e}");
        }
    }
    if let Err(e) = emit(&config, &report) {
        eprintln!("error: cannot write report: {e}");
        return 1;
    }
    report.exit_code()
}
