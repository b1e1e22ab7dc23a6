//! Eigen-residuals ||V f_n - lambda_n f_n|| / ||f_n|| by quadrature.

use volterra::{residual_f, residual_g, AlphaParam, Precision, QuadratureSpec};

fn main() -> volterra::Result<()> {
    let quad = QuadratureSpec::default();
    for a in [0.25, 0.5, 0.75] {
        let alpha = AlphaParam::new(a)?;
        let f: Vec<String> = (1..=6).map(|n| residual_f(alpha, n, &quad, 128).map(|r| format!("{r:.1e}"))).collect::<Result<_, _>>()?;
        let g: Vec<String> = (1..=4)
            .map(|n| residual_g(alpha, n, &quad, 128, Precision::Double).map(|r| format!("{r:.1e}")))
            .collect::<Result<_, _>>()?;
        println!("alpha={a}: f {f:?}\n           g {g:?}");
    }
    Ok(())
}
