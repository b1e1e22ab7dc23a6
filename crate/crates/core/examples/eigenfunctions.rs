//! The eigenfunctions f_n of V_alpha and g_n of its adjoint.

use volterra::{eigenvalue, f_coeffs, g_terms, AlphaParam, Precision};

fn main() -> volterra::Result<()> {
    let alpha = AlphaParam::new(0.5)?;
    for n in 1..=4 {
        let f = f_coeffs(alpha, n)?;
        println!("lambda_{n} = {}   f_{n}: ln-coefficients {:?}", eigenvalue(alpha, n)?, f.coeffs);
    }

    let g = g_terms(alpha, 3, 1e-18, Precision::Double)?;
    println!("g_3: {} terms, cancellation ratio {:.2e}", g.terms.len(), g.cancellation_ratio);
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let v = g.eval(x)?;
        println!("  g_3({x:.2}) = {:+.12} ± {:.1e}", v.value, v.error_bound);
    }

    // beyond the double-precision budget: refused, then served in extended precision
    let alpha = AlphaParam::new(0.25)?;
    match g_terms(alpha, 7, 1e-18, Precision::Double) {
        Err(e) => println!("double: {e}"),
        Ok(_) => unreachable!(),
    }
    let g7 = g_terms(alpha, 7, 1e-18, Precision::Extended)?;
    println!("extended: g_7(0.5) = {:+.10}", g7.eval(0.5)?.value);
    Ok(())
}
