//! F_q as a product and as a series, its zeros at q^{-(n+1)}, and P_n.

use volterra::eigensystem::s1_check;
use volterra::qseries::fq_root_check;
use volterra::{fq_product, fq_series, pn_coeffs, AlphaParam, Precision, QParam};

fn main() -> volterra::Result<()> {
    let q = QParam::new(0.5)?;
    for z in [-3.0, 0.5, 1.0, 7.5] {
        let p = fq_product(q, z, 1e-17)?;
        let s = fq_series(q, z, 1e-17)?;
        println!("F_0.5({z:>4}) = {p:+.15e}  (series {s:+.15e}, diff {:.1e})", (p - s).abs());
    }

    let a = AlphaParam::new(0.5)?;
    for n in 0..4 {
        println!(
            "n={n}: F(alpha^-(n+1)) = {:+.1e}, S_1 = {:.15}",
            fq_root_check(a, n),
            s1_check(a, n, Precision::Extended)?
        );
    }

    let p3 = pn_coeffs(q, 3)?;
    println!("P_3 coefficients: {:?}", p3.coeffs);
    Ok(())
}
