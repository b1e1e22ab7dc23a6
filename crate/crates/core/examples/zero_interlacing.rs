//! Real positive zeros of P_n and interlacing zeros of f_n in [0, 1].

use volterra::zeros::interlace_report;
use volterra::{check_interlace, f_zeros, pn_roots, AlphaParam, QParam};

fn main() -> volterra::Result<()> {
    let q = QParam::new(0.3)?;
    let r = pn_roots(q, 6)?;
    println!("P_6 zeros (q=0.3): {:.6?}  certified real: {}", r.values, r.certified_real);
    println!("interlaces P_5: {}", check_interlace(&pn_roots(q, 5)?, &r)?);

    let alpha = AlphaParam::new(0.5)?;
    for n in 1..=5 {
        println!("f_{n}: {:.6?}", f_zeros(alpha, n)?.values);
    }
    let rep = interlace_report(&f_zeros(alpha, 4)?, &f_zeros(alpha, 5)?)?;
    println!("f_4 / f_5 interlace: {} (shared zero at 0 excluded: {})", rep.holds, rep.shared_zero_excluded);
    Ok(())
}
