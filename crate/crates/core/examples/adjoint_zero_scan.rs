//! Exploratory: sign changes of g_n on [0, 1]. The count is only reported.

use volterra::{g_zero_scan, AlphaParam, Precision};

fn main() -> volterra::Result<()> {
    let alpha = AlphaParam::new(0.5)?;
    for n in 1..=5 {
        let s = g_zero_scan(alpha, n, 4000, Precision::Double)?;
        println!(
            "g_{n}: {} interior zeros {:.6?}, zero at x=1: {}, (conjectured {})",
            s.interior_count,
            &s.roots.values[..s.interior_count],
            s.endpoint_zero_at_one,
            s.conjectured_count
        );
    }
    Ok(())
}
