//! Leading eigenvalues of collocation matrices converging to (1-alpha) alpha^{n-1}.

use volterra::{convergence_study, AlphaParam};

fn main() -> volterra::Result<()> {
    let alpha = AlphaParam::new(0.5)?;
    let table = convergence_study(alpha, &[64, 128, 256, 512], 4)?;
    for row in &table.rows {
        let errs: Vec<String> = row.ladder.relative_errors.iter().map(|e| format!("{e:.1e}")).collect();
        println!("N={:4}  moduli {:.6?}  rel. errors {errs:?}", row.size, row.ladder.moduli);
    }
    println!("ratios at N=512: {:.6?}", table.ladder_ratios());
    println!("top error non-increasing: {}", table.top_error_monotone);
    Ok(())
}
