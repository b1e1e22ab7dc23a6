//! {f_n} is complete, {g_n} is not; compressing V_alpha to span{g_n}^⊥
//! strips the eigenvalues one by one.

use volterra::completeness::muntz_floor;
use volterra::{distance_to_span, invariant_subspace_demo, muntz_sum, AlphaParam, Family, QuadratureSpec, Witness};

fn main() -> volterra::Result<()> {
    let alpha = AlphaParam::new(0.5)?;
    let quad = QuadratureSpec::default();

    let f = distance_to_span(Witness::One, Family::F, alpha, 10, &quad)?;
    let f: Vec<String> = f.distance_profile.iter().map(|p| format!("{:.3e}", p.1)).collect();
    println!("dist(1, f_1..f_N): {}", f.join(" "));

    let g = distance_to_span(Witness::Power { p: 1.0 }, Family::G, alpha, 8, &quad)?;
    println!("dist(x, g_1..g_N): {:.5?}", g.distance_profile.iter().map(|p| p.1).collect::<Vec<_>>());
    println!("  never below the Müntz floor {:.5}", muntz_floor(alpha, 1.0));

    let s = muntz_sum(alpha, 30)?;
    println!("Σ 1/mu_k -> {:.10}, ratio -> {:.10}", s.partial_sums.last().unwrap(), s.ratio_limit);

    for m in 0..=3 {
        println!("m={m}: compressed spectral radius {:.6}", invariant_subspace_demo(alpha, m, 256)?);
    }
    Ok(())
}
