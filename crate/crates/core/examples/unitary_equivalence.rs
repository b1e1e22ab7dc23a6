//! x^alpha and 1 - (1-x)^{1/alpha} give unitarily equivalent operators; the
//! reflection x -> 1-x conjugates one matrix into a discretization of the other.

use volterra::spectrum::dense_eigenvalues;
use volterra::{build_matrix, flip_conjugate, spectrum, AlphaParam, Grid, SubstitutionMap};

fn main() -> volterra::Result<()> {
    let alpha = AlphaParam::new(0.5)?;
    let grid = Grid::for_alpha(alpha, 512)?;
    let power = build_matrix(&SubstitutionMap::power(alpha), &grid)?;
    let flipped = build_matrix(&SubstitutionMap::flipped_power(alpha), &grid)?;
    let a = spectrum(&power, 5)?;
    let b = spectrum(&flipped, 5)?;
    for (x, y) in a.iter().zip(&b) {
        println!("{:.8}  {:.8}", x.modulus(), y.modulus());
    }

    // exact similarity on a mirror-symmetric grid
    let sym = Grid::symmetric(256, 2.0)?;
    let m = build_matrix(&SubstitutionMap::power(alpha), &sym)?;
    let c = flip_conjugate(&m)?;
    let top = |v: &volterra::VMatrix| dense_eigenvalues(&v.entries).map(|e| e[0].modulus());
    println!("flip-conjugated top modulus: {:.12} vs {:.12}", top(&m)?, top(&c)?);
    Ok(())
}
