//! Maps with phi(x) <= x give quasinilpotent operators: the discrete spectral
//! radius shrinks like 1/N. The power map keeps its radius 1 - alpha.

use volterra::spectrum::spectral_radius;
use volterra::{build_matrix, AlphaParam, Grid, SubstitutionMap};

fn main() -> volterra::Result<()> {
    let maps = [
        ("identity", SubstitutionMap::Identity),
        ("x^2", SubstitutionMap::Square),
        ("x/2", SubstitutionMap::half()),
        ("x^0.5", SubstitutionMap::power(AlphaParam::new(0.5)?)),
    ];
    for (name, phi) in &maps {
        let radii = [64, 128, 256, 512]
            .iter()
            .map(|&n| spectral_radius(&build_matrix(phi, &Grid::uniform(n)?)?.entries))
            .collect::<volterra::Result<Vec<f64>>>()?;
        let radii: Vec<String> = radii.iter().map(|r| format!("{r:.3e}")).collect();
        println!("{name:>8}: {}", radii.join("  "));
    }
    Ok(())
}
