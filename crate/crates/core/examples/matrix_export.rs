//! Round trip of the binary matrix format.

use volterra::{build_matrix, AlphaParam, Grid, SubstitutionMap, VMatrix};

fn main() -> volterra::Result<()> {
    let alpha = AlphaParam::new(0.4)?;
    let m = build_matrix(&SubstitutionMap::power(alpha), &Grid::for_alpha(alpha, 32)?)?;
    let mut bytes = Vec::new();
    m.write_binary(&mut bytes)?;
    let back = VMatrix::read_binary(bytes.as_slice())?;
    println!("{} bytes, size {}, identical: {}", bytes.len(), back.size(), back.entries == m.entries);
    Ok(())
}
