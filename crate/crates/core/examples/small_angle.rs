// When all overlaps are close to 1, the columns of the square root of `P`
// used directly as amplitudes give a second-order accurate realization.

use coherent_gram::generators::equiangular_gram;
use coherent_gram::membership::small_angle_embedding;
use coherent_gram::{gram_of_ensemble, linalg, BranchSpec};

/// Returns `(1 - r, entrywise error)` pairs.
pub fn run() -> Result<Vec<(f64, f64)>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    for gap in [1e-1, 1e-2, 1e-3, 1e-4] {
        let p = equiangular_gram(4, 1.0 - gap)?;
        let e = small_angle_embedding(&p, &BranchSpec::default())?;
        let error = linalg::max_abs_diff(gram_of_ensemble(&e).matrix(), p.matrix());
        println!(
            "1 - r = {gap:.0e}: error {error:.3e} (error / gap^2 = {:.3})",
            error / (gap * gap)
        );
        out.push((gap, error));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
