// Approximate a block-diagonal target by displacing each block in its own
// marker mode; off-block overlaps decay like exp(-A^2).

use coherent_gram::closure::{approximate_block_diagonal, block_diagonal, displacement_for_epsilon};
use coherent_gram::generators::{random_ensemble, RandomSpec};
use coherent_gram::{gram_of_ensemble, linalg};

/// Returns the achieved error for each requested tolerance.
pub fn run() -> Result<Vec<(f64, f64)>, Box<dyn std::error::Error>> {
    let blocks = vec![
        random_ensemble(&RandomSpec {
            seed: 21,
            n: 2,
            m: 2,
            scale: 1.0,
        })?,
        random_ensemble(&RandomSpec {
            seed: 22,
            n: 3,
            m: 1,
            scale: 1.0,
        })?,
    ];
    let target = block_diagonal(&blocks.iter().map(gram_of_ensemble).collect::<Vec<_>>())?;
    let mut achieved = Vec::new();
    for eps in [1e-2, 1e-6, 1e-10] {
        let a = displacement_for_epsilon(eps)?;
        let approx = approximate_block_diagonal(&blocks, a)?;
        let error = linalg::max_abs_diff(gram_of_ensemble(&approx).matrix(), target.matrix());
        println!(
            "eps = {eps:.0e}: A = {a:.4}, {} modes, error {error:.3e}",
            approx.modes()
        );
        achieved.push((eps, error));
    }
    Ok(achieved)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
