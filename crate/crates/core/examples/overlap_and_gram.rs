// Overlaps of multi-mode coherent states and the Gram matrix of an ensemble.

use coherent_gram::types::{coherent_overlap, normalize_first_to_vacuum};
use coherent_gram::{gram_of_ensemble, CoherentEnsemble, CoherentState};
use nalgebra::DVector;
use num_complex::Complex64;

pub fn run() -> Result<f64, Box<dyn std::error::Error>> {
    let c = Complex64::new;
    let states = vec![
        CoherentState::new(0.3, DVector::from_vec(vec![c(0.5, 0.0), c(0.0, -0.2)])),
        CoherentState::new(1.1, DVector::from_vec(vec![c(-0.4, 0.7), c(0.1, 0.1)])),
        CoherentState::new(-2.0, DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.5)])),
    ];
    let ensemble = CoherentEnsemble::new(states)?;

    let z = coherent_overlap(&ensemble.states()[0], &ensemble.states()[1])?;
    println!("<psi_0|psi_1> = {z:.6} (modulus {:.6})", z.norm());

    let gram = gram_of_ensemble(&ensemble);
    println!("Gram matrix: {:.4}", gram.matrix());
    println!("smallest eigenvalue: {:.3e}", gram.min_eigenvalue());

    // Translating all amplitudes and compensating the phases leaves the Gram matrix unchanged.
    let shifted = normalize_first_to_vacuum(&ensemble);
    let drift = coherent_gram::linalg::max_abs_diff(gram_of_ensemble(&shifted).matrix(), gram.matrix());
    println!(
        "first amplitude after normalization: {:.3e}",
        shifted.states()[0].amplitude.norm()
    );
    println!("Gram change under normalization: {drift:.3e}");
    Ok(drift)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
