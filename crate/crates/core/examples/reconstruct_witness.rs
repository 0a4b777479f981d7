// Recover an explicit ensemble from the Gram matrix of a random one.

use coherent_gram::generators::{random_ensemble, RandomSpec};
use coherent_gram::linalg;
use coherent_gram::{check_membership, gram_of_ensemble, BranchSpec, Centering, MembershipOptions};

/// Returns the round-trip error and the numerical rank of the mean-centered witness.
pub fn run() -> Result<(f64, usize), Box<dyn std::error::Error>> {
    let original = random_ensemble(&RandomSpec {
        seed: 7,
        n: 5,
        m: 3,
        scale: 0.8,
    })?;
    let p = gram_of_ensemble(&original);

    let opts = MembershipOptions {
        max_candidates: u64::MAX,
        ..MembershipOptions::default()
    };
    let result = check_membership(&p, &BranchSpec::default(), &opts)?;
    let witness = result.witness().ok_or("a sampled Gram matrix is always a member")?;
    let error = linalg::max_abs_diff(gram_of_ensemble(&witness.ensemble).matrix(), p.matrix());
    println!(
        "candidate space {}, examined {}, pruned {}; round-trip error {error:.3e}",
        result.stats.candidate_space, result.stats.candidates_examined, result.stats.pruned
    );
    println!(
        "witness modes: {} (original had {})",
        witness.ensemble.modes(),
        original.modes()
    );

    // Centering on the mean gives amplitudes spanning at most n - 1 dimensions.
    let opts = MembershipOptions {
        centering: Centering::Mean,
        ..opts
    };
    let mean = check_membership(&p, &BranchSpec::default(), &opts)?;
    let w = mean.witness().ok_or("centering does not change the verdict")?;
    let amps = nalgebra::DMatrix::from_columns(
        &w.ensemble
            .states()
            .iter()
            .map(|s| s.amplitude.clone())
            .collect::<Vec<_>>(),
    );
    let x = amps.adjoint() * &amps;
    let rank = linalg::hermitian_eigenvalues(&x)
        .iter()
        .filter(|&&v| v > mean.tol_eig)
        .count();
    println!("mean-centered witness spans {rank} dimensions for n = {}", p.n());
    Ok((error, rank))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
