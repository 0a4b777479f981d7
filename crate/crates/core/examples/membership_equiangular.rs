// Equiangular Gram matrices with a positive common overlap are realizable.

use coherent_gram::generators::equiangular_gram;
use coherent_gram::{check_membership, BranchSpec, MembershipOptions};

/// Returns the largest deviation of a witness distance from `2 ln(1/r)`.
pub fn run() -> Result<f64, Box<dyn std::error::Error>> {
    let mut worst: f64 = 0.0;
    for (n, r) in [(3, 0.5), (4, 0.9), (6, 0.1)] {
        let p = equiangular_gram(n, r)?;
        let opts = MembershipOptions {
            max_candidates: u64::MAX,
            ..MembershipOptions::default()
        };
        let result = check_membership(&p, &BranchSpec::default(), &opts)?;
        let witness = result.witness().ok_or("equiangular matrix should be a member")?;
        let states = witness.ensemble.states();
        for i in 0..n {
            for j in 0..i {
                let d = (&states[i].amplitude - &states[j].amplitude).norm_squared();
                worst = worst.max((d - 2.0 * (1.0 / r).ln()).abs());
            }
        }
        println!(
            "n = {n}, r = {r}: member after {} candidate(s), {} pruned; winding numbers {:?}",
            result.stats.candidates_examined,
            result.stats.pruned,
            witness.n_matrix.to_rows()
        );
    }
    println!("max deviation of |a_i - a_j|^2 from 2 ln(1/r): {worst:.3e}");
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
