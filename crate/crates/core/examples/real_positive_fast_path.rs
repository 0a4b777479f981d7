// For real positive matrices the membership question reduces to a single
// distance-matrix test on the entrywise logarithm.

use coherent_gram::{check_membership, check_membership_real_positive, BranchSpec, GramMatrix, MembershipOptions};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn real(rows: &[[f64; 3]; 3]) -> Result<GramMatrix, coherent_gram::Error> {
    GramMatrix::from_raw(DMatrix::from_fn(3, 3, |i, j| Complex64::new(rows[i][j], 0.0)))
}

/// Returns the verdicts of both procedures for each sample matrix.
pub fn run() -> Result<Vec<(bool, bool)>, Box<dyn std::error::Error>> {
    let samples = [
        (
            "equiangular 0.4",
            real(&[[1.0, 0.4, 0.4], [0.4, 1.0, 0.4], [0.4, 0.4, 1.0]])?,
        ),
        (
            "chain 0.9/0.9/0.63",
            real(&[[1.0, 0.9, 0.63], [0.9, 1.0, 0.9], [0.63, 0.9, 1.0]])?,
        ),
        (
            "chain 0.9/0.9/0.8",
            real(&[[1.0, 0.9, 0.8], [0.9, 1.0, 0.9], [0.8, 0.9, 1.0]])?,
        ),
    ];
    let branch = BranchSpec::default();
    let mut verdicts = Vec::new();
    for (name, p) in &samples {
        let fast = check_membership_real_positive(p, &branch)?;
        let general = check_membership(p, &branch, &MembershipOptions::default())?;
        println!(
            "{name}: fast path {}, general search {} ({} candidates examined)",
            fast.is_member(),
            general.is_member(),
            general.stats.candidates_examined
        );
        verdicts.push((fast.is_member(), general.is_member()));
    }
    Ok(verdicts)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
