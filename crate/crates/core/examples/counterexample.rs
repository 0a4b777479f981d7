// Three equiangular unit vectors at overlap -1/2: a valid Gram matrix whose
// log-moduli form a distance matrix, yet no coherent states realize it.

use coherent_gram::edm::edm_necessary_check;
use coherent_gram::generators::equiangular_gram;
use coherent_gram::membership::NotMemberReason;
use coherent_gram::{check_membership, BranchSpec, MembershipOptions};

/// Returns `(passes necessary check, is member)`.
pub fn run() -> Result<(bool, bool), Box<dyn std::error::Error>> {
    let p = equiangular_gram(3, -0.5)?;
    let branch = BranchSpec::default();
    println!("smallest eigenvalue of P: {:.3e}", p.min_eigenvalue());

    let necessary = edm_necessary_check(&p, &branch)?;
    println!("log|P| is a distance matrix: {necessary}");

    let result = check_membership(&p, &branch, &MembershipOptions::default())?;
    match result.reason() {
        Some(NotMemberReason::Exhausted { candidates }) => println!(
            "not a member: all {candidates} winding matrices fail (branch start shifted to {:.4})",
            result.branch_beta
        ),
        other => println!("unexpected outcome: {other:?}"),
    }
    Ok((necessary, result.is_member()))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
