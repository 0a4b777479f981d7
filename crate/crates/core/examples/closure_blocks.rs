// Limits of coherent-state Gram matrices: block structure decides.

use coherent_gram::closure::{block_diagonal, ClosureReason, ClosureVerdict};
use coherent_gram::generators::{mub_gram, random_gram};
use coherent_gram::types::{rearrange, ComplexMatrix, Permutation};
use coherent_gram::{
    check_closure_membership, check_membership, BranchSpec, ClosureOptions, GramMatrix, MembershipOptions,
};

/// Returns `(identity in closure, MUB in closure, shuffled blocks in closure)`.
pub fn run() -> Result<(bool, bool, bool), Box<dyn std::error::Error>> {
    let branch = BranchSpec::default();
    let opts = ClosureOptions::default();

    let identity = GramMatrix::from_raw(ComplexMatrix::identity(4, 4))?;
    let exact = check_membership(&identity, &branch, &MembershipOptions::default())?;
    let limit = check_closure_membership(&identity, &branch, &opts)?;
    println!(
        "identity: exact member {}, limit member {}",
        exact.is_member(),
        limit.is_member()
    );

    let mub = mub_gram(2)?;
    let mub_result = check_closure_membership(&mub, &branch, &opts)?;
    if let Some(ClosureReason::InconsistentZeroPattern { i, j, k }) = mub_result.reason() {
        println!("standard + Fourier bases: P[{i}][{k}] and P[{k}][{j}] are nonzero but P[{i}][{j}] = 0");
    }

    let target = block_diagonal(&[random_gram(1, 2, 2, 1.0)?, random_gram(2, 3, 2, 1.0)?])?;
    let shuffled = rearrange(&target, &Permutation::new(vec![3, 0, 4, 1, 2])?)?;
    let blocks = check_closure_membership(&shuffled, &branch, &opts)?;
    if let ClosureVerdict::Member { permutation, blocks } = &blocks.verdict {
        let sizes: Vec<_> = blocks.iter().map(|b| b.indices.clone()).collect();
        println!(
            "shuffled blocks recovered as {sizes:?} via permutation {:?}",
            permutation.as_slice()
        );
    }
    Ok((limit.is_member(), mub_result.is_member(), blocks.is_member()))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run().map(|_| ())
}
