//! Entrywise logarithm on an explicit branch, and entrywise exponential.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{BranchSpec, ComplexMatrix};

/// Arguments this close to the branch cut are snapped to the branch start.
pub const TOL_ARG: f64 = 1e-12;

/// Entrywise logarithm together with the branch it was taken on.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedLogMatrix {
    pub matrix: ComplexMatrix,
    pub branch: BranchSpec,
}

/// Argument of `z` mapped into `[beta, beta + 2pi)`.
pub fn arg_on_branch(z: Complex64, beta: f64) -> f64 {
    let raw = z.im.atan2(z.re);
    let mut a = raw - TAU * ((raw - beta) / TAU).floor();
    // floor can leave us one period off when raw - beta is a hair below a multiple of 2pi
    if a >= beta + TAU {
        a -= TAU;
    } else if a < beta {
        a += TAU;
    }
    if a - beta < TOL_ARG || beta + TAU - a <= TOL_ARG {
        a = beta;
    }
    a
}

/// Distance from `arg z` to the cut at `beta`, measured on the circle.
pub fn distance_to_cut(z: Complex64, beta: f64) -> f64 {
    let raw = z.im.atan2(z.re);
    let d = (raw - beta).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `log|z| + i arg_beta(z)`.
pub fn log_on_branch(z: Complex64, beta: f64) -> Complex64 {
    Complex64::new(z.norm().ln(), arg_on_branch(z, beta))
}

pub fn hadamard_log(m: &ComplexMatrix, branch: &BranchSpec) -> Result<BranchedLogMatrix> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let modulus = m[(i, j)].norm();
            if modulus <= branch.tol_zero {
                return Err(Error::ZeroEntry { i, j, modulus });
            }
        }
    }
    Ok(BranchedLogMatrix {
        matrix: m.map(|z| log_on_branch(z, branch.beta)),
        branch: *branch,
    })
}

pub fn hadamard_exp(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_of_ones_is_zero() {
        let m = ComplexMatrix::from_element(3, 3, c(1.0, 0.0));
        let l = hadamard_log(&m, &BranchSpec::default()).unwrap();
        assert!(l.matrix.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn log_of_real_positive() {
        let e = (-1.0f64).exp();
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(e, 0.0), c(e, 0.0), c(1.0, 0.0)]);
        let l = hadamard_log(&m, &BranchSpec::default()).unwrap();
        assert!((l.matrix[(0, 1)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(l.matrix[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn minus_one_lands_on_branch_start() {
        assert_eq!(log_on_branch(c(-1.0, 0.0), -PI), c(0.0, -PI));
        assert_eq!(log_on_branch(c(-1.0, -0.0), -PI), c(0.0, -PI));
        // principal-like branch starting at 0 sends 1 to the start as well
        assert_eq!(arg_on_branch(c(1.0, 0.0), 0.0), 0.0);
        assert!((arg_on_branch(c(0.0, -1.0), 0.0) - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn zero_entry_rejected() {
        let m = ComplexMatrix::identity(2, 2);
        assert!(matches!(
            hadamard_log(&m, &BranchSpec::default()),
            Err(Error::ZeroEntry { i: 1, j: 0, .. })
        ));
    }

    #[test]
    fn exp_examples() {
        let z = ComplexMatrix::zeros(2, 2);
        assert!(hadamard_exp(&z).iter().all(|w| *w == c(1.0, 0.0)));
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let e = hadamard_exp(&m);
        assert!((e[(0, 1)].re - (-1.0f64).exp()).abs() < 1e-15);
    }

    fn away_from_cut(beta: f64) -> impl Strategy<Value = Complex64> {
        (1e-3..10.0f64, 0.0..TAU).prop_filter_map("near cut", move |(r, t)| {
            let z = Complex64::from_polar(r, t);
            (distance_to_cut(z, beta) > 1e-6).then_some(z)
        })
    }

    proptest! {
        #[test]
        fn exp_inverts_log(beta in -10.0..10.0f64, entries in proptest::collection::vec(away_from_cut(0.0), 9)) {
            let m = ComplexMatrix::from_row_slice(3, 3, &entries);
            let l = hadamard_log(&m, &BranchSpec::with_beta(beta)).unwrap();
            for z in l.matrix.iter() {
                prop_assert!(z.im >= beta && z.im < beta + TAU);
            }
            let back = hadamard_exp(&l.matrix);
            for (a, b) in back.iter().zip(m.iter()) {
                prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
            }
        }

        #[test]
        fn branch_shift_changes_by_whole_turns(beta in -PI..PI, shift in -6.0..6.0f64, z in away_from_cut(0.0)) {
            let b2 = beta + shift;
            prop_assume!(distance_to_cut(z, beta) > 1e-6 && distance_to_cut(z, b2) > 1e-6);
            let d = log_on_branch(z, beta) - log_on_branch(z, b2);
            prop_assert!(d.re.abs() < 1e-15);
            let k = d.im / TAU;
            prop_assert!((k - k.round()).abs() < 1e-12);
            prop_assert!([-1.0, 0.0, 1.0].contains(&k.round()));
        }
    }
}
