//! Euclidean distance matrices in the signed convention
//! `D_ij = -1/2 |p_i - p_j|^2`, the double-centering test, and the results
//! that connect them to coherent-state Gram matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::membership::{
    self, IntegerPhaseMatrix, MemberWitness, MembershipResult, NotMemberReason, SearchStats, Verdict,
};
use crate::types::{gram_of_ensemble, BranchSpec, CoherentEnsemble, CoherentState, GramMatrix};

/// Relative slack for symmetry, hollowness and sign of a candidate.
pub const EDM_TOL: f64 = 1e-10;

/// Real symmetric hollow matrix with nonpositive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct EdmCandidate(DMatrix<f64>);

impl EdmCandidate {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: n,
                cols: matrix.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidEdm("empty matrix".into()));
        }
        let tol = EDM_TOL * linalg::max_abs_real(&matrix).max(1.0);
        for i in 0..n {
            for j in 0..n {
                let v = matrix[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if v > tol {
                    return Err(Error::InvalidEdm(format!("entry ({i}, {j}) = {v} is positive")));
                }
                if (v - matrix[(j, i)]).abs() > tol {
                    return Err(Error::InvalidEdm(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
            if matrix[(i, i)].abs() > tol {
                return Err(Error::InvalidEdm(format!("diagonal entry {i} is nonzero")));
            }
        }
        Ok(Self(matrix))
    }

    /// Converts squared distances `S_ij = |p_i - p_j|^2` to the signed form.
    pub fn from_squared_distances(squared: DMatrix<f64>) -> Result<Self> {
        Self::new(squared.scale(-0.5))
    }

    /// Builds `D_ij = -1/2 |p_i - p_j|^2` from points given as columns.
    pub fn from_points(points: &DMatrix<f64>) -> Self {
        let n = points.ncols();
        let d = DMatrix::from_fn(n, n, |i, j| -0.5 * (points.column(i) - points.column(j)).norm_squared());
        Self(d)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn to_squared_distances(&self) -> DMatrix<f64> {
        self.0.scale(-2.0)
    }
}

fn centered(d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.nrows();
    let j = DMatrix::from_fn(n, n, |a, b| if a == b { 1.0 } else { 0.0 } - 1.0 / n as f64);
    let c = &j * d * &j;
    (&c + c.transpose()).scale(0.5)
}

fn default_tol(d: &DMatrix<f64>) -> f64 {
    linalg::scaled_eig_tol(d.nrows(), linalg::max_abs_real(d))
}

/// Lowest eigenvalue of `(1 - uu†/n) D (1 - uu†/n)`.
pub fn centered_min_eigenvalue(d: &EdmCandidate) -> f64 {
    linalg::real_min_eigenvalue(&centered(d.matrix()))
}

pub fn is_edm(d: &EdmCandidate) -> bool {
    is_edm_with_tol(d, default_tol(d.matrix()))
}

pub fn is_edm_with_tol(d: &EdmCandidate, tol: f64) -> bool {
    centered_min_eigenvalue(d) >= -tol
}

/// Point configuration realizing `D`, one point per column. The points live
/// in `R^n`; trailing coordinates may be numerically zero.
pub fn edm_points(d: &EdmCandidate) -> Result<DMatrix<f64>> {
    edm_points_with_tol(d, default_tol(d.matrix()))
}

pub fn edm_points_with_tol(d: &EdmCandidate, tol: f64) -> Result<DMatrix<f64>> {
    let c = centered(d.matrix());
    linalg::real_psd_sqrt(&c, tol).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue } => Error::NotEdm { min_eigenvalue },
        other => other,
    })
}

fn ensemble_from_points(points: &DMatrix<f64>) -> Result<CoherentEnsemble> {
    let states = points
        .column_iter()
        .map(|col| {
            CoherentState::new(
                0.0,
                DVector::from_iterator(col.len(), col.iter().map(|&x| Complex64::new(x, 0.0))),
            )
        })
        .collect();
    CoherentEnsemble::new(states)
}

/// Real-amplitude, zero-phase ensemble whose Gram matrix is `exp(D)`
/// entrywise; exhibits that matrix as positive semidefinite.
pub fn hadamard_exp_edm_witness(d: &EdmCandidate) -> Result<CoherentEnsemble> {
    ensemble_from_points(&edm_points(d)?)
}

fn log_modulus(p: &GramMatrix, tol_zero: f64) -> Result<DMatrix<f64>> {
    let n = p.n();
    for j in 0..n {
        for i in 0..n {
            let modulus = p.get(i, j).norm();
            if modulus <= tol_zero {
                return Err(Error::ZeroEntry { i, j, modulus });
            }
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            0.5 * (p.get(i, j).norm() * p.get(j, i).norm()).ln()
        }
    }))
}

/// Tests whether `[log |P_ij|]` is a distance matrix. `false` proves `P` is
/// not a coherent-state Gram matrix; `true` is inconclusive.
pub fn edm_necessary_check(p: &GramMatrix, branch: &BranchSpec) -> Result<bool> {
    let r = log_modulus(p, branch.tol_zero)?;
    match EdmCandidate::new(r) {
        Ok(d) => Ok(is_edm_with_tol(&d, branch.eig_tol_for_real(d.matrix()))),
        Err(Error::InvalidEdm(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Decision for real, strictly positive `P`: it is a coherent-state Gram
/// matrix exactly when `log P` (entrywise) is a distance matrix. The witness
/// uses the recovered points as real amplitudes and zero phases.
pub fn check_membership_real_positive(p: &GramMatrix, branch: &BranchSpec) -> Result<MembershipResult> {
    branch.validate()?;
    let n = p.n();
    for i in 0..n {
        for j in 0..n {
            let z = p.get(i, j);
            if z.im.abs() > branch.tol_herm || z.re <= branch.tol_zero {
                return Err(Error::NotRealPositive { i, j });
            }
        }
    }
    let base_tol = branch.eig_tol_for(p.matrix());
    if let Some(reason) = membership::precheck(p, branch) {
        return Ok(MembershipResult::rejected(reason, branch, base_tol));
    }
    let logs = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            0.5 * (p.get(i, j).re * p.get(j, i).re).ln()
        }
    });
    let tol = branch.eig_tol_for_real(&logs);
    let d = match EdmCandidate::new(logs) {
        Ok(d) => d,
        Err(Error::InvalidEdm(_)) => {
            let reason = NotMemberReason::NotEdm {
                min_eigenvalue: f64::NAN,
            };
            return Ok(MembershipResult::rejected(reason, branch, tol));
        }
        Err(e) => return Err(e),
    };
    let min_eigenvalue = centered_min_eigenvalue(&d);
    let marginal = min_eigenvalue.abs() < membership::MARGINAL_FACTOR * tol;
    if min_eigenvalue < -tol {
        let mut result = MembershipResult::rejected(NotMemberReason::NotEdm { min_eigenvalue }, branch, tol);
        result.marginal = marginal;
        return Ok(result);
    }
    let ensemble = ensemble_from_points(&edm_points_with_tol(&d, tol)?)?;
    let error = linalg::max_abs_diff(gram_of_ensemble(&ensemble).matrix(), p.matrix());
    if error > membership::reconstruction_tolerance(n) {
        return Err(Error::ReconstructionFailed { error });
    }
    let centering = DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
    Ok(MembershipResult {
        verdict: Verdict::Member(Box::new(MemberWitness {
            ensemble,
            n_matrix: IntegerPhaseMatrix::zeros(n),
            centering,
        })),
        stats: SearchStats {
            candidate_space: 1,
            candidates_examined: 1,
            pruned: 0,
        },
        marginal,
        branch_beta: branch.beta,
        tol_eig: tol,
    })
}
