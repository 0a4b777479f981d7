//! Small dense linear-algebra helpers shared by the decision procedures.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type CMatrix = DMatrix<Complex64>;

/// Relative slack used for default eigenvalue tolerances.
pub const EIG_REL_TOL: f64 = 1e-9;

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Scale-aware eigenvalue slack `1e-9 * n * max|entry|`, with the entry scale
/// floored at 1 so tiny matrices are not held to sub-round-off precision.
pub fn scaled_eig_tol(n: usize, max_entry: f64) -> f64 {
    EIG_REL_TOL * n.max(1) as f64 * max_entry.max(1.0)
}

/// Eigenvalues (ascending) and matching eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn real_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sym = (m + m.transpose()).scale(0.5);
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Hermitian square root of a PSD matrix. Eigenvalues in `[-tol, 0)` are
/// clamped to zero; anything below `-tol` is rejected.
pub fn psd_sqrt(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    if let Some(&lo) = values.first() {
        if lo < -tol {
            return Err(Error::NotPsd { min_eigenvalue: lo });
        }
    }
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v.max(0.0).sqrt(), 0.0)),
    );
    Ok(&vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint())
}

/// Real symmetric analogue of [`psd_sqrt`].
pub fn real_psd_sqrt(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = ((m + m.transpose()).scale(0.5)).symmetric_eigen();
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lo < -tol {
        return Err(Error::NotPsd { min_eigenvalue: lo });
    }
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose())
}

/// The centering projector `1 - s u†` where `u` is the all-ones vector.
pub fn centering_projector(s: &DVector<Complex64>) -> CMatrix {
    let n = s.len();
    CMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        delta - s[i]
    })
}

/// `(1 - u s†) M (1 - s u†)`.
pub fn project(m: &CMatrix, s: &DVector<Complex64>) -> CMatrix {
    let right = centering_projector(s);
    right.adjoint() * m * right
}
