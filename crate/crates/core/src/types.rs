//! Shared data model and the closed-form coherent-state overlap.
//!
//! Inner products are **conjugate-linear in the first argument**:
//! `<a, b> = sum_k conj(a_k) * b_k`. This matches nalgebra's `dotc`
//! (`a.dotc(&b)`) but not `dot`, so every overlap in this crate goes through
//! [`inner`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Dense complex square matrix storage.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Complex amplitude vector of a multi-mode coherent state.
pub type Amplitude = DVector<Complex64>;

/// `<a, b>`, conjugate-linear in `a`.
pub fn inner(a: &Amplitude, b: &Amplitude) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// All-ones vector of length `n`.
pub fn ones(n: usize) -> DVector<Complex64> {
    DVector::from_element(n, Complex64::new(1.0, 0.0))
}

/// Numerical tolerances together with the branch `[beta, beta + 2pi)` of the
/// complex logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSpec {
    pub beta: f64,
    /// PSD eigenvalue slack. `None` selects `1e-9 * n * max|entry|` of the
    /// matrix being tested.
    pub tol_eig: Option<f64>,
    /// Moduli at or below this are treated as zero.
    pub tol_zero: f64,
    pub tol_herm: f64,
}

impl Default for BranchSpec {
    fn default() -> Self {
        Self {
            beta: -PI,
            tol_eig: None,
            tol_zero: 1e-10,
            tol_herm: 1e-10,
        }
    }
}

impl BranchSpec {
    pub fn with_beta(beta: f64) -> Self {
        Self {
            beta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "branch start {} is not finite",
                self.beta
            )));
        }
        let tols = [
            ("tol_zero", Some(self.tol_zero)),
            ("tol_herm", Some(self.tol_herm)),
            ("tol_eig", self.tol_eig),
        ];
        for (name, value) in tols {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} = {v} must be finite and nonnegative"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Effective eigenvalue slack for `m`.
    pub fn eig_tol_for(&self, m: &ComplexMatrix) -> f64 {
        self.tol_eig
            .unwrap_or_else(|| linalg::scaled_eig_tol(m.nrows(), linalg::max_abs(m)))
    }

    pub fn eig_tol_for_real(&self, m: &DMatrix<f64>) -> f64 {
        self.tol_eig
            .unwrap_or_else(|| linalg::scaled_eig_tol(m.nrows(), linalg::max_abs_real(m)))
    }
}

/// A single multi-mode coherent state `e^{i phase} |amplitude>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub phase: f64,
    pub amplitude: Amplitude,
}

impl CoherentState {
    pub fn new(phase: f64, amplitude: Amplitude) -> Self {
        Self { phase, amplitude }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            phase: 0.0,
            amplitude: Amplitude::zeros(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.amplitude.len()
    }
}

/// Overlap of two multi-mode coherent states,
/// `exp(-1/2 (|a|^2 + |b|^2 - 2<a, b>) + i (phi_b - phi_a))`.
pub fn coherent_overlap(a: &CoherentState, b: &CoherentState) -> Result<Complex64> {
    if a.modes() != b.modes() {
        return Err(Error::DimensionMismatch {
            expected: a.modes(),
            found: b.modes(),
        });
    }
    let exponent = -0.5 * (a.amplitude.norm_squared() + b.amplitude.norm_squared())
        + inner(&a.amplitude, &b.amplitude)
        + Complex64::new(0.0, b.phase - a.phase);
    Ok(exponent.exp())
}

/// An ordered list of coherent states sharing one mode count.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentEnsemble {
    modes: usize,
    states: Vec<CoherentState>,
}

impl CoherentEnsemble {
    pub fn new(states: Vec<CoherentState>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParameter("ensemble must contain at least one state".into()))?;
        let modes = first.modes();
        if modes == 0 {
            return Err(Error::InvalidParameter("states need at least one mode".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if s.modes() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    found: s.modes(),
                });
            }
            let finite = s.phase.is_finite() && s.amplitude.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite {
                return Err(Error::NonFinite { i, j: 0 });
            }
        }
        Ok(Self { modes, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn states(&self) -> &[CoherentState] {
        &self.states
    }

    pub fn into_states(self) -> Vec<CoherentState> {
        self.states
    }
}

/// A square complex matrix meant to be a Gram matrix of normalized vectors.
///
/// [`GramMatrix::new`] enforces Hermiticity and the unit diagonal,
/// [`GramMatrix::new_strict`] additionally requires positive semidefiniteness,
/// and [`GramMatrix::from_raw`] only requires a square finite matrix so that
/// decision procedures can report *why* an input is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(ComplexMatrix);

impl GramMatrix {
    pub fn from_raw(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidParameter("matrix must be at least 1x1".into()));
        }
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn new(m: ComplexMatrix, branch: &BranchSpec) -> Result<Self> {
        let g = Self::from_raw(m)?;
        g.check_hermitian(branch.tol_herm)?;
        g.check_unit_diagonal(branch.tol_herm)?;
        Ok(g)
    }

    pub fn new_strict(m: ComplexMatrix, branch: &BranchSpec) -> Result<Self> {
        let g = Self::new(m, branch)?;
        g.check_psd(branch.eig_tol_for(&g.0))?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in i..n {
                let deviation = (self.0[(i, j)] - self.0[(j, i)].conj()).norm();
                if deviation > tol {
                    return Err(Error::NotHermitian { i, j, deviation });
                }
            }
        }
        Ok(())
    }

    pub fn check_unit_diagonal(&self, tol: f64) -> Result<()> {
        for i in 0..self.n() {
            let deviation = (self.0[(i, i)] - Complex64::new(1.0, 0.0)).norm();
            if deviation > tol {
                return Err(Error::BadDiagonal { i, deviation });
            }
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.0)
    }

    pub fn check_psd(&self, tol: f64) -> Result<()> {
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -tol {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(())
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> GramMatrix {
        let k = indices.len();
        GramMatrix(ComplexMatrix::from_fn(k, k, |a, b| self.0[(indices[a], indices[b])]))
    }
}

/// Gram matrix of an ensemble. The diagonal is set to exactly 1.
pub fn gram_of_ensemble(e: &CoherentEnsemble) -> GramMatrix {
    let n = e.len();
    let states = e.states();
    let mut m = ComplexMatrix::from_element(n, n, Complex64::new(1.0, 0.0));
    for i in 0..n {
        for j in (i + 1)..n {
            // modes agree by construction of the ensemble
            let z = coherent_overlap(&states[i], &states[j]).expect("uniform mode count");
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    GramMatrix(m)
}

/// Shifts every amplitude by `-alpha_1` and compensates the phases so the
/// Gram matrix is unchanged and the first state becomes the vacuum.
pub fn normalize_first_to_vacuum(e: &CoherentEnsemble) -> CoherentEnsemble {
    let first = e.states()[0].amplitude.clone();
    let states = e
        .states()
        .iter()
        .map(|s| CoherentState {
            phase: s.phase - inner(&s.amplitude, &first).im,
            amplitude: &s.amplitude - &first,
        })
        .collect();
    CoherentEnsemble {
        modes: e.modes(),
        states,
    }
}

/// A permutation of `0..n`, stored as `image[i] = pi(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &k in &image {
            if k >= n {
                return Err(Error::InvalidPermutation(format!("image {k} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidPermutation(format!("image {k} repeated")));
            }
        }
        Ok(Self(image))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &k) in self.0.iter().enumerate() {
            inv[k] = i;
        }
        Self(inv)
    }
}

/// `P_pi P P_pi^dagger`: entry `(i, j)` of the result is `P[pi^-1(i)][pi^-1(j)]`.
pub fn rearrange(p: &GramMatrix, pi: &Permutation) -> Result<GramMatrix> {
    if pi.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: pi.len(),
        });
    }
    let inv = pi.inverse();
    let n = p.n();
    Ok(GramMatrix(ComplexMatrix::from_fn(n, n, |i, j| {
        p.get(inv.apply(i), inv.apply(j))
    })))
}
