//! Instance generators: equiangular Gram matrices, the Gram matrix of the
//! standard and Fourier bases, and seeded random ensembles and distance
//! matrices.
//!
//! Random draws use ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), which
//! produces the same stream on every platform. Each uniform variate is
//! `rng.random::<f64>()` in `[0, 1)`, mapped affinely onto the target interval.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edm::EdmCandidate;
use crate::error::{Error, Result};
use crate::types::{gram_of_ensemble, CoherentEnsemble, CoherentState, ComplexMatrix, GramMatrix};

/// Parameters of [`random_ensemble`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub seed: u64,
    /// Number of states.
    pub n: usize,
    /// Number of modes.
    pub m: usize,
    /// Real and imaginary parts are drawn from `[-scale, scale]`.
    pub scale: f64,
}

impl RandomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParameter("n and m must be at least 1".into()));
        }
        check_scale(self.scale)
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale = {scale} must be finite and nonnegative"
        )));
    }
    Ok(())
}

fn symmetric(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    scale * (2.0 * rng.random::<f64>() - 1.0)
}

/// `P_ii = 1`, `P_ij = r`. Positive semidefinite iff `-1/(n-1) <= r <= 1`.
pub fn equiangular_gram(n: usize, r: f64) -> Result<GramMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let lower = if n > 1 { -1.0 / (n - 1) as f64 } else { -1.0 };
    if !(r.is_finite() && r <= 1.0 && r >= lower - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "r = {r} gives an indefinite matrix for n = {n} (need {lower} <= r <= 1)"
        )));
    }
    GramMatrix::from_raw(ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(if i == j { 1.0 } else { r }, 0.0)
    }))
}

/// Gram matrix of the standard basis of `C^n` followed by the Fourier basis
/// `f_j = n^{-1/2} sum_k w^{jk} e_k`, `w = exp(2 pi i / n)`. Cross entries
/// have modulus `1/sqrt(n)`; entries within a basis vanish off the diagonal.
pub fn mub_gram(n: usize) -> Result<GramMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let norm = 1.0 / (n as f64).sqrt();
    let fourier = |i: usize, j: usize| Complex64::from_polar(norm, TAU * ((i * j) % n) as f64 / n as f64);
    let m = ComplexMatrix::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
        (true, true) | (false, false) => Complex64::new(if a == b { 1.0 } else { 0.0 }, 0.0),
        // <e_a, f_j> is the a-th coordinate of f_j
        (true, false) => fourier(a, b - n),
        (false, true) => fourier(b, a - n).conj(),
    });
    GramMatrix::from_raw(m)
}

/// Seeded ensemble: for each state, the phase is drawn from `[0, 2 pi)`,
/// then each mode's real and imaginary parts from `[-scale, scale]`.
pub fn random_ensemble(spec: &RandomSpec) -> Result<CoherentEnsemble> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let states = (0..spec.n)
        .map(|_| {
            let phase = TAU * rng.random::<f64>();
            let amp = DVector::from_fn(spec.m, |_, _| {
                let re = symmetric(&mut rng, spec.scale);
                let im = symmetric(&mut rng, spec.scale);
                Complex64::new(re, im)
            });
            CoherentState::new(phase, amp)
        })
        .collect();
    CoherentEnsemble::new(states)
}

/// Gram matrix of [`random_ensemble`].
pub fn random_gram(seed: u64, n: usize, m: usize, scale: f64) -> Result<GramMatrix> {
    Ok(gram_of_ensemble(&random_ensemble(&RandomSpec { seed, n, m, scale })?))
}

/// `D_ij = -1/2 |p_i - p_j|^2` for `n` seeded points in `[-scale, scale]^k`.
pub fn random_edm(seed: u64, n: usize, k: usize, scale: f64) -> Result<EdmCandidate> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("n and k must be at least 1".into()));
    }
    check_scale(scale)?;
    Ok(EdmCandidate::from_points(&random_points(seed, n, k, scale)))
}

/// `n` seeded points in `[-scale, scale]^k`, one per column, drawn point by point.
pub fn random_points(seed: u64, n: usize, k: usize, scale: f64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = DMatrix::zeros(k, n);
    for j in 0..n {
        for i in 0..k {
            pts[(i, j)] = symmetric(&mut rng, scale);
        }
    }
    pts
}
