//! Exact membership test for Gram matrices of multi-mode coherent states and
//! reconstruction of an explicit witness ensemble.
//!
//! A unit-diagonal Hermitian `P` is realizable iff there is an integer matrix
//! `N` (finitely many candidates, see [`n_entry_range`]) such that
//! `Q = log(P) - 2 pi i N` is Hermitian with zero diagonal and the projected
//! matrix `(1 - u s†) Q (1 - s u†)` is positive semidefinite for a centering
//! vector `s` with `<u, s> = 1`. The columns of the square root of that
//! projected matrix are the amplitudes of a realization.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hadamard::{self, BranchedLogMatrix};
use crate::linalg::{self, CMatrix};
use crate::types::{ones, BranchSpec, CoherentEnsemble, CoherentState, ComplexMatrix, GramMatrix};

/// Default cap on the number of integer matrices a decision may enumerate.
pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;
/// Arguments within this distance of the cut trigger a branch shift.
pub const CUT_PROXIMITY: f64 = 1e-9;
pub const BRANCH_RETRY_SHIFT: f64 = 1e-3;
pub const BRANCH_RETRIES: usize = 3;
/// Allowed distance of the derived lower-triangle winding numbers from an integer.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Tolerance on `<u, s> = 1`.
pub const CENTERING_TOL: f64 = 1e-12;
/// Verdicts whose deciding eigenvalue is within this multiple of the
/// eigenvalue tolerance are reported as marginal.
pub const MARGINAL_FACTOR: f64 = 10.0;

/// Integer winding-number matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPhaseMatrix(DMatrix<i64>);

impl IntegerPhaseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn new(entries: DMatrix<i64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if let Some(i) = (0..entries.nrows()).find(|&i| entries[(i, i)] != 0) {
            return Err(Error::InvalidParameter(format!("N[{i}][{i}] must be 0")));
        }
        Ok(Self(entries))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }
}

/// Inclusive integer range admissible for each off-diagonal `N_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryRange {
    pub lo: i64,
    pub hi: i64,
}

impl EntryRange {
    pub fn len(&self) -> u64 {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as u64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn values(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

/// Minimum modulus over all entries, diagonal included.
pub fn delta_min_abs(p: &GramMatrix) -> f64 {
    p.matrix().iter().fold(f64::INFINITY, |acc, z| acc.min(z.norm()))
}

fn argmin_abs(p: &GramMatrix) -> (usize, usize, f64) {
    let n = p.n();
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..n {
        for j in 0..n {
            let m = p.get(i, j).norm();
            if m < best.2 {
                best = (i, j, m);
            }
        }
    }
    best
}

/// Integers in `[beta/2pi - |ln delta|/pi - 1, beta/2pi + |ln delta|/pi + 2)`.
pub fn n_entry_range(beta: f64, delta: f64) -> Result<EntryRange> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be finite")));
    }
    let spread = delta.ln().abs() / std::f64::consts::PI;
    let start = beta / TAU - spread - 1.0;
    let end = beta / TAU + spread + 2.0;
    Ok(EntryRange {
        lo: start.ceil() as i64,
        hi: end.ceil() as i64 - 1,
    })
}

/// Upper-triangular positions in row-major order.
fn upper_positions(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

/// `(range size)^(n(n-1)/2)`, saturating.
pub fn candidate_count(n: usize, range: EntryRange) -> u128 {
    let free = (n * n.saturating_sub(1) / 2) as u32;
    (range.len() as u128).checked_pow(free).unwrap_or(u128::MAX)
}

/// Winding-number sums `round((Im L_ij + Im L_ji) / 2pi)` forced by
/// Hermiticity, or `None` if some pair is not integral.
fn hermitian_couplings(l: &ComplexMatrix) -> Option<DMatrix<i64>> {
    let n = l.nrows();
    let mut k = DMatrix::zeros(n, n);
    for (i, j) in upper_positions(n) {
        let turns = (l[(i, j)].im + l[(j, i)].im) / TAU;
        if (turns - turns.round()).abs() > INTEGRALITY_TOL {
            return None;
        }
        k[(i, j)] = turns.round() as i64;
    }
    Some(k)
}

/// Stream of admissible integer matrices in canonical order: lexicographic
/// over the strictly upper triangle (row-major), lower triangle derived from
/// Hermiticity, candidates with an out-of-range derived entry skipped.
#[derive(Debug, Clone)]
pub struct CandidateIter {
    n: usize,
    positions: Vec<(usize, usize)>,
    couplings: Option<DMatrix<i64>>,
    range: EntryRange,
    odometer: Vec<i64>,
    done: bool,
}

impl Iterator for CandidateIter {
    type Item = IntegerPhaseMatrix;

    fn next(&mut self) -> Option<IntegerPhaseMatrix> {
        self.couplings.as_ref()?;
        while !self.done {
            let (n_mat, admissible) = self.current();
            self.advance();
            if admissible {
                return Some(IntegerPhaseMatrix(n_mat));
            }
        }
        None
    }
}

impl CandidateIter {
    fn current(&self) -> (DMatrix<i64>, bool) {
        let couplings = self.couplings.as_ref().expect("checked by caller");
        let mut n_mat = DMatrix::zeros(self.n, self.n);
        let mut admissible = true;
        for (&(i, j), &v) in self.positions.iter().zip(&self.odometer) {
            let derived = couplings[(i, j)] - v;
            admissible &= self.range.contains(derived);
            n_mat[(i, j)] = v;
            n_mat[(j, i)] = derived;
        }
        (n_mat, admissible)
    }

    fn advance(&mut self) {
        for slot in self.odometer.iter_mut().rev() {
            if *slot < self.range.hi {
                *slot += 1;
                return;
            }
            *slot = self.range.lo;
        }
        self.done = true;
    }
}

pub fn enumerate_n_candidates(l: &BranchedLogMatrix, delta: f64) -> Result<CandidateIter> {
    let n = l.matrix.nrows();
    let range = n_entry_range(l.branch.beta, delta)?;
    let positions = upper_positions(n);
    Ok(CandidateIter {
        n,
        odometer: vec![range.lo; positions.len()],
        done: range.is_empty() && !positions.is_empty(),
        couplings: hermitian_couplings(&l.matrix),
        positions,
        range,
    })
}

/// `Q = log(P) - 2 pi i N` with the diagonal pinned to zero.
pub fn phase_corrected_log(l: &ComplexMatrix, n_mat: &IntegerPhaseMatrix) -> ComplexMatrix {
    let n = l.nrows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(0.0, 0.0)
        } else {
            l[(i, j)] - Complex64::new(0.0, TAU * n_mat.get(i, j) as f64)
        }
    })
}

/// How the centering vector `s` is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Centering {
    /// `s = e_1`; the first state becomes the vacuum.
    #[default]
    FirstState,
    /// `s = u / n`; the projected matrix has rank at most `n - 1`.
    Mean,
    Custom(DVector<Complex64>),
}

impl Centering {
    pub fn vector(&self, n: usize) -> Result<DVector<Complex64>> {
        let s = match self {
            Centering::FirstState => {
                let mut s = DVector::zeros(n);
                s[0] = Complex64::new(1.0, 0.0);
                s
            }
            Centering::Mean => DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0)),
            Centering::Custom(s) => s.clone(),
        };
        check_centering(&s, n)?;
        Ok(s)
    }
}

fn check_centering(s: &DVector<Complex64>, n: usize) -> Result<()> {
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.len(),
        });
    }
    let total: Complex64 = s.iter().sum();
    if (total - Complex64::new(1.0, 0.0)).norm() > CENTERING_TOL {
        return Err(Error::BadCentering(total));
    }
    Ok(())
}

fn is_first_unit_vector(s: &DVector<Complex64>) -> bool {
    s.iter().enumerate().all(|(i, z)| {
        *z == if i == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn is_hermitian_zero_diagonal(q: &ComplexMatrix, tol: f64) -> bool {
    let n = q.nrows();
    let scale = linalg::max_abs(q).max(1.0);
    (0..n).all(|i| q[(i, i)].norm() <= tol * scale)
        && (0..n).all(|i| (0..n).all(|j| (q[(i, j)] - q[(j, i)].conj()).norm() <= tol * scale))
}

/// Lowest eigenvalue of `X` on the orthogonal complement of `s`, where `s`
/// spans the structural kernel of the projected matrix.
pub fn compressed_min_eigenvalue(x: &ComplexMatrix, s: &DVector<Complex64>) -> f64 {
    let unit = s.normalize();
    let shift = 1.0 + x.norm();
    let lifted = x + (&unit * unit.adjoint()).scale(shift);
    linalg::min_eigenvalue(&lifted)
}

/// Whether `(1 - u s†) Q (1 - s u†)` is PSD within `branch`'s eigenvalue slack.
/// `Q` that is not Hermitian with zero diagonal (within `tol_herm`, relative
/// to its largest entry) fails the test outright.
pub fn q_psd_projected(q: &ComplexMatrix, s: &DVector<Complex64>, branch: &BranchSpec) -> Result<bool> {
    check_centering(s, q.nrows())?;
    if !is_hermitian_zero_diagonal(q, branch.tol_herm) {
        return Ok(false);
    }
    let x = linalg::hermitize(&linalg::project(q, s));
    Ok(linalg::min_eigenvalue(&x) >= -branch.eig_tol_for(&x))
}

/// `x = 1/2 (s† Q s) u - Q s`, so that `Q + x u† + u x†` equals the projected matrix.
pub fn x_from_s(q: &ComplexMatrix, s: &DVector<Complex64>) -> DVector<Complex64> {
    let qs = q * s;
    let sqs = s.dotc(&qs);
    ones(q.nrows()).scale(0.5) * sqs - qs
}

/// Builds the witness ensemble for a feasible `N`: amplitudes are the columns
/// of the Hermitian square root of the projected matrix, phases are
/// `-Im log P_i1` for `s = e_1` and `Im x_i` otherwise.
pub fn reconstruct_ensemble(
    p: &GramMatrix,
    n_mat: &IntegerPhaseMatrix,
    branch: &BranchSpec,
    s: &DVector<Complex64>,
) -> Result<CoherentEnsemble> {
    let n = p.n();
    if n_mat.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: n_mat.n(),
        });
    }
    check_centering(s, n)?;
    let l = hadamard::hadamard_log(p.matrix(), branch)?;
    let q = phase_corrected_log(&l.matrix, n_mat);
    if !is_hermitian_zero_diagonal(&q, INTEGRALITY_TOL) {
        return Err(Error::InvalidParameter(
            "winding numbers do not make log(P) - 2 pi i N Hermitian".into(),
        ));
    }
    let q = linalg::hermitize(&q);
    let x_mat = linalg::hermitize(&linalg::project(&q, s));
    let root = linalg::psd_sqrt(&x_mat, branch.eig_tol_for(&x_mat))?;
    let phases: Vec<f64> = if is_first_unit_vector(s) {
        (0..n)
            .map(|i| if i == 0 { 0.0 } else { -l.matrix[(i, 0)].im })
            .collect()
    } else {
        x_from_s(&q, s).iter().map(|z| z.im).collect()
    };
    let states = (0..n)
        .map(|i| CoherentState::new(phases[i], root.column(i).into_owned()))
        .collect();
    CoherentEnsemble::new(states)
}

/// Returns the ensemble whose amplitudes are the columns of `P^{1/2}` and
/// whose phases are zero. Its Gram matrix is `exp(P - 1)` entrywise, which
/// agrees with `P` to second order in `P_ij - 1`.
pub fn small_angle_embedding(p: &GramMatrix, branch: &BranchSpec) -> Result<CoherentEnsemble> {
    let n = p.n();
    for i in 0..n {
        for j in 0..n {
            if p.get(i, j).re <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) = {} has nonpositive real part",
                    p.get(i, j)
                )));
            }
        }
    }
    let root = linalg::psd_sqrt(p.matrix(), branch.eig_tol_for(p.matrix()))?;
    let states = (0..n)
        .map(|i| CoherentState::new(0.0, root.column(i).into_owned()))
        .collect();
    CoherentEnsemble::new(states)
}

/// Reasons a matrix is rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum NotMemberReason {
    ZeroEntry {
        i: usize,
        j: usize,
    },
    NotHermitian {
        i: usize,
        j: usize,
    },
    BadDiagonal {
        i: usize,
    },
    NotPsdGram {
        min_eigenvalue: f64,
    },
    /// Every admissible integer matrix failed; carries the size of the candidate space.
    Exhausted {
        candidates: u128,
    },
    /// Real-positive fast path: the entrywise log fails the distance-matrix test.
    NotEdm {
        min_eigenvalue: f64,
    },
}

impl NotMemberReason {
    pub fn name(&self) -> &'static str {
        match self {
            NotMemberReason::ZeroEntry { .. } => "ZeroEntry",
            NotMemberReason::NotHermitian { .. } => "NotHermitian",
            NotMemberReason::BadDiagonal { .. } => "BadDiagonal",
            NotMemberReason::NotPsdGram { .. } => "NotPSDGram",
            NotMemberReason::Exhausted { .. } => "Exhausted",
            NotMemberReason::NotEdm { .. } => "NotEDM",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberWitness {
    pub ensemble: CoherentEnsemble,
    pub n_matrix: IntegerPhaseMatrix,
    pub centering: DVector<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Member(Box<MemberWitness>),
    NotMember(NotMemberReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchStats {
    /// `(range size)^(n(n-1)/2)` before Hermiticity filtering.
    pub candidate_space: u128,
    /// Complete candidates whose projected matrix was eigen-tested.
    pub candidates_examined: u64,
    /// Partial assignments cut off by a failing principal submatrix.
    pub pruned: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult {
    pub verdict: Verdict,
    pub stats: SearchStats,
    /// The deciding eigenvalue was within `10 * tol_eig` of zero.
    pub marginal: bool,
    /// Branch start actually used (after any cut-avoiding shifts).
    pub branch_beta: f64,
    pub tol_eig: f64,
}

impl MembershipResult {
    pub fn is_member(&self) -> bool {
        matches!(self.verdict, Verdict::Member(_))
    }

    pub fn witness(&self) -> Option<&MemberWitness> {
        match &self.verdict {
            Verdict::Member(w) => Some(w),
            Verdict::NotMember(_) => None,
        }
    }

    pub fn reason(&self) -> Option<&NotMemberReason> {
        match &self.verdict {
            Verdict::Member(_) => None,
            Verdict::NotMember(r) => Some(r),
        }
    }

    pub(crate) fn rejected(reason: NotMemberReason, branch: &BranchSpec, tol_eig: f64) -> Self {
        Self {
            verdict: Verdict::NotMember(reason),
            stats: SearchStats::default(),
            marginal: false,
            branch_beta: branch.beta,
            tol_eig,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipOptions {
    pub centering: Centering,
    pub max_candidates: u64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            centering: Centering::FirstState,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

/// Hermiticity, unit diagonal and PSD checks shared by every decision procedure.
pub(crate) fn precheck(p: &GramMatrix, branch: &BranchSpec) -> Option<NotMemberReason> {
    if let Err(Error::NotHermitian { i, j, .. }) = p.check_hermitian(branch.tol_herm) {
        return Some(NotMemberReason::NotHermitian { i, j });
    }
    if let Err(Error::BadDiagonal { i, .. }) = p.check_unit_diagonal(branch.tol_herm) {
        return Some(NotMemberReason::BadDiagonal { i });
    }
    let min_eigenvalue = p.min_eigenvalue();
    if min_eigenvalue < -branch.eig_tol_for(p.matrix()) {
        return Some(NotMemberReason::NotPsdGram { min_eigenvalue });
    }
    None
}

/// Shifts `beta` off any off-diagonal entry sitting on the cut.
fn choose_branch(p: &GramMatrix, branch: &BranchSpec) -> BranchSpec {
    let n = p.n();
    let mut chosen = *branch;
    for _ in 0..BRANCH_RETRIES {
        let on_cut = (0..n)
            .any(|i| (0..n).any(|j| i != j && hadamard::distance_to_cut(p.get(i, j), chosen.beta) < CUT_PROXIMITY));
        if !on_cut {
            break;
        }
        chosen.beta += BRANCH_RETRY_SHIFT;
    }
    chosen
}

/// One eigenvalue slack for the whole search, scaled to the largest entry any
/// candidate's projected matrix can reach, so pruning and the final test agree.
fn search_tolerance(l: &ComplexMatrix, range: EntryRange, branch: &BranchSpec) -> f64 {
    branch.tol_eig.unwrap_or_else(|| {
        let re = l.iter().fold(0.0f64, |acc, z| acc.max(z.re.abs()));
        let im = l.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()))
            + TAU * range.lo.unsigned_abs().max(range.hi.unsigned_abs()) as f64;
        linalg::scaled_eig_tol(l.nrows(), 4.0 * re.hypot(im))
    })
}

struct Search<'a> {
    n: usize,
    l: &'a ComplexMatrix,
    couplings: DMatrix<i64>,
    range: EntryRange,
    positions: Vec<(usize, usize)>,
    s: &'a DVector<Complex64>,
    tol: f64,
    n_mat: DMatrix<i64>,
    q: ComplexMatrix,
    stats: SearchStats,
    near_miss: bool,
}

impl Search<'_> {
    fn set(&mut self, i: usize, j: usize, v: i64, derived: i64) {
        self.n_mat[(i, j)] = v;
        self.n_mat[(j, i)] = derived;
        self.q[(i, j)] = self.l[(i, j)] - Complex64::new(0.0, TAU * v as f64);
        self.q[(j, i)] = self.l[(j, i)] - Complex64::new(0.0, TAU * derived as f64);
    }

    /// `X = (1 - u e_1†) Q (1 - e_1 u†)` restricted to `{1..=i} ∪ {j}`; its
    /// entries only involve already-assigned positions.
    fn partial_ok(&mut self, i: usize, j: usize) -> bool {
        let idx: Vec<usize> = (1..=i).chain(std::iter::once(j)).collect();
        let k = idx.len();
        let q = &self.q;
        let x = CMatrix::from_fn(k, k, |a, b| {
            let (r, c) = (idx[a], idx[b]);
            let qrc = if r == c { Complex64::new(0.0, 0.0) } else { q[(r, c)] };
            qrc - q[(r, 0)] - q[(0, c)]
        });
        let lo = linalg::min_eigenvalue(&x);
        self.note_rejection(lo);
        lo >= -self.tol
    }

    fn note_rejection(&mut self, lo: f64) {
        if lo < -self.tol && lo >= -MARGINAL_FACTOR * self.tol {
            self.near_miss = true;
        }
    }

    fn leaf(&mut self) -> Option<ComplexMatrix> {
        self.stats.candidates_examined += 1;
        let q = linalg::hermitize(&self.q);
        let x = linalg::hermitize(&linalg::project(&q, self.s));
        let lo = linalg::min_eigenvalue(&x);
        self.note_rejection(lo);
        (lo >= -self.tol).then_some(x)
    }

    fn descend(&mut self, depth: usize) -> Option<ComplexMatrix> {
        if depth == self.positions.len() {
            return self.leaf();
        }
        let (i, j) = self.positions[depth];
        for v in self.range.values() {
            let derived = self.couplings[(i, j)] - v;
            if !self.range.contains(derived) {
                continue;
            }
            self.set(i, j, v, derived);
            if !self.partial_ok(i, j) {
                self.stats.pruned += 1;
                continue;
            }
            if let Some(x) = self.descend(depth + 1) {
                return Some(x);
            }
        }
        None
    }
}

/// Decides whether `p` is a Gram matrix of multi-mode coherent states and,
/// if so, returns the lexicographically first feasible `N` with a witness.
///
/// The search walks the canonical candidate order depth-first and abandons a
/// partial assignment as soon as a principal submatrix of the projected
/// matrix (taken with `s = e_1`) is indefinite. Every completion of such an
/// assignment is infeasible by eigenvalue interlacing, so the first feasible
/// candidate is the same as in a plain scan of [`enumerate_n_candidates`].
pub fn check_membership(p: &GramMatrix, branch: &BranchSpec, opts: &MembershipOptions) -> Result<MembershipResult> {
    branch.validate()?;
    let n = p.n();
    let s = opts.centering.vector(n)?;
    let base_tol = branch.eig_tol_for(p.matrix());
    if let Some(reason) = precheck(p, branch) {
        return Ok(MembershipResult::rejected(reason, branch, base_tol));
    }
    let (zi, zj, delta) = argmin_abs(p);
    if delta <= branch.tol_zero {
        return Ok(MembershipResult::rejected(
            NotMemberReason::ZeroEntry { i: zi, j: zj },
            branch,
            base_tol,
        ));
    }

    let chosen = choose_branch(p, branch);
    let l = hadamard::hadamard_log(p.matrix(), &chosen)?;
    let range = n_entry_range(chosen.beta, delta)?;
    let candidate_space = candidate_count(n, range);
    if candidate_space > opts.max_candidates as u128 {
        return Err(Error::CandidateBudgetExceeded {
            count: candidate_space,
            max: opts.max_candidates,
        });
    }
    let tol = search_tolerance(&l.matrix, range, &chosen);
    let exhausted = |stats: SearchStats, marginal: bool| MembershipResult {
        verdict: Verdict::NotMember(NotMemberReason::Exhausted {
            candidates: candidate_space,
        }),
        stats,
        marginal,
        branch_beta: chosen.beta,
        tol_eig: tol,
    };

    let Some(couplings) = hermitian_couplings(&l.matrix) else {
        let stats = SearchStats {
            candidate_space,
            ..SearchStats::default()
        };
        return Ok(exhausted(stats, false));
    };
    let mut search = Search {
        n,
        l: &l.matrix,
        couplings,
        range,
        positions: upper_positions(n),
        s: &s,
        tol,
        n_mat: DMatrix::zeros(n, n),
        q: ComplexMatrix::zeros(n, n),
        stats: SearchStats {
            candidate_space,
            ..SearchStats::default()
        },
        near_miss: false,
    };
    let found = search.descend(0);
    let stats = search.stats;
    let Some(x) = found else {
        return Ok(exhausted(stats, search.near_miss));
    };
    debug_assert_eq!(search.n, n);

    let n_matrix = IntegerPhaseMatrix(search.n_mat.clone());
    let exact = BranchSpec {
        tol_eig: Some(tol),
        ..chosen
    };
    let ensemble = reconstruct_ensemble(p, &n_matrix, &exact, &s)?;
    let error = linalg::max_abs_diff(crate::types::gram_of_ensemble(&ensemble).matrix(), p.matrix());
    if error > reconstruction_tolerance(n) {
        return Err(Error::ReconstructionFailed { error });
    }
    let deciding = compressed_min_eigenvalue(&x, &s);
    Ok(MembershipResult {
        verdict: Verdict::Member(Box::new(MemberWitness {
            ensemble,
            n_matrix,
            centering: s,
        })),
        stats,
        marginal: deciding.abs() < MARGINAL_FACTOR * tol,
        branch_beta: chosen.beta,
        tol_eig: tol,
    })
}

/// Entrywise round-trip tolerance `1e-8 * n` for reconstructed witnesses.
pub fn reconstruction_tolerance(n: usize) -> f64 {
    1e-8 * n as f64
}
