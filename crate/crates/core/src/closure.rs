//! Limits of coherent-state Gram matrices. A matrix is such a limit exactly
//! when, after reordering, it is block diagonal with every block a genuine
//! coherent-state Gram matrix (all entries nonzero).

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::membership::{self, check_membership, MembershipOptions, MembershipResult, NotMemberReason};
use crate::types::{BranchSpec, CoherentEnsemble, CoherentState, ComplexMatrix, GramMatrix, Permutation};

/// Symmetric nonzero pattern of a matrix; the diagonal is always set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPattern {
    nonzero: DMatrix<bool>,
}

impl ZeroPattern {
    pub fn of(p: &GramMatrix, tol_zero: f64) -> Self {
        let n = p.n();
        let nonzero = DMatrix::from_fn(n, n, |i, j| {
            i == j || p.get(i, j).norm() > tol_zero || p.get(j, i).norm() > tol_zero
        });
        Self { nonzero }
    }

    pub fn n(&self) -> usize {
        self.nonzero.nrows()
    }

    pub fn is_nonzero(&self, i: usize, j: usize) -> bool {
        self.nonzero[(i, j)]
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&w| w != v && self.nonzero[(v, w)])
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Shortest path from `from` to `to`, endpoints included.
    fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let n = self.n();
        let mut parent = vec![usize::MAX; n];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.neighbours(v) {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Outcome of the zero-pattern analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternBlocks {
    Blocks(Vec<Vec<usize>>),
    /// `P_ik` and `P_kj` are nonzero but `P_ij` is zero (0-based indices).
    Inconsistent {
        i: usize,
        j: usize,
        k: usize,
    },
}

/// Splits `0..n` into the connected components of the nonzero pattern, and
/// checks that each component is a clique.
pub fn zero_pattern_blocks(p: &GramMatrix, tol_zero: f64) -> PatternBlocks {
    let pattern = ZeroPattern::of(p, tol_zero);
    let blocks = pattern.components();
    for block in &blocks {
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[a + 1..] {
                if pattern.is_nonzero(i, j) {
                    continue;
                }
                let path = pattern.shortest_path(i, j).expect("same component");
                return PatternBlocks::Inconsistent {
                    i: path[0],
                    j: path[2],
                    k: path[1],
                };
            }
        }
    }
    PatternBlocks::Blocks(blocks)
}

/// Whether some entry sits within a factor 10 of the zero threshold.
pub fn marginal_pattern(p: &GramMatrix, tol_zero: f64) -> bool {
    p.matrix().iter().any(|z| {
        let m = z.norm();
        m >= tol_zero / 10.0 && m <= tol_zero * 10.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureBlock {
    pub indices: Vec<usize>,
    pub membership: MembershipResult,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosureReason {
    InconsistentZeroPattern {
        i: usize,
        j: usize,
        k: usize,
    },
    BlockNotMember {
        block_index: usize,
        indices: Vec<usize>,
        result: Box<MembershipResult>,
    },
    NotHermitian {
        i: usize,
        j: usize,
    },
    NotPsdGram {
        min_eigenvalue: f64,
    },
    BadDiagonal {
        i: usize,
    },
}

impl ClosureReason {
    pub fn name(&self) -> &'static str {
        match self {
            ClosureReason::InconsistentZeroPattern { .. } => "InconsistentZeroPattern",
            ClosureReason::BlockNotMember { .. } => "BlockNotMember",
            ClosureReason::NotHermitian { .. } => "NotHermitian",
            ClosureReason::NotPsdGram { .. } => "NotPSDGram",
            ClosureReason::BadDiagonal { .. } => "BadDiagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosureVerdict {
    /// `permutation` maps original indices to positions in the block-diagonal form.
    Member {
        permutation: Permutation,
        blocks: Vec<ClosureBlock>,
    },
    NotMember(ClosureReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureResult {
    pub verdict: ClosureVerdict,
    /// Some entry is within a factor 10 of the zero threshold.
    pub marginal_pattern: bool,
    pub tol_zero: f64,
}

impl ClosureResult {
    pub fn is_member(&self) -> bool {
        matches!(self.verdict, ClosureVerdict::Member { .. })
    }

    pub fn reason(&self) -> Option<&ClosureReason> {
        match &self.verdict {
            ClosureVerdict::NotMember(r) => Some(r),
            ClosureVerdict::Member { .. } => None,
        }
    }

    pub fn blocks(&self) -> Option<&[ClosureBlock]> {
        match &self.verdict {
            ClosureVerdict::Member { blocks, .. } => Some(blocks),
            ClosureVerdict::NotMember(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClosureOptions {
    pub membership: MembershipOptions,
    /// Threshold for the zero pattern; `None` uses the branch's `tol_zero`.
    pub pattern_tol_zero: Option<f64>,
}

pub fn check_closure_membership(p: &GramMatrix, branch: &BranchSpec, opts: &ClosureOptions) -> Result<ClosureResult> {
    branch.validate()?;
    let tol_zero = opts.pattern_tol_zero.unwrap_or(branch.tol_zero);
    let marginal = marginal_pattern(p, tol_zero);
    let done = |verdict| {
        Ok(ClosureResult {
            verdict,
            marginal_pattern: marginal,
            tol_zero,
        })
    };
    if let Some(reason) = membership::precheck(p, branch) {
        let reason = match reason {
            NotMemberReason::NotHermitian { i, j } => ClosureReason::NotHermitian { i, j },
            NotMemberReason::BadDiagonal { i } => ClosureReason::BadDiagonal { i },
            NotMemberReason::NotPsdGram { min_eigenvalue } => ClosureReason::NotPsdGram { min_eigenvalue },
            other => unreachable!("precheck produced {other:?}"),
        };
        return done(ClosureVerdict::NotMember(reason));
    }
    let blocks = match zero_pattern_blocks(p, tol_zero) {
        PatternBlocks::Inconsistent { i, j, k } => {
            return done(ClosureVerdict::NotMember(ClosureReason::InconsistentZeroPattern {
                i,
                j,
                k,
            }));
        }
        PatternBlocks::Blocks(blocks) => blocks,
    };
    let mut checked = Vec::with_capacity(blocks.len());
    for (block_index, indices) in blocks.into_iter().enumerate() {
        let result = check_membership(&p.submatrix(&indices), branch, &opts.membership)?;
        if !result.is_member() {
            let reason = ClosureReason::BlockNotMember {
                block_index,
                indices,
                result: Box::new(result),
            };
            return done(ClosureVerdict::NotMember(reason));
        }
        checked.push(ClosureBlock {
            indices,
            membership: result,
        });
    }
    let order: Vec<usize> = checked.iter().flat_map(|b| b.indices.iter().copied()).collect();
    let permutation = Permutation::new(order)?.inverse();
    done(ClosureVerdict::Member {
        permutation,
        blocks: checked,
    })
}

/// Bounds on `|beta - gamma|` given the overlap moduli `|<alpha, beta>|` and
/// `|<alpha, gamma>|` of normalized coherent states.
pub fn overlap_distance_bounds(p_ab: f64, p_ag: f64) -> Result<(f64, f64)> {
    for (name, v) in [("p_ab", p_ab), ("p_ag", p_ag)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must lie in (0, 1]")));
        }
    }
    let rb = (-2.0 * p_ab.ln()).max(0.0).sqrt();
    let rg = (-2.0 * p_ag.ln()).max(0.0).sqrt();
    Ok(((rg - rb).abs(), rg + rb))
}

/// `A = sqrt(ln(1/eps))`, the smallest displacement with `exp(-A^2) <= eps`.
pub fn displacement_for_epsilon(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    Ok((-eps.ln()).sqrt())
}

/// Places each block in its own slice of modes and displaces block `k` by `A`
/// in a dedicated marker mode. Overlaps inside a block are unchanged and
/// overlaps between blocks have modulus at most `exp(-A^2)`.
pub fn approximate_block_diagonal(blocks: &[CoherentEnsemble], a: f64) -> Result<CoherentEnsemble> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("at least one block is required".into()));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "displacement {a} must be finite and nonnegative"
        )));
    }
    let block_modes: usize = blocks.iter().map(|b| b.modes()).sum();
    let total = block_modes + blocks.len();
    let mut states = Vec::with_capacity(blocks.iter().map(|b| b.len()).sum());
    let mut offset = 0;
    for (k, block) in blocks.iter().enumerate() {
        for s in block.states() {
            let mut amp = nalgebra::DVector::zeros(total);
            amp.rows_mut(offset, block.modes()).copy_from(&s.amplitude);
            amp[block_modes + k] = Complex64::new(a, 0.0);
            states.push(CoherentState::new(s.phase, amp));
        }
        offset += block.modes();
    }
    CoherentEnsemble::new(states)
}

/// Block-diagonal assembly of Gram matrices, in order.
pub fn block_diagonal(blocks: &[GramMatrix]) -> Result<GramMatrix> {
    let n: usize = blocks.iter().map(|b| b.n()).sum();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        m.view_mut((offset, offset), (b.n(), b.n())).copy_from(b.matrix());
        offset += b.n();
    }
    GramMatrix::from_raw(m)
}
