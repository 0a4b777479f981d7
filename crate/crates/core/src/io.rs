//! JSON file formats: matrices, ensembles, permutations and reports.
//!
//! Complex numbers are `[re, im]` pairs; real matrix files may also use plain
//! numbers. Floats are written in the shortest form that parses back to the
//! same `f64`, so reading and re-writing a file preserves every value.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closure::{ClosureReason, ClosureResult, ClosureVerdict};
use crate::error::Error;
use crate::membership::{MembershipResult, NotMemberReason};
use crate::types::{BranchSpec, CoherentEnsemble, CoherentState, ComplexMatrix, GramMatrix, Permutation};

/// Failures reading or writing files.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid {kind} file: {message}")]
    Format { kind: &'static str, message: String },
}

fn format_error(kind: &'static str, message: impl Into<String>) -> IoError {
    IoError::Format {
        kind,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Complex([f64; 2]),
    Real(f64),
}

impl Number {
    fn value(self) -> Complex64 {
        match self {
            Number::Complex([re, im]) => Complex64::new(re, im),
            Number::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: String,
    pub n: usize,
    pub entries: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub phase: f64,
    pub amplitude: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub kind: String,
    pub n: usize,
    pub modes: usize,
    pub states: Vec<StateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationFile {
    pub kind: String,
    pub n: usize,
    /// `image[i]` is the position of original index `i`.
    pub image: Vec<usize>,
}

impl MatrixFile {
    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let n = m.nrows();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| Number::Complex(pair(m[(i, j)]))).collect())
            .collect();
        Self {
            kind: "matrix".into(),
            n,
            entries,
        }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        Self::from_complex(&m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix, IoError> {
        if self.kind != "matrix" {
            return Err(format_error(
                "matrix",
                format!("kind is {:?}, expected \"matrix\"", self.kind),
            ));
        }
        if self.n == 0 {
            return Err(format_error("matrix", "n must be at least 1"));
        }
        if self.entries.len() != self.n || self.entries.iter().any(|row| row.len() != self.n) {
            return Err(format_error(
                "matrix",
                format!("entries must be {n} rows of {n} values", n = self.n),
            ));
        }
        let m = ComplexMatrix::from_fn(self.n, self.n, |i, j| self.entries[i][j].value());
        if let Some((i, j)) = first_non_finite(&m) {
            return Err(format_error("matrix", format!("entry ({i}, {j}) is not finite")));
        }
        Ok(m)
    }

    /// The real parts; fails if any imaginary part is nonzero.
    pub fn to_real(&self) -> Result<DMatrix<f64>, IoError> {
        let m = self.to_complex()?;
        if let Some((i, j)) = (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| m[(i, j)].im != 0.0)
        {
            return Err(format_error(
                "matrix",
                format!("entry ({i}, {j}) has a nonzero imaginary part"),
            ));
        }
        Ok(m.map(|z| z.re))
    }
}

fn first_non_finite(m: &ComplexMatrix) -> Option<(usize, usize)> {
    let n = m.nrows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !(m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

impl EnsembleFile {
    pub fn from_ensemble(e: &CoherentEnsemble) -> Self {
        let states = e
            .states()
            .iter()
            .map(|s| StateRecord {
                phase: s.phase,
                amplitude: s.amplitude.iter().copied().map(pair).collect(),
            })
            .collect();
        Self {
            kind: "ensemble".into(),
            n: e.len(),
            modes: e.modes(),
            states,
        }
    }

    pub fn to_ensemble(&self) -> Result<CoherentEnsemble, IoError> {
        if self.kind != "ensemble" {
            return Err(format_error(
                "ensemble",
                format!("kind is {:?}, expected \"ensemble\"", self.kind),
            ));
        }
        if self.states.len() != self.n {
            return Err(format_error(
                "ensemble",
                format!("n = {} but {} states given", self.n, self.states.len()),
            ));
        }
        let mut states = Vec::with_capacity(self.n);
        for (i, rec) in self.states.iter().enumerate() {
            if rec.amplitude.len() != self.modes {
                return Err(format_error(
                    "ensemble",
                    format!("state {i} has {} modes, expected {}", rec.amplitude.len(), self.modes),
                ));
            }
            let amp = DVector::from_iterator(self.modes, rec.amplitude.iter().map(|&[re, im]| Complex64::new(re, im)));
            states.push(CoherentState::new(rec.phase, amp));
        }
        CoherentEnsemble::new(states).map_err(|e| format_error("ensemble", e.to_string()))
    }
}

impl PermutationFile {
    pub fn from_permutation(p: &Permutation) -> Self {
        Self {
            kind: "permutation".into(),
            n: p.len(),
            image: p.as_slice().to_vec(),
        }
    }
}

/// Reads `path`, with `-` meaning `stdin`.
pub fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String, IoError> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(|source| IoError::Io {
            path: "<stdin>".into(),
            source,
        })?;
    } else {
        text = fs::read_to_string(path).map_err(|source| IoError::Io {
            path: path.into(),
            source,
        })?;
    }
    Ok(text)
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, IoError> {
    serde_json::from_str::<MatrixFile>(text)?.to_complex()
}

pub fn parse_real_matrix(text: &str) -> Result<DMatrix<f64>, IoError> {
    serde_json::from_str::<MatrixFile>(text)?.to_real()
}

pub fn parse_gram(text: &str) -> Result<GramMatrix, IoError> {
    GramMatrix::from_raw(parse_matrix(text)?).map_err(|e| format_error("matrix", e.to_string()))
}

pub fn parse_ensemble(text: &str) -> Result<CoherentEnsemble, IoError> {
    serde_json::from_str::<EnsembleFile>(text)?.to_ensemble()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Writes `text` to `path`, with `-` meaning `stdout`.
pub fn write_target(path: &str, text: &str, stdout: &mut dyn Write) -> Result<(), IoError> {
    if path == "-" {
        stdout.write_all(text.as_bytes()).map_err(|source| IoError::Io {
            path: "<stdout>".into(),
            source,
        })
    } else {
        fs::write(Path::new(path), text).map_err(|source| IoError::Io {
            path: path.into(),
            source,
        })
    }
}

/// Why a verdict was negative, or what went wrong.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ReasonReport {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl ReasonReport {
    fn named(kind: &str) -> Self {
        Self {
            kind: kind.into(),
            ..Self::default()
        }
    }

    pub fn from_membership(reason: &NotMemberReason) -> Self {
        let mut r = Self::named(reason.name());
        match *reason {
            NotMemberReason::ZeroEntry { i, j } | NotMemberReason::NotHermitian { i, j } => {
                r.i = Some(i);
                r.j = Some(j);
            }
            NotMemberReason::BadDiagonal { i } => r.i = Some(i),
            NotMemberReason::NotPsdGram { min_eigenvalue } | NotMemberReason::NotEdm { min_eigenvalue } => {
                r.min_eigenvalue = Some(min_eigenvalue).filter(|v| v.is_finite());
            }
            NotMemberReason::Exhausted { candidates } => r.candidates = Some(candidates),
        }
        r
    }

    pub fn from_closure(reason: &ClosureReason) -> Self {
        let mut r = Self::named(reason.name());
        match reason {
            ClosureReason::InconsistentZeroPattern { i, j, k } => {
                r.i = Some(*i);
                r.j = Some(*j);
                r.k = Some(*k);
            }
            ClosureReason::BlockNotMember {
                block_index, result, ..
            } => {
                r.block_index = Some(*block_index);
                r.message = result.reason().map(|inner| inner.name().to_string());
            }
            ClosureReason::NotHermitian { i, j } => {
                r.i = Some(*i);
                r.j = Some(*j);
            }
            ClosureReason::NotPsdGram { min_eigenvalue } => r.min_eigenvalue = Some(*min_eigenvalue),
            ClosureReason::BadDiagonal { i } => r.i = Some(*i),
        }
        r
    }

    pub fn from_error(err: &Error) -> Self {
        let mut r = Self::named(match err {
            Error::CandidateBudgetExceeded { .. } => "CandidateBudgetExceeded",
            Error::ReconstructionFailed { .. } => "ReconstructionFailed",
            Error::NotPsd { .. } => "NotPSD",
            Error::NotEdm { .. } => "NotEDM",
            _ => "NumericalError",
        });
        if let Error::CandidateBudgetExceeded { count, .. } = err {
            r.candidates = Some(*count);
        }
        r.message = Some(err.to_string());
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub tol_eig: f64,
    pub tol_zero: f64,
    pub tol_herm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub indices: Vec<usize>,
    pub n_matrix: Vec<Vec<i64>>,
    pub witness: EnsembleFile,
    pub marginal: bool,
}

/// The single JSON document a command prints on stdout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// One of `member`, `not-member`, `edm`, `not-edm`, `error`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<ReasonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<EnsembleFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_matrix: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockReport>>,
    pub candidate_space: u128,
    pub candidates_examined: u64,
    pub marginal: bool,
    pub tolerances: Tolerances,
    pub branch_beta: f64,
}

impl Report {
    pub fn new(command: &str, verdict: &str, branch: &BranchSpec, tol_eig: f64) -> Self {
        Self {
            command: command.into(),
            verdict: verdict.into(),
            reason: None,
            witness: None,
            n_matrix: None,
            permutation: None,
            blocks: None,
            candidate_space: 0,
            candidates_examined: 0,
            marginal: false,
            tolerances: Tolerances {
                tol_eig,
                tol_zero: branch.tol_zero,
                tol_herm: branch.tol_herm,
            },
            branch_beta: branch.beta,
        }
    }

    pub fn from_membership(command: &str, result: &MembershipResult, branch: &BranchSpec) -> Self {
        let verdict = if result.is_member() { "member" } else { "not-member" };
        let mut r = Self::new(command, verdict, branch, result.tol_eig);
        r.branch_beta = result.branch_beta;
        r.candidate_space = result.stats.candidate_space;
        r.candidates_examined = result.stats.candidates_examined;
        r.marginal = result.marginal;
        r.reason = result.reason().map(ReasonReport::from_membership);
        if let Some(w) = result.witness() {
            r.witness = Some(EnsembleFile::from_ensemble(&w.ensemble));
            r.n_matrix = Some(w.n_matrix.to_rows());
        }
        r
    }

    pub fn from_closure(command: &str, result: &ClosureResult, branch: &BranchSpec) -> Self {
        let verdict = if result.is_member() { "member" } else { "not-member" };
        let mut r = Self::new(command, verdict, branch, branch.tol_eig.unwrap_or(0.0));
        r.tolerances.tol_zero = result.tol_zero;
        r.marginal = result.marginal_pattern;
        match &result.verdict {
            ClosureVerdict::Member { permutation, blocks } => {
                r.permutation = Some(permutation.as_slice().to_vec());
                let mut tol_eig: f64 = 0.0;
                let mut reports = Vec::with_capacity(blocks.len());
                for b in blocks {
                    let m = &b.membership;
                    let w = m.witness().expect("closure blocks are members");
                    r.candidate_space = r.candidate_space.saturating_add(m.stats.candidate_space);
                    r.candidates_examined += m.stats.candidates_examined;
                    r.marginal |= m.marginal;
                    tol_eig = tol_eig.max(m.tol_eig);
                    reports.push(BlockReport {
                        indices: b.indices.clone(),
                        n_matrix: w.n_matrix.to_rows(),
                        witness: EnsembleFile::from_ensemble(&w.ensemble),
                        marginal: m.marginal,
                    });
                }
                if branch.tol_eig.is_none() {
                    r.tolerances.tol_eig = tol_eig;
                }
                r.blocks = Some(reports);
            }
            ClosureVerdict::NotMember(reason) => {
                if let ClosureReason::BlockNotMember { result: inner, .. } = reason {
                    r.candidate_space = inner.stats.candidate_space;
                    r.candidates_examined = inner.stats.candidates_examined;
                    r.marginal |= inner.marginal;
                    r.branch_beta = inner.branch_beta;
                    r.tolerances.tol_eig = inner.tol_eig;
                }
                r.reason = Some(ReasonReport::from_closure(reason));
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, RandomSpec};
    use proptest::prelude::*;

    #[test]
    fn accepts_plain_real_entries() {
        let text = r#"{"kind":"matrix","n":2,"entries":[[1,0.5],[[0.5,0],1.0]]}"#;
        let m = parse_matrix(text).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.5, 0.0));
        assert_eq!(m[(1, 1)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(parse_matrix("{"), Err(IoError::Json(_))));
        assert!(parse_matrix(r#"{"kind":"matrix","n":2,"entries":[[1,0],[0]]}"#).is_err());
        assert!(parse_matrix(r#"{"kind":"ensemble","n":1,"entries":[[1]]}"#).is_err());
        assert!(parse_matrix(r#"{"kind":"matrix","n":1,"entries":[[[1,0,0]]]}"#).is_err());
        assert!(
            parse_ensemble(r#"{"kind":"ensemble","n":2,"modes":1,"states":[{"phase":0,"amplitude":[[0,0]]}]}"#)
                .is_err()
        );
        assert!(
            parse_ensemble(r#"{"kind":"ensemble","n":1,"modes":2,"states":[{"phase":0,"amplitude":[[0,0]]}]}"#)
                .is_err()
        );
        assert!(parse_real_matrix(r#"{"kind":"matrix","n":1,"entries":[[[0,1]]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn matrix_round_trip_is_exact(seed in any::<u64>(), n in 1usize..=5) {
            let g = generators::random_gram(seed, n, 2, 1.7).unwrap();
            let text = to_json(&MatrixFile::from_complex(g.matrix()));
            let back = parse_matrix(&text).unwrap();
            prop_assert_eq!(&back, g.matrix());
            prop_assert_eq!(to_json(&MatrixFile::from_complex(&back)), text);
        }

        #[test]
        fn ensemble_round_trip_is_exact(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3) {
            let e = generators::random_ensemble(&RandomSpec { seed, n, m, scale: 2.0 }).unwrap();
            let text = to_json(&EnsembleFile::from_ensemble(&e));
            prop_assert_eq!(parse_ensemble(&text).unwrap(), e);
        }

        #[test]
        fn extreme_doubles_survive(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let m = ComplexMatrix::from_element(1, 1, Complex64::new(x, -x));
            let back = parse_matrix(&to_json(&MatrixFile::from_complex(&m))).unwrap();
            prop_assert_eq!(back[(0, 0)].re.to_bits(), x.to_bits());
        }
    }
}
