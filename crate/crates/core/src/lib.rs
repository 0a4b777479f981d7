//! Gram matrices of multi-mode coherent states.
//!
//! The overlap of coherent states `e^{i phi_i}|alpha_i>` and
//! `e^{i phi_j}|alpha_j>` is
//! `exp(-1/2 (|alpha_i|^2 + |alpha_j|^2 - 2 <alpha_i, alpha_j>) + i (phi_j - phi_i))`.
//! This crate decides exactly which Hermitian matrices arise this way
//! ([`membership::check_membership`]), builds explicit realizations, decides
//! membership in the closure of that set ([`closure::check_closure_membership`]),
//! and provides the Euclidean-distance-matrix tools the theory rests on
//! ([`edm`]).

pub mod cli;
pub mod closure;
pub mod edm;
pub mod error;
pub mod generators;
pub mod hadamard;
pub mod io;
pub mod linalg;
pub mod membership;
pub mod types;

pub use closure::{check_closure_membership, ClosureOptions, ClosureResult};
pub use edm::{check_membership_real_positive, EdmCandidate};
pub use error::{Error, Result};
pub use membership::{check_membership, Centering, MembershipOptions, MembershipResult};
pub use types::{gram_of_ensemble, BranchSpec, CoherentEnsemble, CoherentState, GramMatrix};
