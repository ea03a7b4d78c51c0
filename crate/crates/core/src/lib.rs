//! Commutative group codes with large minimum distance.
//!
//! A code is the orbit `{ O(g) x : g in G }` of a unit vector under a finite
//! commutative group of orthogonal matrices. For even dimension `n = 2k` and
//! groups without reflection blocks, `G` is described by an integer lattice
//! of exponent vectors, and for each such lattice the best initial vector is
//! the solution of a small linear program.

pub mod arith;
pub mod cli;
pub mod code;
pub mod error;
pub mod intmat;
pub mod ivp;
pub mod lattice;
pub mod search;

pub use error::{Error, Result};
pub use intmat::{
    is_special_hnf, scaled_inverse, snf, special_hnf, HnfResult, IntMatrix, SnfResult,
};
pub use lattice::{
    canonical_signature, enumerate_diagonals, enumerate_lattices, group_elements,
    isomorphism_class, CandidateLattice, CandidateSet, DedupRule, DiagonalBound, DiagonalProfile,
    EnumerationOptions, GroupElementTable, GroupPresentation, Signature,
};
