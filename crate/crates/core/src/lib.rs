//! Verification workbench for the correspondence between qKZ difference
//! equations built from GL(N) R-matrices and Macdonald-Ruijsenaars operators.
//!
//! All spin-chain operators are assembled as sparse matrices on `V^{⊗n}` over a
//! pluggable scalar domain, so the operator identities can be checked exactly
//! over the rationals, or numerically in double precision.

pub mod chain_model;
pub mod cli;
pub mod correspondence;
pub mod error;
pub mod par;
pub mod report;
pub mod rmatrix;
pub mod sampling;
pub mod scalars;
pub mod tensor_space;
pub mod verification;

pub use error::{Error, Result};
