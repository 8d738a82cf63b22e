//! Exact computations on twisted loop algebras: filtration quotients at
//! rational apartment points, the induced gradings, invariant maps and the
//! stratification of each quotient by centralizer labels.
//!
//! Everything is exact. Scalars live in a cyclotomic field, loop coefficients
//! are finite Laurent polynomials in a fractional power of `t`, and the only
//! optimisation routine is a rational simplex.

pub mod cli;
pub mod exact;
pub mod invmap;
pub mod linalg;
pub mod lp;
pub mod mpfilt;
pub mod rootdata;
pub mod sample;
pub mod strata;
pub mod vinberg;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),
    #[error("exponent {0} has a denominator not dividing {1}")]
    BadExponent(String, u32),
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error("not a diagram symmetry: {0}")]
    NotADiagramSymmetry(String),
    #[error("invariants not available for type {0}")]
    UnsupportedTypeForInvariants(String),
    #[error("element is not in the filtration subspace: {0}")]
    SupportViolation(String),
    #[error("nilpotence and invariant tests disagree: {0}")]
    InconsistentOracles(String),
    #[error("support weights are not in an open half-space; conjugation needed")]
    NeedsConjugation,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("element is not semisimple")]
    NotSemisimple,
    #[error("lift alignment failed: {0}")]
    NoAlignment(String),
    #[error("subdatum is not graded at this point: {0}")]
    NotGraded(String),
    #[error("config: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
