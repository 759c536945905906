//! Operator-theoretic invariants of monomial invariant subspaces of the
//! finite-rank d-shift on the symmetric Fock space H²(ℂᵈ) ⊗ ℂʳ.
//!
//! The library works in two regimes:
//!
//! * **exact** — monomial submodules admit a block-diagonal structure over the
//!   exponent lattice, so commutator spectra, defect identities, Dirac kernels
//!   and curvature are computed in exact rational arithmetic
//!   ([`lattice`], [`fock`], [`schatten`], [`dirac`]);
//! * **numeric** — homogeneous (non-monomial) vector-polynomial generators are
//!   handled by floating-point graded projections ([`probe`]).
//!
//! [`problem`], [`report`] and [`runner`] provide the JSON problem format,
//! the report schema and the command dispatch used by the `dshift` CLI and
//! the Python bindings.

pub mod dirac;
pub mod exterior;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod probe;
pub mod problem;
pub mod report;
pub mod runner;
pub mod schatten;

use thiserror::Error;

/// Exact rational scalar used throughout the exact path.
pub type Rat = num_rational::BigRational;

/// Errors shared by all modules.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis {axis} out of range 1..={d}")]
    InvalidAxis { axis: usize, d: usize },
    #[error("cutoff {got} too small: need at least {required}")]
    CutoffTooSmall { required: u32, got: u32 },
    #[error("operators are defined on different truncated bases")]
    BasisMismatch,
    #[error("fiber vector has length {got}, expected rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("generator {index} is not homogeneous")]
    NonHomogeneous { index: usize },
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Small deterministic xorshift generator used by randomized self-checks and
/// fixture construction. Not cryptographic; chosen so tests reproduce exactly
/// on every platform.
#[derive(Debug, Clone)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed.max(1) }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Small signed rational with numerator in `-9..=9` and denominator in `1..=9`.
    pub fn small_rat(&mut self) -> Rat {
        let num = self.below(19) as i64 - 9;
        let den = self.below(9) as i64 + 1;
        Rat::new(num.into(), den.into())
    }
}
