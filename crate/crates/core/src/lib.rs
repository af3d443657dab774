//! Exact-arithmetic construction of a specific nilpotent Z-Lie lattice of
//! class 4 and Hirsch length 25, together with its automorphism-group data
//! and its local pro-isomorphic zeta function.
//!
//! Everything is computed over exact rationals or exact integers; there is
//! no floating point anywhere in this crate.  Each closed formula that the
//! library produces is backed by an independent brute-force oracle living in
//! a different module (or in test code), so that the final rational function
//! and its failure to satisfy a functional equation come out of the machine
//! checked from two directions.

pub mod assoc;
pub mod autgroup;
pub mod free_lie;
pub mod lattice;
pub mod linalg;
pub mod malcev;
pub mod padic;
pub mod ratio;
pub mod sparse;
pub mod verify;
pub mod zeta;

use thiserror::Error;

/// Default seed for every pseudo-random suite; reports echo it back.
pub const DEFAULT_SEED: u64 = 314159;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("expected an integral element")]
    NonIntegral,
    #[error("map is singular on the degree-1 layer")]
    SingularMap,
    #[error("endomorphism does not leave the ideal invariant")]
    NotInvariant,
    #[error("prime {0} is not supported here (need p > 3)")]
    UnsupportedPrime(u64),
    #[error("field order {0} is not supported: {1}")]
    UnsupportedField(u64, &'static str),
    #[error("torus triple violates a^3 = bc")]
    TorusConstraint,
    #[error("valuation triple violates 3*v_a = v_b + v_c")]
    ValuationConstraint,
    #[error("{0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
