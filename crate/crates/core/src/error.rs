//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A resource cap was exceeded.  `what` names the operation, `limit` the
    /// cap that applies and `got` the offending size.
    CapExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    /// A word failed validation (duplicate letter, decreasing indices, or an
    /// index out of range for the ambient parameters).
    InvalidWord(String),
    /// Failed to parse a word, polynomial, or path from text.
    Parse(String),
    /// The relation handed to `build_poset` is not a partial order; the
    /// string names the axiom and the offending element indices.
    NotAPartialOrder(String),
    /// The poset lacks the global minimum or maximum the operation requires.
    NotBounded(&'static str),
    /// The requested operation has no construction rule for this input.
    Unsupported(&'static str),
    /// The two endpoints are incomparable, so the requested interval or
    /// Möbius value does not exist.
    Incomparable(usize, usize),
    /// An element index is out of range for the poset.
    NoSuchElement(usize),
    /// The map handed to `check_anti_isomorphism` is not a bijection.
    NotABijection(String),
    /// The vertex set is not a face of the stated complex.
    NotAFace(String),
    /// The pair of words is not a cover in the bubble order.
    NotACover(String),
    /// The vertex or face does not belong to the complex.
    NotInComplex(String),
    /// `join` requires label-disjoint ground sets.
    GroundSetsOverlap(String),
    /// The operation needs a pure complex.
    NotPure(&'static str),
    /// The facet order handed to `check_shelling` is not a permutation.
    NotAPermutation(String),
    /// Arity mismatch when evaluating or substituting a polynomial.
    ArityMismatch { expected: usize, got: usize },
    /// The operation is only defined for square parameters (m == n).
    SquareOnly(&'static str),
    /// Exact integer arithmetic overflowed its fixed-width fast path.
    Overflow(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CapExceeded { what, limit, got } => write!(
                f,
                "instance too large for {what}: size {got} exceeds cap {limit}"
            ),
            Error::InvalidWord(msg) => write!(f, "invalid shuffle word: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::NotAPartialOrder(msg) => write!(f, "not a partial order: {msg}"),
            Error::NotBounded(what) => write!(f, "poset is not bounded: {what}"),
            Error::Unsupported(what) => write!(f, "unsupported operation: {what}"),
            Error::Incomparable(a, b) => {
                write!(f, "elements {a} and {b} are incomparable")
            }
            Error::NoSuchElement(i) => write!(f, "no element with index {i}"),
            Error::NotABijection(msg) => write!(f, "not a bijection: {msg}"),
            Error::NotAFace(msg) => write!(f, "not a face: {msg}"),
            Error::NotACover(msg) => write!(f, "not a cover relation: {msg}"),
            Error::NotInComplex(msg) => write!(f, "not in the complex: {msg}"),
            Error::GroundSetsOverlap(msg) => write!(f, "ground sets overlap: {msg}"),
            Error::NotPure(what) => write!(f, "{what} requires a pure complex"),
            Error::NotAPermutation(msg) => {
                write!(f, "facet order is not a permutation: {msg}")
            }
            Error::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: expected {expected} values, got {got}")
            }
            Error::SquareOnly(what) => write!(f, "{what} requires m == n"),
            Error::Overflow(what) => write!(f, "integer overflow in {what}"),
        }
    }
}

/// Convenient alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
