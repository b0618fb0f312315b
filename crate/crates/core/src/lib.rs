//! Shuffle words and the combinatorics built on top of them.
//!
//! A *shuffle word* interleaves a subset of `x1 < x2 < … < xm` with a subset
//! of `y1 < y2 < … < yn`, each side kept in increasing order.  The set
//! `Shuf(m, n)` of all such words carries two partial orders generated by
//! letter moves (see [`word`]), and the lower covers of each word cut out a
//! simplicial complex of noncrossing matchings (see [`complex`]).  Counting
//! words and faces by these statistics produces a family of two-variable
//! polynomials — the H-, F-, and M-triangles of [`triangle`] — that are
//! related by exact substitution identities, all of which this crate can
//! state and machine-check with arbitrary-precision arithmetic.
//!
//! The crate is `no_std` (it requires `alloc`) and has no IO; the companion
//! CLI crate layers file formats and command-line plumbing on top.
//!
//! Module tour:
//!
//! * [`word`] — shuffle words, the bubble and shuffle orders, cover moves,
//!   and cover labelings.
//! * [`poset`] — finite posets: covers, Möbius function, lattice and
//!   anti-isomorphism checks, seeded linear extensions.
//! * [`complex`] — the noncrossing matching complex `Γ(m, n)`, the bipartite
//!   analogue `Δ(m, n)` with boundary sentinels, shellings, vertex
//!   decompositions, and Björner–Wachs degree tables.
//! * [`poly`] — sparse multivariate polynomials over `BigInt` and exact
//!   rational evaluation.
//! * [`triangle`] — the enumerative polynomials themselves plus a verifier
//!   for the identities tying them together.
//! * [`path`] — Delannoy and Schröder lattice paths and their bijections
//!   with faces and flags of the matching complex.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod complex;
pub mod error;
pub mod path;
pub mod poly;
pub mod poset;
pub mod triangle;
pub mod word;

pub use error::{Error, Result};
pub use word::Params;
