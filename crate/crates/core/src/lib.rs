//! Exact-arithmetic analysis of resolution dual graphs of normal surface
//! singularities: discrepancy profiles, fundamental cycles, combinatorial
//! blow-ups, purely inseparable index-one covers in positive characteristic,
//! and shape classification of the weighted dual tree.
//!
//! All arithmetic is exact. Rational numbers are ratios of unbounded
//! integers; nothing is ever rounded.

pub mod blowup;
pub mod classify;
pub mod cover;
pub mod discrepancy;
pub mod error;
pub mod format;
pub mod graph;
pub mod linalg;

/// Unbounded signed integer used for determinants, indices, and cycle numbers.
pub type Int = num_bigint::BigInt;

/// Exact rational number: always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub use error::Error;
