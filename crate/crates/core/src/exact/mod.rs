//! Exact arithmetic substrate: fields over rationals, dense rational
//! matrices with exact elimination, angles stored as fractions of a turn,
//! and the cyclotomic ring used to check root-of-unity identities exactly.

pub mod cyclotomic;
pub mod field;
pub mod matrix;
pub mod turn;

pub use cyclotomic::Cyclotomic;
pub use field::FieldKind;
pub use matrix::{RatMatrix, Solution};
pub use turn::TurnFraction;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

/// Lifts a natural number into the rationals.
pub fn rat(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Small-integer rational constructor, mostly for tests and fixtures.
pub fn ri(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
