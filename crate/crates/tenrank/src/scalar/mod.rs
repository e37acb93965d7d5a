//! Exact scalar tower: arbitrary-precision rationals, cyclotomic field
//! elements of Q(zeta_m), and Laurent polynomials in a formal parameter
//! epsilon with cyclotomic coefficients.
//!
//! Everything here is immutable after construction and uses no floating
//! point anywhere.

mod cyclotomic;
mod laurent;
mod literal;

pub use cyclotomic::{root_filter_sum, zeta, Cyclotomic};
pub use laurent::{poly_gcd_monic, EpsLaurent};
pub use literal::{parse_cyclotomic, parse_rational, parse_scalar};

use num_bigint::BigInt;
use num_traits::One;

/// Arbitrary-precision rational; always stored with positive denominator
/// and gcd(numerator, denominator) = 1.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical literal for a rational: `-?INT[/INT]` with the `/INT` part
/// omitted for integers.
pub fn rational_literal(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Commutative ring operations shared by the scalar kinds that tensors
/// may carry.
pub trait Ring: Clone + PartialEq + std::fmt::Debug + std::fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    /// Canonical literal in the scalar grammar shared by tensor files
    /// and the CLI.
    fn literal(&self) -> String {
        format!("{self}")
    }
}

/// Rings with exact inversion of nonzero elements.
pub trait Field: Ring {
    fn inv(&self) -> crate::Result<Self>;
    fn div(&self, other: &Self) -> crate::Result<Self> {
        Ok(self.mul(&other.inv()?))
    }
}
