//! Exact and certified numerical substrate.

pub mod ball;
pub mod complex;
pub mod poly;
pub mod primes;
pub mod roots;
pub mod snf;

pub use ball::{digits_to_bits, BigFloat};
pub use complex::BigComplex;
pub use poly::IntPoly;
pub use primes::{is_prime, next_prime};
pub use roots::{poly_roots, MAX_ESCALATIONS};
pub use snf::{smith_normal_form, IntMatrix, SmithForm};

/// Default working precision, in decimal digits.
pub const DEFAULT_DIGITS: u32 = 64;
