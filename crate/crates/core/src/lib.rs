//! Arithmetic heights, Northcott field towers and a CM elliptic curve laboratory.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`]: certified real/complex balls, integer polynomials, root
//!   isolation, primality and Smith normal form;
//! * [`heights`]: Weil and weighted heights of algebraic numbers;
//! * [`radical`]: exact heights and degrees of radicals `∏ p^(e_p)` and of
//!   projective points with radical coordinates;
//! * [`towers`]: explicit radical towers with large Northcott number and
//!   their certificates;
//! * [`cm`]: class groups, Hilbert class polynomials, Faltings heights and
//!   level-2 theta null points of CM elliptic curves.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cm;
pub mod error;
pub mod heights;
pub mod numeric;
pub mod radical;
pub mod towers;

pub use error::{Error, Result};
/// Exact integer and rational types used throughout the public API.
pub use rug::{Integer, Rational};
