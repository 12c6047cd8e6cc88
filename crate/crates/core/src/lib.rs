//! 2-descent on the Heron-type curves `y^2 = x (x - 2^m n^2) (x + 2^m)`.
//!
//! Local solvability of the descent torsors is decided exactly at every
//! bad place, producing the 2-Selmer group, an upper bound for the
//! Mordell-Weil rank, and certificates for each verdict.

pub mod curve;
pub mod homspace;
pub mod intmath;
pub mod localsolve;
pub(crate) mod padic;
pub mod pointsearch;
pub mod selmer;
pub mod squareclass;
pub mod tables;

/// Default scalar for curve data and exact checks.
pub type Int = i128;
pub type Rational = num_rational::Ratio<i128>;
pub use num_bigint::BigInt;

pub use curve::{CurveError, CurvePoint, HeronCurve, Place};
pub use homspace::HomogeneousSpace;
pub use localsolve::{LocalConfig, LocalVerdict, Status};
pub use squareclass::{Ambient, DescentPair, SquareClass};
