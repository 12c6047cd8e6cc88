//! The curves `E: y^2 = x (x - 2^m n^2) (x + 2^m)` with `n^2 + 1 = 2q`,
//! their rational 2-torsion and the descent map.

use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::intmath::{factor_squarefree, is_prime, ArithError};
use crate::squareclass::{Ambient, ClassError, DescentPair, SquareClass};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("NotOdd: n = {0} is even")]
    NotOdd(u64),
    #[error("NotSquareFree: n = {0} is divisible by {1}^2")]
    NotSquareFree(u64, u64),
    #[error("QNotPrime: {n}²+1 = {value}")]
    QNotPrime { n: u64, value: u128 },
    #[error("n = {0} is out of range (need 3 <= n < 2^31)")]
    NRange(u64),
    #[error("m = {0} is out of range (need 1 <= m <= 40)")]
    MRange(u32),
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error(transparent)]
    Class(#[from] ClassError),
}

impl From<ArithError> for CurveError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::NotOdd(n) => CurveError::NotOdd(n),
            ArithError::NotSquareFree(n, p) => CurveError::NotSquareFree(n, p),
            other => unreachable!("factor_squarefree raised {other}"),
        }
    }
}

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Prime(l) => write!(f, "{l}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeronCurve {
    n: u64,
    m: u32,
    primes: Vec<u64>,
    q: u64,
    ambient: Ambient,
}

impl HeronCurve {
    pub fn new(n: u64, m: u32) -> Result<Self, CurveError> {
        if n % 2 == 0 {
            return Err(CurveError::NotOdd(n));
        }
        if !(3..1 << 31).contains(&n) {
            return Err(CurveError::NRange(n));
        }
        if !(1..=40).contains(&m) {
            return Err(CurveError::MRange(m));
        }
        let primes = factor_squarefree(n)?;
        let value = n as u128 * n as u128 + 1;
        let q = (value / 2) as u64;
        if !is_prime(q) {
            return Err(CurveError::QNotPrime { n, value });
        }
        let mut s = vec![2];
        s.extend(&primes);
        s.push(q);
        Ok(HeronCurve { n, m, primes, q, ambient: Ambient::new(s) })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Prime factors of `n`, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn k(&self) -> usize {
        self.primes.len()
    }

    /// 1 for odd `m`, 0 for even `m`.
    pub fn delta(&self) -> u32 {
        self.m % 2
    }

    /// `2^m n^2`, the nonzero root on the positive side.
    pub fn a(&self) -> i128 {
        (1i128 << self.m) * (self.n as i128) * (self.n as i128)
    }

    /// `2^m`, so that `-b` is the negative root.
    pub fn b(&self) -> i128 {
        1i128 << self.m
    }

    pub fn discriminant(&self) -> BigInt {
        let n = BigInt::from(self.n);
        let q = BigInt::from(self.q);
        (BigInt::one() << (6 * self.m + 6)) * num_traits::pow(n, 4) * &q * &q
    }

    /// `{2} ∪ primes ∪ {q}`: the finite part of `S`.
    pub fn bad_primes(&self) -> &[u64] {
        self.ambient.primes()
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    /// `∞`, then `2`, `3` and the odd bad primes, ascending.
    pub fn places_to_check(&self) -> Vec<Place> {
        let mut ls: Vec<u64> = self.bad_primes().to_vec();
        ls.push(3);
        ls.sort_unstable();
        ls.dedup();
        std::iter::once(Place::Real).chain(ls.into_iter().map(Place::Prime)).collect()
    }

    fn two_delta(&self) -> SquareClass {
        if self.delta() == 1 {
            SquareClass::prime(2)
        } else {
            SquareClass::one()
        }
    }

    fn two_q(&self) -> SquareClass {
        SquareClass::from_parts(false, vec![2, self.q])
    }

    /// Images of `O`, `(0,0)`, `(a,0)` and `(-b,0)`, sorted.
    pub fn torsion_image(&self) -> Vec<DescentPair> {
        let t1 = DescentPair::new(SquareClass::minus_one(), &SquareClass::minus_one() * &self.two_delta());
        let t2 = DescentPair::new(self.two_delta(), self.two_q());
        let t3 = &t1 * &t2;
        let mut v = vec![DescentPair::identity(), t1, t2, t3];
        v.sort();
        v
    }

    pub fn rhs(&self, x: &Ratio<BigInt>) -> Ratio<BigInt> {
        let a = Ratio::from_integer(BigInt::from(self.a()));
        let b = Ratio::from_integer(BigInt::from(self.b()));
        x * (x - a) * (x + b)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Identity => true,
            CurvePoint::Affine { x, y } => {
                let x = to_big(x);
                let y = to_big(y);
                &y * &y == self.rhs(&x)
            }
        }
    }

    fn class_of(&self, r: &Ratio<BigInt>) -> Result<SquareClass, CurveError> {
        // num * den has the same class as num / den
        let v = r.numer() * r.denom();
        let v: i128 = v
            .try_into()
            .map_err(|_| CurveError::NotOnCurve(format!("x-coordinate {r} too large")))?;
        Ok(self.ambient.from_integer(v)?)
    }

    /// The descent map on a rational point.
    pub fn beta(&self, p: &CurvePoint) -> Result<DescentPair, CurveError> {
        if !self.contains(p) {
            return Err(CurveError::NotOnCurve(p.to_string()));
        }
        let x = match p {
            CurvePoint::Identity => return Ok(DescentPair::identity()),
            CurvePoint::Affine { x, .. } => to_big(x),
        };
        let a = Ratio::from_integer(BigInt::from(self.a()));
        if x.is_zero() {
            return Ok(DescentPair::new(
                SquareClass::minus_one(),
                &SquareClass::minus_one() * &self.two_delta(),
            ));
        }
        if x == a {
            return Ok(DescentPair::new(self.two_delta(), self.two_q()));
        }
        Ok(DescentPair::new(self.class_of(&x)?, self.class_of(&(x - a))?))
    }

    pub fn two_torsion(&self) -> [CurvePoint; 4] {
        [
            CurvePoint::Identity,
            CurvePoint::affine_int(0, 0),
            CurvePoint::affine_int(self.a(), 0),
            CurvePoint::affine_int(-self.b(), 0),
        ]
    }
}

impl fmt::Display for HeronCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x(x - 2^{} * {}^2)(x + 2^{})", self.m, self.n, self.m)
    }
}

fn to_big(r: &Rational) -> Ratio<BigInt> {
    Ratio::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// A rational point, or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Identity,
    Affine { x: Rational, y: Rational },
}

impl CurvePoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn affine_int(x: i128, y: i128) -> Self {
        CurvePoint::Affine { x: Ratio::from_integer(x), y: Ratio::from_integer(y) }
    }

    pub fn is_two_torsion(&self) -> bool {
        match self {
            CurvePoint::Identity => true,
            CurvePoint::Affine { y, .. } => y.is_zero(),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Identity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn construction_examples() {
        let c = HeronCurve::new(3, 1).unwrap();
        assert_eq!(c.q(), 5);
        assert_eq!(c.bad_primes(), &[2, 3, 5]);
        assert_eq!(HeronCurve::new(15, 2).unwrap().q(), 113);
        assert_eq!(
            HeronCurve::new(7, 1),
            Err(CurveError::QNotPrime { n: 7, value: 50 })
        );
        assert_eq!(HeronCurve::new(7, 1).unwrap_err().to_string(), "QNotPrime: 7²+1 = 50");
        assert_eq!(HeronCurve::new(9, 1), Err(CurveError::NotSquareFree(9, 3)));
        assert_eq!(HeronCurve::new(10, 1), Err(CurveError::NotOdd(10)));
        assert_eq!(HeronCurve::new(3, 0), Err(CurveError::MRange(0)));
    }

    /// Discriminant of `y^2 = (x - e1)(x - e2)(x - e3)` is
    /// `16 * prod (ei - ej)^2`; compare against the closed form.
    #[test]
    fn discriminant_matches_root_differences() {
        for (n, m) in [(3, 1), (15, 2), (79, 5), (3689, 3), (6545, 6)] {
            let c = HeronCurve::new(n, m).unwrap();
            let (e1, e2, e3) = (BigInt::from(0), BigInt::from(c.a()), BigInt::from(-c.b()));
            let d = |x: &BigInt, y: &BigInt| (x - y) * (x - y);
            let disc = BigInt::from(16) * d(&e1, &e2) * d(&e1, &e3) * d(&e2, &e3);
            assert_eq!(disc, c.discriminant(), "n={n} m={m}");
            let mut support: Vec<u64> = crate::intmath::factor(n)
                .into_iter()
                .chain([2, c.q()])
                .collect();
            support.sort_unstable();
            support.dedup();
            assert_eq!(support, c.bad_primes());
        }
    }

    #[test]
    fn places() {
        let p = |n, m| HeronCurve::new(n, m).unwrap().places_to_check();
        use Place::*;
        assert_eq!(p(3, 1), vec![Real, Prime(2), Prime(3), Prime(5)]);
        assert_eq!(p(15, 1), vec![Real, Prime(2), Prime(3), Prime(5), Prime(113)]);
        assert_eq!(p(79, 2), vec![Real, Prime(2), Prime(3), Prime(79), Prime(3121)]);
    }

    #[test]
    fn torsion_images() {
        let c = HeronCurve::new(15, 1).unwrap();
        let a = c.ambient();
        let pair = |x, y| DescentPair::new(a.from_integer(x).unwrap(), a.from_integer(y).unwrap());
        let mut odd = vec![pair(1, 1), pair(-1, -2), pair(2, 226), pair(-2, -113)];
        odd.sort();
        assert_eq!(c.torsion_image(), odd);
        let c = HeronCurve::new(15, 2).unwrap();
        let mut even = vec![pair(1, 1), pair(-1, -1), pair(1, 226), pair(-1, -226)];
        even.sort();
        assert_eq!(c.torsion_image(), even);
    }

    #[test]
    fn beta_on_two_torsion() {
        for (n, m) in [(3, 1), (3, 2), (15, 3), (79, 4)] {
            let c = HeronCurve::new(n, m).unwrap();
            let imgs: Vec<_> = c.two_torsion().iter().map(|p| c.beta(p).unwrap()).collect();
            assert!(imgs[0].is_identity());
            assert_eq!(imgs[3], &imgs[1] * &imgs[2], "homomorphism on torsion");
            let mut sorted = imgs.clone();
            sorted.sort();
            assert_eq!(sorted, c.torsion_image());
        }
        let c = HeronCurve::new(3, 1).unwrap();
        assert_eq!(c.beta(&CurvePoint::affine_int(0, 0)).unwrap().values(), [-1, -2]);
        assert_eq!(c.beta(&CurvePoint::affine_int(18, 0)).unwrap().values(), [2, 10]);
        assert!(c.beta(&CurvePoint::affine_int(1, 1)).is_err());
    }
}
