//! Square classes `Q*/(Q*)^2` with support in a finite prime set, and pairs
//! of them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("zero has no square class")]
    Zero,
    #[error("{value} has square-free part outside the ambient prime set {primes:?}")]
    OutsideAmbient { value: String, primes: Vec<u64> },
}

/// A class in `Q*/(Q*)^2`: a sign and a sorted set of distinct primes.
///
/// Represents the square-free integer `sign * prod(support)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareClass {
    negative: bool,
    support: Vec<u64>,
}

impl SquareClass {
    pub fn one() -> Self {
        SquareClass { negative: false, support: Vec::new() }
    }

    pub fn minus_one() -> Self {
        SquareClass { negative: true, support: Vec::new() }
    }

    pub fn prime(p: u64) -> Self {
        SquareClass { negative: false, support: vec![p] }
    }

    pub fn from_parts(negative: bool, mut support: Vec<u64>) -> Self {
        support.sort_unstable();
        support.dedup();
        SquareClass { negative, support }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.support.is_empty()
    }

    pub fn divides_by(&self, p: u64) -> bool {
        self.support.binary_search(&p).is_ok()
    }

    pub fn magnitude(&self) -> i128 {
        self.support.iter().map(|&p| p as i128).product()
    }

    /// The canonical square-free representative.
    pub fn value(&self) -> i128 {
        let m = self.magnitude();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

impl Mul for &SquareClass {
    type Output = SquareClass;

    fn mul(self, rhs: &SquareClass) -> SquareClass {
        let (a, b) = (&self.support, &rhs.support);
        let mut support = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    support.push(*x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    support.push(*y);
                    j += 1;
                }
                (Some(x), None) => {
                    support.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    support.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SquareClass { negative: self.negative != rhs.negative, support }
    }
}

impl Mul for SquareClass {
    type Output = SquareClass;

    fn mul(self, rhs: SquareClass) -> SquareClass {
        &self * &rhs
    }
}

/// Positive classes first, then by magnitude.
impl Ord for SquareClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.negative
            .cmp(&other.negative)
            .then_with(|| self.magnitude().cmp(&other.magnitude()))
            .then_with(|| self.support.cmp(&other.support))
    }
}

impl PartialOrd for SquareClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.value() as i64)
    }
}

/// A candidate image `(b1, b2)` of the descent map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DescentPair {
    pub b1: SquareClass,
    pub b2: SquareClass,
}

impl DescentPair {
    pub fn new(b1: SquareClass, b2: SquareClass) -> Self {
        DescentPair { b1, b2 }
    }

    pub fn identity() -> Self {
        DescentPair::new(SquareClass::one(), SquareClass::one())
    }

    pub fn is_identity(&self) -> bool {
        self.b1.is_one() && self.b2.is_one()
    }

    pub fn values(&self) -> [i128; 2] {
        [self.b1.value(), self.b2.value()]
    }
}

impl Mul for &DescentPair {
    type Output = DescentPair;

    fn mul(self, rhs: &DescentPair) -> DescentPair {
        DescentPair::new(&self.b1 * &rhs.b1, &self.b2 * &rhs.b2)
    }
}

impl fmt::Display for DescentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b1, self.b2)
    }
}

/// The group generated by `-1` and a finite set of primes.
///
/// Classes are encoded as bit masks: bit 0 is the sign, bit `i + 1` the
/// `i`-th prime. Pairs use the low half for `b1` and the high half for `b2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambient {
    primes: Vec<u64>,
}

impl Ambient {
    pub fn new(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        assert!(primes.len() < 15, "ambient prime set too large for mask encoding");
        Ambient { primes }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of `F_2` generators of a single class.
    pub fn rank(&self) -> u32 {
        self.primes.len() as u32 + 1
    }

    pub fn contains(&self, c: &SquareClass) -> bool {
        c.support.iter().all(|p| self.primes.binary_search(p).is_ok())
    }

    /// Canonical class of a nonzero integer; its square-free part must be
    /// supported on the ambient primes.
    pub fn from_integer(&self, x: i128) -> Result<SquareClass, ClassError> {
        if x == 0 {
            return Err(ClassError::Zero);
        }
        let mut rest = x.unsigned_abs();
        let mut support = Vec::new();
        for &p in &self.primes {
            let p = p as u128;
            let mut odd = false;
            while rest % p == 0 {
                rest /= p;
                odd = !odd;
            }
            if odd {
                support.push(p as u64);
            }
        }
        let r = num_integer::Roots::sqrt(&rest);
        if r * r != rest {
            return Err(ClassError::OutsideAmbient {
                value: x.to_string(),
                primes: self.primes.clone(),
            });
        }
        Ok(SquareClass { negative: x < 0, support })
    }

    pub fn mul(&self, a: &SquareClass, b: &SquareClass) -> Result<SquareClass, ClassError> {
        for c in [a, b] {
            if !self.contains(c) {
                return Err(ClassError::OutsideAmbient {
                    value: c.to_string(),
                    primes: self.primes.clone(),
                });
            }
        }
        Ok(a * b)
    }

    pub fn encode(&self, c: &SquareClass) -> u32 {
        let mut mask = c.negative as u32;
        for p in &c.support {
            let i = self.primes.binary_search(p).expect("class outside ambient");
            mask |= 1 << (i + 1);
        }
        mask
    }

    pub fn decode(&self, mask: u32) -> SquareClass {
        let support = self
            .primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << (i + 1)) != 0)
            .map(|(_, &p)| p)
            .collect();
        SquareClass { negative: mask & 1 != 0, support }
    }

    pub fn encode_pair(&self, p: &DescentPair) -> u32 {
        self.encode(&p.b1) | (self.encode(&p.b2) << self.rank())
    }

    pub fn decode_pair(&self, mask: u32) -> DescentPair {
        let low = (1u32 << self.rank()) - 1;
        DescentPair::new(self.decode(mask & low), self.decode(mask >> self.rank()))
    }

    /// All `2^(#primes + 1)` classes in canonical order.
    pub fn enumerate(&self) -> Vec<SquareClass> {
        let mut all: Vec<_> = (0..1u32 << self.rank()).map(|m| self.decode(m)).collect();
        all.sort();
        all
    }

    /// All pairs, ordered by `b1` then `b2`.
    pub fn enumerate_pairs(&self) -> Vec<DescentPair> {
        let classes = self.enumerate();
        classes
            .iter()
            .flat_map(|b1| classes.iter().map(move |b2| DescentPair::new(b1.clone(), b2.clone())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn amb() -> Ambient {
        Ambient::new(vec![2, 3, 5, 11, 113])
    }

    #[test]
    fn class_products() {
        let a = amb();
        let c = |x| a.from_integer(x).unwrap();
        assert_eq!(&c(2) * &c(2), SquareClass::one());
        assert_eq!(&c(15) * &c(55), c(33));
        assert_eq!(&c(-2) * &c(-113), c(226));
    }

    #[test]
    fn from_integer_reduces_mod_squares() {
        let a = amb();
        assert_eq!(a.from_integer(18).unwrap(), SquareClass::prime(2));
        assert_eq!(a.from_integer(-4).unwrap(), SquareClass::minus_one());
        assert_eq!(a.from_integer(0), Err(ClassError::Zero));
        assert!(matches!(a.from_integer(7), Err(ClassError::OutsideAmbient { .. })));
        assert_eq!(a.from_integer(7 * 7 * 3).unwrap(), SquareClass::prime(3));
        let a79 = Ambient::new(vec![2, 79, 3121]);
        assert_eq!(a79.from_integer(158).unwrap().value(), 158);
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(Ambient::new(vec![2, 3, 5]).enumerate().len(), 16);
        assert_eq!(Ambient::new(vec![2, 3, 5, 113]).enumerate().len(), 32);
        assert_eq!(Ambient::new(vec![2, 7, 17, 31, 6804361]).enumerate().len(), 64);
        let v: Vec<i128> = Ambient::new(vec![2, 3, 5]).enumerate().iter().map(|c| c.value()).collect();
        assert_eq!(&v[..4], &[1, 2, 3, 5]);
        assert_eq!(v[8], -1);
    }

    #[test]
    fn mul_rejects_foreign_classes() {
        let a = amb();
        assert!(a.mul(&SquareClass::prime(7), &SquareClass::one()).is_err());
    }

    proptest! {
        #[test]
        fn group_laws(x in 0u32..64, y in 0u32..64, z in 0u32..64) {
            let a = amb();
            let (x, y, z) = (a.decode(x), a.decode(y), a.decode(z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert!((&x * &x).is_one());
            prop_assert_eq!(&x * &SquareClass::one(), x.clone());
            prop_assert_eq!(a.encode(&(&x * &y)), a.encode(&x) ^ a.encode(&y));
        }

        #[test]
        fn enumeration_closed_and_distinct(i in 0usize..64, j in 0usize..64) {
            let a = amb();
            let all = a.enumerate();
            let set: std::collections::HashSet<_> = all.iter().cloned().collect();
            prop_assert_eq!(set.len(), all.len());
            prop_assert!(set.contains(&(&all[i] * &all[j])));
        }

        #[test]
        fn from_integer_matches_value(mask in 0u32..64, s in 1i128..50) {
            let a = amb();
            let c = a.decode(mask);
            prop_assert_eq!(a.from_integer(c.value() * s * s).unwrap(), c);
        }
    }
}
