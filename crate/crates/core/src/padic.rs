//! l-adic helpers on `BigInt`: valuations, square classes and square roots to
//! a requested precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::intmath::{legendre, sqrt_mod};

#[cfg(test)]
fn big(x: impl Into<BigInt>) -> BigInt {
    x.into()
}

pub(crate) fn lpow(l: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(l), k as usize)
}

/// `None` for zero, otherwise `(v, x / l^v)`.
pub(crate) fn val(x: &BigInt, l: u64) -> Option<(u32, BigInt)> {
    if x.is_zero() {
        return None;
    }
    let lb = BigInt::from(l);
    let mut u = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = u.div_rem(&lb);
        if !r.is_zero() {
            return Some((v, u));
        }
        u = q;
        v += 1;
    }
}

/// Valuation with zero mapped to `cap`.
pub(crate) fn val_capped(x: &BigInt, l: u64, cap: u32) -> u32 {
    val(x, l).map_or(cap, |(v, _)| v.min(cap))
}

fn unit_residue(u: &BigInt, m: u64) -> u64 {
    u.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Square-class test in `Q_l` for an integer; zero counts as a square.
pub(crate) fn is_local_square(x: &BigInt, l: u64) -> bool {
    match val(x, l) {
        None => true,
        Some((v, u)) => v % 2 == 0 && unit_is_square(&u, l),
    }
}

pub(crate) fn unit_is_square(u: &BigInt, l: u64) -> bool {
    if l == 2 {
        unit_residue(u, 8) == 1
    } else {
        legendre(unit_residue(u, l) as i128, l) == 1
    }
}

/// `r` with `r^2 = x (mod l^(2v + prec))` where `v = v_l(x)/2`; `x` must be a
/// nonzero local square.
pub(crate) fn local_sqrt(x: &BigInt, l: u64, prec: u32) -> Option<BigInt> {
    let (v, u) = val(x, l)?;
    if v % 2 == 1 || !unit_is_square(&u, l) {
        return None;
    }
    let s = unit_sqrt(&u, l, prec);
    Some(s * lpow(l, v / 2))
}

fn unit_sqrt(u: &BigInt, l: u64, prec: u32) -> BigInt {
    let modulus = lpow(l, prec.max(3));
    let u = u.mod_floor(&modulus);
    if l == 2 {
        // bitwise lift: s^2 = u mod 2^(i+1) given s^2 = u mod 2^i, i >= 3
        let mut s = BigInt::one();
        for i in 3..prec.max(3) {
            let m = BigInt::one() << (i + 1);
            if !((&s * &s - &u).mod_floor(&m)).is_zero() {
                s += BigInt::one() << (i - 1);
            }
        }
        return s.mod_floor(&modulus);
    }
    let r0 = sqrt_mod(unit_residue(&u, l) as i128, l).expect("unit is a residue");
    let mut s = BigInt::from(r0);
    let mut k = 1u32;
    while k < prec {
        k = (2 * k).min(prec);
        let m = lpow(l, k);
        let two_s = (&s * 2u32).mod_floor(&m);
        let inv = mod_inverse(&two_s, &m);
        s = (&s - (&s * &s - &u) * inv).mod_floor(&m);
    }
    s.mod_floor(&modulus)
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_squares() {
        assert!(is_local_square(&big(17), 2));
        assert!(!is_local_square(&big(5), 2));
        assert!(is_local_square(&big(-7), 2));
        assert!(!is_local_square(&big(2), 2));
        assert!(is_local_square(&big(4 * 17), 2));
        assert!(is_local_square(&big(2), 7));
        assert!(!is_local_square(&big(7 * 2), 7));
        assert!(is_local_square(&big(0), 5));
    }

    #[test]
    fn sqrt_lifts_to_precision() {
        for (x, l) in [(17i64, 2u64), (-7, 2), (2, 7), (4 * 9 * 11, 5), (-2, 113)] {
            let x = big(x);
            let r = local_sqrt(&x, l, 30).unwrap();
            let (v, _) = val(&x, l).unwrap();
            let m = lpow(l, 30 + v);
            assert!(((&r * &r - &x).mod_floor(&m)).is_zero(), "{x} mod {l}");
        }
        assert!(local_sqrt(&big(3), 2, 10).is_none());
    }
}
