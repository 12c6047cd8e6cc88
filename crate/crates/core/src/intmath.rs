//! Exact integer primitives: Jacobi symbols, valuations, primality,
//! modular square roots and square-free factorization.
//!
//! The symbol and valuation routines are generic over the integer type so the
//! same code serves `i64`/`i128` hot paths and `BigInt` certificate checks.

use std::fmt::Display;

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("Jacobi symbol needs an odd positive modulus, got {0}")]
    InvalidJacobiModulus(String),
    #[error("valuation of zero is infinite")]
    InfiniteValuation,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("NotOdd: {0} is even")]
    NotOdd(u64),
    #[error("NotSquareFree: {0} is divisible by {1}^2")]
    NotSquareFree(u64, u64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

/// `x = unit * l^exponent` with `unit` prime to `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation<T> {
    pub exponent: i64,
    pub unit: T,
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi<T>(a: &T, n: &T) -> Result<i8, ArithError>
where
    T: Integer + Signed + Clone + FromPrimitive + Display,
{
    if !n.is_positive() || n.is_even() {
        return Err(ArithError::InvalidJacobiModulus(n.to_string()));
    }
    let two = T::from_u8(2).unwrap();
    let three = T::from_u8(3).unwrap();
    let four = T::from_u8(4).unwrap();
    let five = T::from_u8(5).unwrap();
    let eight = T::from_u8(8).unwrap();

    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i8;
    while !a.is_zero() {
        while a.is_even() {
            a = a / two.clone();
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { sign } else { 0 })
}

/// Legendre symbol for a prime modulus given as `u64`, evaluated on an `i128`.
pub fn legendre(a: i128, l: u64) -> i8 {
    debug_assert!(l % 2 == 1);
    let r = a.rem_euclid(l as i128) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (l - 1) / 2, l) == 1 {
        1
    } else {
        -1
    }
}

/// l-adic valuation of a nonzero integer.
pub fn valuation<T>(x: &T, l: &T) -> Result<Valuation<T>, ArithError>
where
    T: Integer + Clone,
{
    if x.is_zero() {
        return Err(ArithError::InfiniteValuation);
    }
    let mut unit = x.clone();
    let mut exponent = 0i64;
    loop {
        let (q, r) = unit.div_rem(l);
        if !r.is_zero() {
            break;
        }
        unit = q;
        exponent += 1;
    }
    Ok(Valuation { exponent, unit })
}

/// l-adic valuation of a nonzero rational; the unit keeps whatever part of
/// the denominator is prime to `l`.
pub fn valuation_ratio<T>(x: &Ratio<T>, l: &T) -> Result<Valuation<Ratio<T>>, ArithError>
where
    T: Integer + Clone,
{
    if x.numer().is_zero() {
        return Err(ArithError::InfiniteValuation);
    }
    let num = valuation(x.numer(), l)?;
    let den = valuation(x.denom(), l)?;
    Ok(Valuation {
        exponent: num.exponent - den.exponent,
        unit: Ratio::new(num.unit, den.unit),
    })
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// First twelve primes: a deterministic witness set for every n < 3.3e24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, exact on all of `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Square root of `a` modulo an odd prime `l` (Tonelli-Shanks), or `None`
/// when `a` is a non-residue. Returns the smaller of the two roots.
pub fn sqrt_mod(a: i128, l: u64) -> Option<u64> {
    debug_assert!(l > 2);
    let a = a.rem_euclid(l as i128) as u64;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (l - 1) / 2, l) != 1 {
        return None;
    }
    let root = if l % 4 == 3 {
        pow_mod(a, (l + 1) / 4, l)
    } else {
        let s = (l - 1).trailing_zeros();
        let q = (l - 1) >> s;
        let mut z = 2u64;
        while pow_mod(z, (l - 1) / 2, l) != l - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, l);
        let mut t = pow_mod(a, q, l);
        let mut r = pow_mod(a, (q + 1) / 2, l);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod(t2, t2, l);
                i += 1;
            }
            let b = pow_mod(c, 1u64 << (m - i - 1), l);
            m = i;
            c = mul_mod(b, b, l);
            t = mul_mod(t, c, l);
            r = mul_mod(r, b, l);
        }
        r
    };
    Some(root.min(l - root))
}

/// `Some(r)` with `r^2 = n` when `n` is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

const TRIAL_LIMIT: u64 = 1_000_000;

fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
    let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = (1..)
        .find_map(|c| pollard_brent(n, c))
        .expect("composite input always splits for some constant");
    split_large(d, out);
    split_large(n / d, out);
}

/// Prime factorization with multiplicity, ascending.
pub fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n && p <= TRIAL_LIMIT {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        split_large(n, &mut out);
    }
    out.sort_unstable();
    out
}

/// Prime factors of an odd square-free `n`, ascending.
pub fn factor_squarefree(n: u64) -> Result<Vec<u64>, ArithError> {
    if n % 2 == 0 {
        return Err(ArithError::NotOdd(n));
    }
    let primes = factor(n);
    if let Some(w) = primes.windows(2).find(|w| w[0] == w[1]) {
        return Err(ArithError::NotSquareFree(n, w[0]));
    }
    Ok(primes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn jacobi_small_values() {
        assert_eq!(jacobi(&2i64, &7).unwrap(), 1);
        assert_eq!(jacobi(&2i64, &5).unwrap(), -1);
        assert_eq!(jacobi(&0i64, &5).unwrap(), 0);
        assert_eq!(jacobi(&17i128, &76441).unwrap(), 1);
        assert!(jacobi(&3i64, &8).is_err());
        assert!(jacobi(&3i64, &-7).is_err());
        assert_eq!(
            jacobi(&BigInt::from(-1), &BigInt::from(13)).unwrap(),
            1
        );
    }

    #[test]
    fn euler_criterion_matches_for_17_mod_76441() {
        // 76441 is prime; Euler's criterion is an independent route.
        assert!(is_prime(76441));
        assert_eq!(pow_mod(17, (76441 - 1) / 2, 76441), 1);
    }

    #[test]
    fn valuations() {
        assert_eq!(
            valuation(&48i64, &2).unwrap(),
            Valuation { exponent: 4, unit: 3 }
        );
        assert_eq!(
            valuation(&1i64, &7).unwrap(),
            Valuation { exponent: 0, unit: 1 }
        );
        let v = valuation_ratio(&Ratio::new(9i64, 16), &2).unwrap();
        assert_eq!(v.exponent, -4);
        assert_eq!(v.unit, Ratio::from_integer(9));
        assert_eq!(valuation(&0i64, &3), Err(ArithError::InfiniteValuation));
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(21841));
        assert!(is_prime(6804361));
        assert!(!is_prime(1));
        assert!(!is_prime(25));
        assert!(is_prime(21418513));
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751)); // strong pseudoprime to 2, 3, 5, 7
    }

    #[test]
    fn sqrt_mod_examples() {
        let r = sqrt_mod(2, 7).unwrap();
        assert!(r == 3 || r == 4);
        assert_eq!(sqrt_mod(0, 5), Some(0));
        assert_eq!(sqrt_mod(2, 5), None);
        // l = 1 mod 8 exercises the full Tonelli-Shanks loop
        let r = sqrt_mod(-2, 113).unwrap();
        assert_eq!((r * r + 2) % 113, 0);
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factor_squarefree(3689).unwrap(), vec![7, 17, 31]);
        assert_eq!(factor_squarefree(1).unwrap(), Vec::<u64>::new());
        assert_eq!(factor_squarefree(9), Err(ArithError::NotSquareFree(9, 3)));
        assert_eq!(factor_squarefree(10), Err(ArithError::NotOdd(10)));
        assert_eq!(factor(1_000_003 * 1_000_033), vec![1_000_003, 1_000_033]);
        assert_eq!(factor(4_294_967_291 * 3), vec![3, 4_294_967_291]);
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(144), Some(12));
        assert_eq!(exact_sqrt(145), None);
        assert_eq!(exact_sqrt(-4), None);
        assert_eq!(exact_sqrt(0), Some(0));
    }
}
