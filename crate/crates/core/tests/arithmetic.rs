use heron_descent::intmath::{
    factor, factor_squarefree, is_prime, jacobi, legendre, sqrt_mod, valuation, valuation_ratio, ArithError,
};
use heron_descent::{BigInt, Rational};
use proptest::prelude::*;

fn sieve(limit: usize) -> Vec<bool> {
    let mut p = vec![true; limit + 1];
    p[0] = false;
    p[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if p[i] {
            for j in (i * i..=limit).step_by(i) {
                p[j] = false;
            }
        }
        i += 1;
    }
    p
}

#[test]
fn primality_matches_sieve_below_a_million() {
    let s = sieve(1_000_000);
    for (n, &expected) in s.iter().enumerate() {
        assert_eq!(is_prime(n as u64), expected, "n = {n}");
    }
}

#[test]
fn fixture_moduli_are_prime() {
    for q in [5u64, 113, 21841, 13613, 19013, 3121, 76441, 2521, 6804361, 21418513] {
        assert!(is_prime(q), "{q}");
    }
    assert!(!is_prime(1));
    assert!(!is_prime(25));
}

#[test]
fn jacobi_matches_square_enumeration() {
    let s = sieve(10_000);
    for l in (3..10_000usize).filter(|&l| s[l]) {
        let mut square = vec![false; l];
        for x in 1..l {
            square[x * x % l] = true;
        }
        for a in 0..l {
            let expected = if a == 0 { 0 } else if square[a] { 1 } else { -1 };
            assert_eq!(jacobi(&(a as i64), &(l as i64)).unwrap(), expected, "({a}/{l})");
        }
    }
}

#[test]
fn jacobi_rejects_even_modulus() {
    assert!(matches!(jacobi(&3i64, &8i64), Err(ArithError::InvalidJacobiModulus(_))));
    assert!(jacobi(&3i64, &-7i64).is_err());
}

#[test]
fn symbol_examples() {
    assert_eq!(jacobi(&2i64, &7i64).unwrap(), 1);
    assert_eq!(jacobi(&2i64, &5i64).unwrap(), -1);
    assert_eq!(jacobi(&17i64, &76441i64).unwrap(), 1);
    assert_eq!(jacobi(&BigInt::from(17), &BigInt::from(76441)).unwrap(), 1);
}

#[test]
fn sqrt_examples() {
    assert!(matches!(sqrt_mod(2, 7), Some(3) | Some(4)));
    assert_eq!(sqrt_mod(0, 5), Some(0));
    assert_eq!(sqrt_mod(2, 5), None);
}

#[test]
fn valuation_examples() {
    let v = valuation(&48i64, &2).unwrap();
    assert_eq!((v.exponent, v.unit), (4, 3));
    let v = valuation(&1i64, &7).unwrap();
    assert_eq!((v.exponent, v.unit), (0, 1));
    let v = valuation_ratio(&Rational::new(9, 16), &2).unwrap();
    assert_eq!((v.exponent, v.unit), (-4, Rational::from_integer(9)));
    assert_eq!(valuation(&0i64, &3), Err(ArithError::InfiniteValuation));
}

#[test]
fn factor_examples() {
    assert_eq!(factor_squarefree(3689).unwrap(), vec![7, 17, 31]);
    assert_eq!(factor_squarefree(6545).unwrap(), vec![5, 7, 11, 17]);
    assert_eq!(factor_squarefree(1).unwrap(), Vec::<u64>::new());
    assert!(matches!(factor_squarefree(9), Err(ArithError::NotSquareFree(9, 3))));
}

fn odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13, 113, 3121, 21841, 76441, 6804361, 21418513, 1_000_000_007])
}

proptest! {
    #[test]
    fn jacobi_is_multiplicative(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, l in odd_prime()) {
        let l = l as i64;
        let ab = (a as i128 * b as i128).rem_euclid(l as i128) as i64;
        prop_assert_eq!(jacobi(&ab, &l).unwrap(), jacobi(&a, &l).unwrap() * jacobi(&b, &l).unwrap());
    }

    #[test]
    fn legendre_agrees_with_jacobi(a in any::<i64>(), l in odd_prime()) {
        prop_assert_eq!(legendre(a as i128, l), jacobi(&(a as i128), &(l as i128)).unwrap());
    }

    #[test]
    fn sqrt_mod_is_a_root_or_a_nonresidue(a in any::<i64>(), l in odd_prime()) {
        match sqrt_mod(a as i128, l) {
            Some(r) => {
                let lhs = (r as u128 * r as u128) % l as u128;
                prop_assert_eq!(lhs as i128, (a as i128).rem_euclid(l as i128));
            }
            None => prop_assert_eq!(legendre(a as i128, l), -1),
        }
    }

    #[test]
    fn valuation_round_trips(x in any::<i64>().prop_filter("nonzero", |x| *x != 0), l in 2i64..50) {
        let v = valuation(&(x as i128), &(l as i128)).unwrap();
        prop_assert_eq!(v.unit * (l as i128).pow(v.exponent as u32), x as i128);
        prop_assert!(v.unit % l as i128 != 0);
    }

    #[test]
    fn rational_valuation_round_trips(num in 1i64..1_000_000, den in 1i64..1_000_000, l in prop::sample::select(vec![2i128, 3, 5, 7])) {
        let x = Rational::new(num as i128, den as i128);
        let v = valuation_ratio(&x, &l).unwrap();
        let scale = Rational::from_integer(l).pow(v.exponent as i32);
        prop_assert_eq!(v.unit * scale, x);
    }

    #[test]
    fn factorization_multiplies_back(n in 1u64..u64::MAX / 2) {
        let f = factor(n);
        prop_assert_eq!(f.iter().product::<u64>(), n);
        prop_assert!(f.iter().all(|&p| is_prime(p)));
        prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }
}
