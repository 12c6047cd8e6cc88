//! Small polynomials over `F_l`, coefficients lowest degree first.

use crate::intmath::{mul_mod, pow_mod, sqrt_mod};

fn inv(a: u64, l: u64) -> u64 {
    pow_mod(a, l - 2, l)
}

fn trim(c: &[u64]) -> &[u64] {
    let d = c.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
    &c[..d]
}

pub(crate) fn eval(c: &[u64], u: u64, l: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &x| (mul_mod(acc, u, l) + x) % l)
}

pub(crate) fn mul(f: &[u64], g: &[u64], l: u64) -> Vec<u64> {
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(a, b, l)) % l;
        }
    }
    out
}

/// Roots in `F_l` of a polynomial of degree at most 2, odd `l`.
pub(crate) fn roots(c: &[u64], l: u64) -> Vec<u64> {
    let c = trim(c);
    let mut r = match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![mul_mod(l - c[0], inv(c[1], l), l)],
        3 => {
            let disc = (mul_mod(c[1], c[1], l) + l - mul_mod(4 % l, mul_mod(c[0], c[2], l), l)) % l;
            match sqrt_mod(disc as i128, l) {
                None => Vec::new(),
                Some(s) => {
                    let den = inv(mul_mod(2, c[2], l), l);
                    let r1 = mul_mod((l - c[1] + s) % l, den, l);
                    let r2 = mul_mod((2 * l - c[1] - s) % l, den, l);
                    vec![r1, r2]
                }
            }
        }
        _ => panic!("roots: degree above 2"),
    };
    r.sort_unstable();
    r.dedup();
    r
}

/// `Some(c)` when the polynomial equals `c * H^2` for some `H`, odd `l`.
pub(crate) fn square_constant(c: &[u64], l: u64) -> Option<u64> {
    let c = trim(c);
    match c.len() {
        0 => None,
        1 => Some(c[0]),
        3 => {
            let disc = (mul_mod(c[1], c[1], l) + l - mul_mod(4 % l, mul_mod(c[0], c[2], l), l)) % l;
            (disc == 0).then_some(c[2])
        }
        5 => {
            let li = inv(c[4], l);
            let a: Vec<u64> = c.iter().map(|&x| mul_mod(x, li, l)).collect();
            let half = inv(2, l);
            let h1 = mul_mod(a[3], half, l);
            let h0 = mul_mod((a[2] + l - mul_mod(h1, h1, l)) % l, half, l);
            let ok = mul_mod(2, mul_mod(h1, h0, l), l) == a[1] && mul_mod(h0, h0, l) == a[0];
            ok.then_some(c[4])
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        // (x - 2)(x - 5) = x^2 - 7x + 10 over F_11
        assert_eq!(roots(&[10, 4, 1], 11), vec![2, 5]);
        assert_eq!(roots(&[1, 0, 1], 7), Vec::<u64>::new());
        assert_eq!(roots(&[3, 2, 0], 7), vec![2]);
        assert_eq!(roots(&[4, 4, 1], 13), vec![11]);
    }

    #[test]
    fn square_shapes() {
        assert_eq!(square_constant(&[3], 7), Some(3));
        // 3 (x + 1)^2
        assert_eq!(square_constant(&[3, 6, 3], 7), Some(3));
        assert_eq!(square_constant(&[1, 0, 1], 7), None);
        let h = [2, 3, 1];
        let p = mul(&mul(&h, &h, 101), &[5], 101);
        assert_eq!(square_constant(&p, 101), Some(5));
        let p = mul(&[1, 1, 0], &[2, 0, 1], 101);
        assert_eq!(square_constant(&p, 101), None);
        assert_eq!(eval(&[1, 2, 3], 4, 101), 57);
    }
}
