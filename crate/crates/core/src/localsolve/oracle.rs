//! Exhaustive lifting of primitive points of `Q1 = Q2 = 0` modulo `l^k`.
//!
//! Points are normalized so the first unit coordinate equals 1. A point mod
//! `l^k` with minor valuation `e < k` and `k >= 2e + 1` lifts to `Z_l`; a
//! branch whose minor valuation exceeds the bound from
//! [`HomogeneousSpace::minor_valuation_bound`] cannot contain `Z_l`-points.
//! Hence the tree is decided by level `2 E + 1`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, ToPrimitive};
use thiserror::Error;

use super::{Certificate, LocalVerdict, Status};
use crate::curve::Place;
use crate::homspace::HomogeneousSpace;
use crate::intmath::pow_mod;

pub const ORACLE_PRIME_LIMIT: u64 = 1000;
const NODE_CAP: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("brute oracle only runs for primes up to {ORACLE_PRIME_LIMIT}, got {0}")]
    PrimeTooLarge(u64),
}

/// A certified point found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteSolution {
    pub point: [BigInt; 4],
    pub k: u32,
    pub minor_val: u32,
}

pub trait OracleInt: Clone + Integer + FromPrimitive + ToPrimitive + Debug + Into<BigInt> {}

impl<T> OracleInt for T where T: Clone + Integer + FromPrimitive + ToPrimitive + Debug + Into<BigInt> {}

struct Tree<T> {
    l: u64,
    lt: T,
    coeffs: [[i128; 4]; 2],
    consts: [[i128; 4]; 4],
}

#[derive(Clone)]
struct Node<T> {
    x: [T; 4],
    /// Index of the coordinate normalized to 1.
    lead: usize,
}

impl<T: OracleInt> Tree<T> {
    fn pow(&self, k: u32) -> T {
        num_traits::pow(self.lt.clone(), k as usize)
    }

    fn from_i(&self, c: i128, m: &T) -> T {
        T::from_i128(c).expect("coefficient fits").mod_floor(m)
    }

    fn form(&self, t: usize, x: &[T; 4], m: &T) -> T {
        (0..4).fold(T::zero(), |acc, j| {
            let sq = (x[j].clone() * x[j].clone()).mod_floor(m);
            (acc + self.from_i(self.coeffs[t][j], m) * sq).mod_floor(m)
        })
    }

    fn val_capped(&self, x: &T, cap: u32) -> u32 {
        let mut v = 0;
        let mut u = x.clone();
        while v < cap && !u.is_zero() {
            let (q, r) = u.div_rem(&self.lt);
            if !r.is_zero() {
                break;
            }
            u = q;
            v += 1;
        }
        if u.is_zero() {
            cap
        } else {
            v
        }
    }

    /// Least valuation of the minors `C_ij x_i x_j`, capped at `k`.
    fn minor_val(&self, x: &[T; 4], k: u32, m: &T) -> u32 {
        let mut best = k;
        for i in 0..4 {
            for j in i + 1..4 {
                let p = (self.from_i(self.consts[i][j], m) * x[i].clone()).mod_floor(m);
                let p = (p * x[j].clone()).mod_floor(m);
                best = best.min(self.val_capped(&p, k));
            }
        }
        best
    }

    fn level_one(&self) -> Vec<Node<T>> {
        let l = self.l;
        let m = self.lt.clone();
        let mut out = Vec::new();
        for lead in 0..4 {
            let free = 3 - lead;
            for idx in 0..l.pow(free as u32) {
                let mut x: [T; 4] = std::array::from_fn(|_| T::zero());
                x[lead] = T::one();
                let mut r = idx;
                for j in lead + 1..4 {
                    x[j] = T::from_u64(r % l).unwrap();
                    r /= l;
                }
                if (0..2).all(|t| self.form(t, &x, &m).is_zero()) {
                    out.push(Node { x, lead });
                }
            }
        }
        out
    }

    /// Children of a level-`k` node: `x + l^k y` with
    /// `grad Q(x) . y = -Q(x) / l^k (mod l)`.
    fn children(&self, node: &Node<T>, k: u32, out: &mut Vec<Node<T>>) {
        let l = self.l;
        let lk = self.pow(k);
        let m1 = lk.clone() * self.lt.clone();
        let free: Vec<usize> = (0..4).filter(|&j| j != node.lead).collect();
        let mut rows = [[0u64; 4]; 2];
        for t in 0..2 {
            let q = self.form(t, &node.x, &m1);
            let r = (q / lk.clone()).to_u64().unwrap() % l;
            for (c, &j) in free.iter().enumerate() {
                let xj = node.x[j].mod_floor(&self.lt).to_u64().unwrap();
                let g = (2 * self.coeffs[t][j]).rem_euclid(l as i128) as u64;
                rows[t][c] = (g as u128 * xj as u128 % l as u128) as u64;
            }
            rows[t][3] = (l - r) % l;
        }
        for y in solve_mod(rows, l) {
            let mut x = node.x.clone();
            for (c, &j) in free.iter().enumerate() {
                x[j] = x[j].clone() + T::from_u64(y[c]).unwrap() * lk.clone();
            }
            debug_assert!((0..2).all(|t| self.form(t, &x, &m1).is_zero()));
            out.push(Node { x, lead: node.lead });
        }
    }
}

/// All `y` in `F_l^3` with `A y = b`, rows given as `[a0, a1, a2, b]`.
fn solve_mod(mut rows: [[u64; 4]; 2], l: u64) -> Vec<[u64; 3]> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..3 {
        if r == 2 {
            break;
        }
        let Some(p) = (r..2).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = pow_mod(rows[r][c], l - 2, l);
        for v in rows[r].iter_mut() {
            *v = (*v as u128 * inv as u128 % l as u128) as u64;
        }
        for i in 0..2 {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..4 {
                    let sub = (f as u128 * rows[r][j] as u128 % l as u128) as u64;
                    rows[i][j] = (rows[i][j] + l - sub) % l;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[3] != 0) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for idx in 0..l.pow(free.len() as u32) {
        let mut y = [0u64; 3];
        let mut t = idx;
        for &c in &free {
            y[c] = t % l;
            t /= l;
        }
        for (i, &pc) in pivots.iter().enumerate() {
            let mut v = rows[i][3];
            for &c in &free {
                let sub = (rows[i][c] as u128 * y[c] as u128 % l as u128) as u64;
                v = (v + l - sub) % l;
            }
            y[pc] = v;
        }
        out.push(y);
    }
    out
}

/// Depth-first run of the tree over residues of type `T` up to `depth`
/// levels, stopping after `collect` certified points.
pub fn brute_search<T: OracleInt>(
    space: &HomogeneousSpace,
    l: u64,
    depth: u32,
    collect: usize,
) -> Result<(LocalVerdict, Vec<BruteSolution>), OracleError> {
    if l > ORACLE_PRIME_LIMIT {
        return Err(OracleError::PrimeTooLarge(l));
    }
    let place = Place::Prime(l);
    let tree = Tree::<T> {
        l,
        lt: T::from_u64(l).unwrap(),
        coeffs: [space.q1.coeffs, space.q2.coeffs],
        consts: space.jacobian().minor_constants(),
    };
    let emax = space.minor_valuation_bound(l);
    let last = depth.min(2 * emax + 1);
    // Children are visited in order of increasing minor valuation, which
    // reaches certifiable points early; exhaustion is unaffected.
    let scored = |nodes: Vec<Node<T>>, k: u32| -> Vec<(Node<T>, u32, u32)> {
        let m = tree.pow(k);
        let mut v: Vec<_> = nodes
            .into_iter()
            .map(|n| {
                let e = tree.minor_val(&n.x, k, &m);
                (n, k, e)
            })
            .collect();
        v.sort_by_key(|t| std::cmp::Reverse(t.2));
        v
    };
    let mut stack = scored(tree.level_one(), 1);
    let mut nodes = stack.len();
    let mut found = Vec::new();
    let mut cut = false;
    let mut deepest = 1;
    let mut children = Vec::new();
    while let Some((node, k, e)) = stack.pop() {
        deepest = deepest.max(k);
        if e < k && k >= 2 * e + 1 {
            found.push(BruteSolution { point: node.x.map(Into::into), k, minor_val: e });
            if found.len() >= collect.max(1) {
                break;
            }
            continue;
        }
        if e.min(k) > emax {
            continue;
        }
        if k == last || nodes > NODE_CAP {
            cut = true;
            continue;
        }
        children.clear();
        tree.children(&node, k, &mut children);
        nodes += children.len();
        stack.extend(scored(std::mem::take(&mut children), k + 1));
    }
    let (status, certificate) = if let Some(first) = found.first() {
        let certificate = Certificate::Hensel {
            point: first.point.clone(),
            prime: l,
            k: first.k,
            minor_val: first.minor_val,
        };
        (Status::Solvable, certificate)
    } else if cut {
        (Status::Undecided, Certificate::DepthReached { depth: last })
    } else {
        (Status::Insolvable, Certificate::Exhausted { depth: deepest, nodes })
    };
    Ok((LocalVerdict { place, status, certificate }, found))
}

fn fits_i128(l: u64, depth: u32) -> bool {
    (l as f64).log2() * (depth as f64 + 1.0) < 62.0
}

/// Brute-force verdict, on `i128` residues when `l^(depth+1) < 2^62` and on
/// `BigInt` otherwise.
pub fn brute_oracle(space: &HomogeneousSpace, l: u64, depth: u32) -> Result<LocalVerdict, OracleError> {
    brute_oracle_collect(space, l, depth, 1).map(|(v, _)| v)
}

pub fn brute_oracle_collect(
    space: &HomogeneousSpace,
    l: u64,
    depth: u32,
    collect: usize,
) -> Result<(LocalVerdict, Vec<BruteSolution>), OracleError> {
    let eff = depth.min(2 * space.minor_valuation_bound(l) + 1);
    if fits_i128(l, eff) {
        brute_search::<i128>(space, l, depth, collect)
    } else {
        brute_search::<BigInt>(space, l, depth, collect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_solutions() {
        // y0 + y1 = 1, y1 + y2 = 0 over F_5: one free variable
        let s = solve_mod([[1, 1, 0, 1], [0, 1, 1, 0]], 5);
        assert_eq!(s.len(), 5);
        for y in &s {
            assert_eq!((y[0] + y[1]) % 5, 1);
            assert_eq!((y[1] + y[2]) % 5, 0);
        }
        assert!(solve_mod([[0, 0, 0, 1], [0, 0, 0, 0]], 3).is_empty());
        assert_eq!(solve_mod([[0; 4]; 2], 2).len(), 8);
        assert_eq!(solve_mod([[1, 0, 0, 2], [2, 0, 0, 4]], 7).len(), 49);
    }
}
