//! Exact local decision by residue discs.
//!
//! Eliminating `x2` and `x3` turns a point of the torsor into a point
//! `(x0 : x1)` of `P^1(Q_l)` at which
//!
//! ```text
//! F = b2 (b1 x1^2 - a x0^2)          and
//! G = b1 b2 (b1 x1^2 + b x0^2)
//! ```
//!
//! are both squares (zero included): then `x2 = sqrt(F)/b2`,
//! `x3 = sqrt(G)/(b1 b2)` after scaling. `P^1(Z_l)` is covered by the charts
//! `(1 : t)` and `(l s : 1)` with `t, s` in `Z_l`, and each chart is cut into
//! discs `c + l^k Z_l` until the square class of both forms is constant.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::polymod;
use super::{Certificate, LocalVerdict, Status, SymbolRecord};
use crate::curve::Place;
use crate::homspace::HomogeneousSpace;
use crate::intmath::legendre;
use crate::padic::{is_local_square, local_sqrt, lpow, unit_is_square, val, val_capped};

const SYMBOL_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_depth: u32,
    pub seed: u64,
    pub trials: usize,
    pub enum_limit: u64,
}

/// `c0 + c1 u + c2 u^2`
#[derive(Debug, Clone)]
struct Poly2([BigInt; 3]);

impl Poly2 {
    /// `p(center + scale * u)`
    fn shift(&self, center: &BigInt, scale: &BigInt) -> Poly2 {
        let c = &self.0;
        let c0 = &c[0] + &c[1] * center + &c[2] * center * center;
        let c1 = (&c[1] + &c[2] * center * 2u32) * scale;
        let c2 = &c[2] * scale * scale;
        Poly2([c0, c1, c2])
    }

    fn min_val(&self, l: u64) -> u32 {
        self.0
            .iter()
            .filter_map(|c| val(c, l).map(|(v, _)| v))
            .min()
            .expect("binary forms are nonzero")
    }

    /// Coefficients divided by `l^v` and reduced mod `l`.
    fn residue(&self, l: u64, v: u32) -> [u64; 3] {
        let lv = lpow(l, v);
        let lb = BigInt::from(l);
        std::array::from_fn(|i| (&self.0[i] / &lv).mod_floor(&lb).to_u64().unwrap())
    }
}

enum Class {
    Square,
    NonSquare(SymbolRecord),
    Unknown,
}

fn odd_power(l: u64, v: u32) -> SymbolRecord {
    SymbolRecord { value: format!("{l}^{v}"), modulus: l.to_string(), symbol: -1 }
}

fn nonresidue(value: u64, l: u64) -> SymbolRecord {
    let modulus = if l == 2 { 8 } else { l };
    SymbolRecord { value: value.to_string(), modulus: modulus.to_string(), symbol: -1 }
}

/// Square class of `p` on all of `Z_l`, when it is constant.
fn disc_class(p: &Poly2, l: u64) -> Class {
    let eps = if l == 2 { 3 } else { 1 };
    let Some((v0, u0)) = val(&p.0[0], l) else {
        return Class::Unknown;
    };
    let rest = val_capped(&p.0[1], l, u32::MAX).min(val_capped(&p.0[2], l, u32::MAX));
    if (rest as u64) < v0 as u64 + eps {
        return Class::Unknown;
    }
    if v0 % 2 == 1 {
        Class::NonSquare(odd_power(l, v0))
    } else if unit_is_square(&u0, l) {
        Class::Square
    } else {
        let m = if l == 2 { 8 } else { l };
        let r = u0.mod_floor(&BigInt::from(m)).to_u64().unwrap();
        Class::NonSquare(nonresidue(r, l))
    }
}

enum Outcome {
    Found(BigInt),
    Refuted,
    Undecided,
}

struct Search<'a> {
    l: u64,
    opts: &'a SolveOptions,
    rng: ChaCha8Rng,
    symbols: BTreeSet<SymbolRecord>,
    refuted: usize,
    deepest: u32,
}

impl Search<'_> {
    fn record(&mut self, s: SymbolRecord) {
        self.refuted += 1;
        if self.symbols.len() < SYMBOL_CAP {
            self.symbols.insert(s);
        }
    }

    /// The disc `center + l^k Z_l`, with `f`, `g` already shifted to it.
    fn child(&mut self, center: BigInt, k: u32, f: Poly2, g: Poly2) -> Outcome {
        self.deepest = self.deepest.max(k);
        let (cf, cg) = (disc_class(&f, self.l), disc_class(&g, self.l));
        match (cf, cg) {
            (Class::NonSquare(s), _) | (_, Class::NonSquare(s)) => {
                self.record(s);
                Outcome::Refuted
            }
            (Class::Square, Class::Square) => Outcome::Found(center),
            _ if k >= self.opts.max_depth => Outcome::Undecided,
            _ => self.node(center, k, f, g),
        }
    }

    /// Splits `center + l^k Z_l` into its `l` subdiscs.
    fn node(&mut self, center: BigInt, k: u32, f: Poly2, g: Poly2) -> Outcome {
        let l = self.l;
        let lb = BigInt::from(l);
        let lk = lpow(l, k);
        let mut undecided = false;
        let mut visit = |this: &mut Self, r: u64| -> Option<Outcome> {
            let rb = BigInt::from(r);
            let out = this.child(&center + &rb * &lk, k + 1, f.shift(&rb, &lb), g.shift(&rb, &lb));
            match out {
                Outcome::Found(_) => Some(out),
                Outcome::Undecided => {
                    undecided = true;
                    None
                }
                Outcome::Refuted => None,
            }
        };
        if l <= self.opts.enum_limit {
            for r in 0..l {
                if let Some(found) = visit(self, r) {
                    return found;
                }
            }
        } else {
            let (vf, vg) = (f.min_val(l), g.min_val(l));
            let (rf, rg) = (f.residue(l, vf), g.residue(l, vg));
            let mut special = polymod::roots(&rf, l);
            special.extend(polymod::roots(&rg, l));
            special.sort_unstable();
            special.dedup();
            for &r in &special {
                if let Some(found) = visit(self, r) {
                    return found;
                }
            }
            // On every other subdisc both classes are fixed by the residues.
            match self.generic(vf, vg, &rf, &rg, &special) {
                Outcome::Found(r) => return Outcome::Found(&center + r * &lk),
                Outcome::Undecided => undecided = true,
                Outcome::Refuted => {}
            }
        }
        if undecided {
            Outcome::Undecided
        } else {
            Outcome::Refuted
        }
    }

    /// Subdiscs off the roots of both residue polynomials: both classes are
    /// `l^v * residue`, so a square pair needs even valuations and a common
    /// quadratic-residue value.
    fn generic(&mut self, vf: u32, vg: u32, rf: &[u64; 3], rg: &[u64; 3], special: &[u64]) -> Outcome {
        let l = self.l;
        for v in [vf, vg] {
            if v % 2 == 1 {
                self.record(odd_power(l, v));
                return Outcome::Refuted;
            }
        }
        for r in [rf, rg] {
            if let Some(c) = polymod::square_constant(r, l) {
                if legendre(c as i128, l) == -1 {
                    self.record(nonresidue(c, l));
                    return Outcome::Refuted;
                }
            }
        }
        if let Some(c) = polymod::square_constant(&polymod::mul(rf, rg, l), l) {
            if legendre(c as i128, l) == -1 {
                self.record(nonresidue(c, l));
                return Outcome::Refuted;
            }
        }
        let good = |u: u64| {
            special.binary_search(&u).is_err()
                && legendre(polymod::eval(rf, u, l) as i128, l) == 1
                && legendre(polymod::eval(rg, u, l) as i128, l) == 1
        };
        for _ in 0..64 {
            let u = self.rng.gen_range(0..l);
            if good(u) {
                return Outcome::Found(BigInt::from(u));
            }
        }
        let start = self.rng.gen_range(0..l);
        match (0..l).map(|i| (start + i) % l).find(|&u| good(u)) {
            Some(u) => Outcome::Found(BigInt::from(u)),
            None => Outcome::Undecided,
        }
    }
}

fn forms(space: &HomogeneousSpace) -> ([BigInt; 2], [BigInt; 2]) {
    let (a, b, b1, b2) = (
        BigInt::from(space.a),
        BigInt::from(space.b),
        BigInt::from(space.b1),
        BigInt::from(space.b2),
    );
    let f = [-&a * &b2, &b1 * &b2];
    let g = [&b * &b1 * &b2, &b1 * &b1 * &b2];
    (f, g)
}

fn eval_form(c: &[BigInt; 2], x0: &BigInt, x1: &BigInt) -> BigInt {
    &c[0] * x0 * x0 + &c[1] * x1 * x1
}

#[derive(Debug, Clone)]
enum Witness {
    /// Both forms nonzero squares at `(x0 : x1)`.
    Generic(BigInt, BigInt),
    /// `F = 0`, `G` a square.
    RootF,
    /// `G = 0`, `F` a square.
    RootG,
}

fn structured_witness(space: &HomogeneousSpace, l: u64) -> Option<Witness> {
    let (f, g) = forms(space);
    let both = |x0: &BigInt, x1: &BigInt| {
        let (fv, gv) = (eval_form(&f, x0, x1), eval_form(&g, x0, x1));
        !fv.is_zero() && !gv.is_zero() && is_local_square(&fv, l) && is_local_square(&gv, l)
    };
    let (zero, one) = (BigInt::zero(), BigInt::from(1));
    if both(&zero, &one) {
        return Some(Witness::Generic(zero, one));
    }
    if both(&one, &zero) {
        return Some(Witness::Generic(one, zero));
    }
    let (a, b, b1, b2) = (
        BigInt::from(space.a),
        BigInt::from(space.b),
        BigInt::from(space.b1),
        BigInt::from(space.b2),
    );
    let ab = &a + &b;
    if is_local_square(&(&a * &b1), l) && is_local_square(&(&b1 * &b2 * &ab), l) {
        return Some(Witness::RootF);
    }
    if is_local_square(&(-&b * &b1), l) && is_local_square(&(-&b2 * &ab), l) {
        return Some(Witness::RootG);
    }
    None
}

/// Builds the lifted 4-tuple for a witness and checks it against the Hensel
/// condition, raising the square-root precision until it holds.
fn certify(space: &HomogeneousSpace, l: u64, w: &Witness) -> Option<Certificate> {
    let (f, g) = forms(space);
    let (a, b, b1, b2) = (
        BigInt::from(space.a),
        BigInt::from(space.b),
        BigInt::from(space.b1),
        BigInt::from(space.b2),
    );
    let b12 = &b1 * &b2;
    let mut prec = 16;
    while prec <= 4096 {
        let (x0, x1, root_f, root_g) = match w {
            Witness::Generic(x0, x1) => (x0.clone(), x1.clone(), false, false),
            Witness::RootF => (b1.clone(), local_sqrt(&(&a * &b1), l, prec)?, true, false),
            Witness::RootG => (b1.clone(), local_sqrt(&(-&b * &b1), l, prec)?, false, true),
        };
        let sq = |v: BigInt, is_root: bool| -> Option<BigInt> {
            if is_root || v.is_zero() {
                Some(BigInt::zero())
            } else {
                local_sqrt(&v, l, prec)
            }
        };
        let w1 = sq(eval_form(&f, &x0, &x1), root_f)?;
        let w2 = sq(eval_form(&g, &x0, &x1), root_g)?;
        let mut x = [&b12 * &x0, &b12 * &x1, &b1 * w1, w2];
        let g0 = x.iter().filter_map(|c| val(c, l).map(|(v, _)| v)).min()?;
        let lg = lpow(l, g0);
        for c in x.iter_mut() {
            *c = &*c / &lg;
        }
        if let Some(e) = space.jacobian_minor_valuation(&x, l) {
            let k = 2 * e + 1;
            let qs = space.evaluate_exact(&x);
            if qs.iter().all(|q| val_capped(q, l, k) >= k) {
                let modulus = lpow(l, k);
                let point = x.map(|c| c.mod_floor(&modulus));
                return Some(Certificate::Hensel { point, prime: l, k, minor_val: e });
            }
        }
        prec *= 2;
    }
    None
}

/// Local solvability of the torsor over `Q_l`.
pub fn solve_prime(space: &HomogeneousSpace, l: u64, opts: &SolveOptions) -> LocalVerdict {
    let place = Place::Prime(l);
    let found = |w: Witness| {
        let certificate = certify(space, l, &w).expect("square witness lifts");
        LocalVerdict { place, status: Status::Solvable, certificate }
    };
    if let Some(w) = structured_witness(space, l) {
        return found(w);
    }
    let (f, g) = forms(space);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let bound = l.checked_pow(3).unwrap_or(u64::MAX).min(1 << 62);
    let lb = BigInt::from(l);
    for i in 0..opts.trials {
        let t = BigInt::from(rng.gen_range(0..bound));
        let (x0, x1) = if i % 2 == 0 { (BigInt::from(1), t) } else { (&lb * t, BigInt::from(1)) };
        let (fv, gv) = (eval_form(&f, &x0, &x1), eval_form(&g, &x0, &x1));
        if !fv.is_zero() && !gv.is_zero() && is_local_square(&fv, l) && is_local_square(&gv, l) {
            return found(Witness::Generic(x0, x1));
        }
    }
    let mut search = Search { l, opts, rng, symbols: BTreeSet::new(), refuted: 0, deepest: 0 };
    let mut undecided = false;
    for chart in 0..2 {
        // chart 0: (1 : t), chart 1: (l s : 1); coefficients of u^0, u^1, u^2
        let (pf, pg) = if chart == 0 {
            (
                Poly2([f[0].clone(), BigInt::zero(), f[1].clone()]),
                Poly2([g[0].clone(), BigInt::zero(), g[1].clone()]),
            )
        } else {
            let l2 = &lb * &lb;
            (
                Poly2([f[1].clone(), BigInt::zero(), &f[0] * &l2]),
                Poly2([g[1].clone(), BigInt::zero(), &g[0] * &l2]),
            )
        };
        match search.node(BigInt::zero(), 0, pf, pg) {
            Outcome::Found(c) => {
                let w = if chart == 0 {
                    Witness::Generic(BigInt::from(1), c)
                } else {
                    Witness::Generic(&lb * c, BigInt::from(1))
                };
                return found(w);
            }
            Outcome::Undecided => undecided = true,
            Outcome::Refuted => {}
        }
    }
    if undecided {
        return LocalVerdict {
            place,
            status: Status::Undecided,
            certificate: Certificate::DepthReached { depth: opts.max_depth },
        };
    }
    LocalVerdict {
        place,
        status: Status::Insolvable,
        certificate: Certificate::Refuted {
            criterion: "disc-exhaustion".to_string(),
            symbols: search.symbols.into_iter().collect(),
            discs: search.refuted,
            depth: search.deepest,
        },
    }
}
