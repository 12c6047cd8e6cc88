//! Local solvability of the torsors at the real place and at primes, with
//! certificates that can be re-checked independently of the search.

mod check;
mod disc;
mod oracle;
mod polymod;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::curve::{HeronCurve, Place};
use crate::homspace::HomogeneousSpace;
use crate::padic::{lpow, val};
use crate::squareclass::DescentPair;

pub use check::{local_class, oracle_check, Mismatch, OracleRow};
pub use disc::{solve_prime, SolveOptions};
pub use oracle::{brute_oracle, brute_oracle_collect, brute_search, BruteSolution, OracleError, OracleInt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Solvable,
    Insolvable,
    Undecided,
}

/// One failed square-class condition: `value` is a non-square modulo
/// `modulus` (or an odd power of the prime).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolRecord {
    pub value: String,
    pub modulus: String,
    pub symbol: i8,
}

impl Serialize for SymbolRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.value, &self.modulus, self.symbol).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A primitive point mod `prime^k` with minor valuation `minor_val` and
    /// `k >= 2 * minor_val + 1`, so it lifts to a `Z_l`-point.
    Hensel { point: [BigInt; 4], prime: u64, k: u32, minor_val: u32 },
    /// Explicit real point on the torsor.
    RealPoint { recipe: String },
    /// Sign obstruction at the real place.
    RealSign { b1_sign: i8, b2_sign: i8 },
    /// Every residue disc of `P^1(Q_l)` carries a non-square value of one of
    /// the two binary forms.
    Refuted { criterion: String, symbols: Vec<SymbolRecord>, discs: usize, depth: u32 },
    /// The lifting tree died out.
    Exhausted { depth: u32, nodes: usize },
    /// Search stopped at its depth bound with live branches.
    DepthReached { depth: u32 },
    /// Primes of good reduction outside the checked list.
    GoodReduction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalVerdict {
    pub place: Place,
    pub status: Status,
    pub certificate: Certificate,
}

impl LocalVerdict {
    pub fn is_solvable(&self) -> bool {
        self.status == Status::Solvable
    }
}

impl Serialize for LocalVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("place", &self.place)?;
        map.serialize_entry("status", &self.status)?;
        match &self.certificate {
            Certificate::Hensel { point, prime, k, minor_val } => {
                let pt: Vec<String> = point.iter().map(|x| x.to_string()).collect();
                map.serialize_entry("point", &pt)?;
                map.serialize_entry("mod", &format!("{prime}^{k}"))?;
                map.serialize_entry("minor_val", minor_val)?;
            }
            Certificate::RealPoint { recipe } => map.serialize_entry("recipe", recipe)?,
            Certificate::RealSign { b1_sign, b2_sign } => {
                map.serialize_entry("criterion", "real-sign")?;
                map.serialize_entry("signs", &[b1_sign, b2_sign])?;
            }
            Certificate::Refuted { criterion, symbols, discs, depth } => {
                map.serialize_entry("criterion", criterion)?;
                map.serialize_entry("symbols", symbols)?;
                map.serialize_entry("discs", discs)?;
                map.serialize_entry("depth", depth)?;
            }
            Certificate::Exhausted { depth, nodes } => {
                map.serialize_entry("criterion", "lifting-tree-exhausted")?;
                map.serialize_entry("depth", depth)?;
                map.serialize_entry("nodes", nodes)?;
            }
            Certificate::DepthReached { depth } => map.serialize_entry("depth", depth)?,
            Certificate::GoodReduction => {
                map.serialize_entry("criterion", "good-reduction-point-count")?
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConfig {
    pub seed: u64,
    /// Replaces the per-prime default depth when set.
    pub depth_override: Option<u32>,
    /// Random samples tried before the exhaustive disc search.
    pub trials: usize,
    /// Primes above this bound use aggregated residue classes instead of
    /// enumerating `Z/l`.
    pub enum_limit: u64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig { seed: 0, depth_override: None, trials: 64, enum_limit: 1000 }
    }
}

/// `2 * v_l(disc * b1 * b2) + 5`.
pub fn default_depth(space: &HomogeneousSpace, l: u64) -> u32 {
    let (a, b) = (BigInt::from(space.a), BigInt::from(space.b));
    let disc = BigInt::from(16) * &a * &a * &b * &b * (&a + &b) * (&a + &b);
    let x = disc * space.b1 * space.b2;
    2 * val(&x, l).map_or(0, |(v, _)| v) + 5
}

/// splitmix64 over the inputs, so per-pair seeds do not depend on scheduling.
pub fn derive_seed(global: u64, b1: i128, b2: i128, l: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    [b1 as u64, (b1 >> 64) as u64, b2 as u64, (b2 >> 64) as u64, l]
        .iter()
        .fold(mix(global), |h, &w| mix(h ^ w))
}

/// Real solvability: a point exists iff `b1` and `b2` have the same sign.
pub fn solvable_real(pair: &DescentPair) -> LocalVerdict {
    let (s1, s2) = (pair.b1.sign(), pair.b2.sign());
    let (status, certificate) = if s1 != s2 {
        (Status::Insolvable, Certificate::RealSign { b1_sign: s1, b2_sign: s2 })
    } else if s1 > 0 {
        let recipe = "x0 = 0, x1 = 1, x2 = sqrt(b1/b2), x3 = sqrt(1/b2)".to_string();
        (Status::Solvable, Certificate::RealPoint { recipe })
    } else {
        let recipe = "x0 = 1, x1 = 0, x2 = sqrt(2^m n^2/|b2|), x3 = sqrt(2^m/(b1 b2))".to_string();
        (Status::Solvable, Certificate::RealPoint { recipe })
    };
    LocalVerdict { place: Place::Real, status, certificate }
}

/// Solvability over `Q_2`, searching residue discs up to `max_depth` levels.
pub fn solvable_2adic(space: &HomogeneousSpace, max_depth: u32) -> LocalVerdict {
    let opts = SolveOptions { max_depth, seed: 0, trials: 0, enum_limit: 2 };
    solve_prime(space, 2, &opts)
}

/// Solvability over `Q_l` for odd `l`: seeded sampling plus structured
/// witnesses, then the exhaustive disc search for refutation.
pub fn solvable_odd(space: &HomogeneousSpace, l: u64, seed: u64) -> LocalVerdict {
    solvable_odd_with(space, l, seed, &LocalConfig::default())
}

pub fn solvable_odd_with(space: &HomogeneousSpace, l: u64, seed: u64, cfg: &LocalConfig) -> LocalVerdict {
    assert!(l % 2 == 1, "solvable_odd needs an odd prime");
    let opts = SolveOptions {
        max_depth: cfg.depth_override.unwrap_or_else(|| default_depth(space, l)),
        seed,
        trials: cfg.trials,
        enum_limit: cfg.enum_limit,
    };
    solve_prime(space, l, &opts)
}

/// Verdicts at every checked place for one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictMap {
    pub pair: DescentPair,
    pub verdicts: BTreeMap<Place, LocalVerdict>,
    /// Smallest place with an Insolvable verdict.
    pub refuted_at: Option<Place>,
    pub undecided_at: Vec<Place>,
}

impl VerdictMap {
    pub fn all_solvable(&self) -> bool {
        self.refuted_at.is_none() && self.undecided_at.is_empty()
    }

    /// The note standing in for every prime outside the checked list.
    pub fn good_reduction_note() -> Certificate {
        Certificate::GoodReduction
    }
}

pub fn solvable_everywhere(curve: &HeronCurve, pair: &DescentPair, cfg: &LocalConfig) -> VerdictMap {
    let space = HomogeneousSpace::build(curve, pair);
    let mut verdicts = BTreeMap::new();
    let mut refuted_at = None;
    let mut undecided_at = Vec::new();
    for place in curve.places_to_check() {
        let verdict = match place {
            Place::Real => solvable_real(pair),
            Place::Prime(l) => {
                let depth = cfg.depth_override.unwrap_or_else(|| default_depth(&space, l));
                let opts = SolveOptions {
                    max_depth: depth,
                    seed: derive_seed(cfg.seed, space.b1, space.b2, l),
                    trials: cfg.trials,
                    enum_limit: cfg.enum_limit,
                };
                solve_prime(&space, l, &opts)
            }
        };
        let status = verdict.status;
        verdicts.insert(place, verdict);
        match status {
            Status::Insolvable => {
                refuted_at = Some(place);
                break;
            }
            Status::Undecided => undecided_at.push(place),
            Status::Solvable => {}
        }
    }
    VerdictMap { pair: pair.clone(), verdicts, refuted_at, undecided_at }
}

/// Re-checks a Solvable certificate from scratch.
pub fn verify_certificate(space: &HomogeneousSpace, verdict: &LocalVerdict) -> bool {
    match (&verdict.status, &verdict.certificate, verdict.place) {
        (Status::Solvable, Certificate::Hensel { point, prime, k, minor_val }, Place::Prime(l)) => {
            if *prime != l || *k < 2 * minor_val + 1 {
                return false;
            }
            let modulus = lpow(l, *k);
            let primitive = point.iter().any(|x| val(x, l).map_or(false, |(v, _)| v == 0));
            let residues = space.evaluate(point, &modulus);
            primitive
                && residues.iter().all(Zero::is_zero)
                && space.jacobian_minor_valuation(point, l) == Some(*minor_val)
        }
        (Status::Solvable, Certificate::RealPoint { .. }, Place::Real) => {
            space.pair.b1.sign() == space.pair.b2.sign()
        }
        (Status::Solvable, _, _) => false,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squareclass::SquareClass;

    fn pair(c: &HeronCurve, b1: i128, b2: i128) -> DescentPair {
        let a = c.ambient();
        DescentPair::new(a.from_integer(b1).unwrap(), a.from_integer(b2).unwrap())
    }

    #[test]
    fn real_place() {
        let c = HeronCurve::new(3, 1).unwrap();
        assert_eq!(solvable_real(&pair(&c, 2, -1)).status, Status::Insolvable);
        assert_eq!(solvable_real(&pair(&c, -1, -2)).status, Status::Solvable);
        assert_eq!(solvable_real(&pair(&c, 1, 1)).status, Status::Solvable);
        for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let p = pair(&c, 3 * s1, 5 * s2);
            assert_eq!(solvable_real(&p).is_solvable(), s1 * s2 > 0);
        }
    }

    #[test]
    fn seeds_are_stable_and_spread() {
        assert_eq!(derive_seed(7, 2, 3, 5), derive_seed(7, 2, 3, 5));
        assert_ne!(derive_seed(7, 2, 3, 5), derive_seed(7, 3, 2, 5));
        assert_ne!(derive_seed(7, 2, 3, 5), derive_seed(8, 2, 3, 5));
    }

    #[test]
    fn default_depth_formula() {
        let c = HeronCurve::new(3, 1).unwrap();
        let s = HomogeneousSpace::build(&c, &DescentPair::identity());
        // v_2(2^12 * 3^4 * 5^2) = 12
        assert_eq!(default_depth(&s, 2), 29);
        assert_eq!(default_depth(&s, 3), 13);
        assert_eq!(default_depth(&s, 7), 5);
        let s = HomogeneousSpace::build(&c, &pair(&c, 6, 3));
        assert_eq!(default_depth(&s, 3), 2 * (4 + 2) + 5);
        assert!(SquareClass::prime(2).divides_by(2));
    }
}
