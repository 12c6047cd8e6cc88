//! The 2-Selmer group as the set of everywhere locally solvable pairs, its
//! quotient by the torsion image, and the closed-form prediction it is
//! checked against.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{HeronCurve, Place};
use crate::intmath::legendre;
use crate::localsolve::{solvable_everywhere, LocalConfig, VerdictMap};
use crate::squareclass::{Ambient, DescentPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelmerError {
    #[error("UndecidedVerdict: pair {pair} at place {place}")]
    UndecidedVerdict { pair: DescentPair, place: Place },
    #[error("ClosureViolation: {0} * {1} is not a member")]
    ClosureViolation(DescentPair, DescentPair),
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelmerConfig {
    pub local: LocalConfig,
    pub workers: usize,
}

impl Default for SelmerConfig {
    fn default() -> Self {
        SelmerConfig { local: LocalConfig::default(), workers: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct SelmerGroup {
    pub curve: HeronCurve,
    /// Sorted by `b1`, then `b2`.
    pub members: Vec<DescentPair>,
    pub dimension: u32,
    pub torsion_image: Vec<DescentPair>,
    /// One canonical representative per coset of the torsion image, sorted.
    pub quotient_reps: Vec<DescentPair>,
    pub quotient_generators: Vec<DescentPair>,
    pub rank_upper_bound: u32,
    /// Verdict maps for every pair of the ambient group, in pair order.
    pub verdicts: Vec<VerdictMap>,
}

/// `(|b1 b2|, b1, b2)` among positive-component pairs; others sort last.
pub fn canonical_key(p: &DescentPair) -> (bool, i128, i128, i128) {
    let [b1, b2] = p.values();
    (b1 < 0 || b2 < 0, (b1 * b2).abs(), b1, b2)
}

/// All masks of the subgroup generated by `gens`.
pub fn span(ambient: &Ambient, gens: &[DescentPair]) -> BTreeSet<u32> {
    let mut set = BTreeSet::from([0u32]);
    for g in gens {
        let m = ambient.encode_pair(g);
        if !set.contains(&m) {
            let shifted: Vec<u32> = set.iter().map(|x| x ^ m).collect();
            set.extend(shifted);
        }
    }
    set
}

/// Canonical coset representatives of `group / torsion`, sorted by key.
pub fn quotient_reps(ambient: &Ambient, group: &BTreeSet<u32>, torsion: &[DescentPair]) -> Vec<DescentPair> {
    let tors = span(ambient, torsion);
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for &m in group {
        let coset: Vec<u32> = tors.iter().map(|t| t ^ m).collect();
        let key = *coset.iter().min().unwrap();
        if seen.insert(key) {
            let rep = coset
                .iter()
                .map(|&c| ambient.decode_pair(c))
                .min_by_key(canonical_key)
                .unwrap();
            reps.push(rep);
        }
    }
    reps.sort_by_key(canonical_key);
    reps
}

/// Greedy generators of `group / torsion` taken from the canonical reps.
pub fn quotient_generators(ambient: &Ambient, reps: &[DescentPair], torsion: &[DescentPair]) -> Vec<DescentPair> {
    let mut gens = Vec::new();
    let mut current = span(ambient, torsion);
    for r in reps {
        let m = ambient.encode_pair(r);
        if !current.contains(&m) {
            gens.push(r.clone());
            let shifted: Vec<u32> = current.iter().map(|x| x ^ m).collect();
            current.extend(shifted);
        }
    }
    gens
}

pub fn compute_selmer(curve: &HeronCurve, cfg: &SelmerConfig) -> Result<SelmerGroup, SelmerError> {
    let ambient = curve.ambient();
    let pairs = ambient.enumerate_pairs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| SelmerError::Pool(e.to_string()))?;
    let verdicts: Vec<VerdictMap> =
        pool.install(|| pairs.par_iter().map(|p| solvable_everywhere(curve, p, &cfg.local)).collect());

    for v in &verdicts {
        if v.refuted_at.is_none() {
            if let Some(&place) = v.undecided_at.first() {
                return Err(SelmerError::UndecidedVerdict { pair: v.pair.clone(), place });
            }
        }
    }
    let members: Vec<DescentPair> =
        verdicts.iter().filter(|v| v.all_solvable()).map(|v| v.pair.clone()).collect();
    let masks: BTreeSet<u32> = members.iter().map(|p| ambient.encode_pair(p)).collect();
    for (i, x) in members.iter().enumerate() {
        for y in &members[i..] {
            if !masks.contains(&(ambient.encode_pair(x) ^ ambient.encode_pair(y))) {
                return Err(SelmerError::ClosureViolation(x.clone(), y.clone()));
            }
        }
    }
    let dimension = members.len().trailing_zeros();
    let torsion_image = curve.torsion_image();
    let reps = quotient_reps(ambient, &masks, &torsion_image);
    let generators = quotient_generators(ambient, &reps, &torsion_image);
    let rank_upper_bound = dimension.saturating_sub(2);
    Ok(SelmerGroup {
        curve: curve.clone(),
        members,
        dimension,
        torsion_image,
        quotient_reps: reps,
        quotient_generators: generators,
        rank_upper_bound,
        verdicts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremPrediction {
    pub applicable: bool,
    pub reason: String,
    /// Generators of the predicted quotient by the torsion image.
    pub predicted_quotient: Vec<DescentPair>,
}

fn divisors(primes: &[u64]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        let more: Vec<u64> = out.iter().map(|d| d * p).collect();
        out.extend(more);
    }
    out.sort_unstable();
    out
}

pub fn classify_theorem(curve: &HeronCurve) -> TheoremPrediction {
    let ambient = curve.ambient();
    let q = curve.q();
    let ps = curve.primes();
    let pair = |x: u64, y: u64| {
        DescentPair::new(
            ambient.from_integer(x as i128).expect("divisor of 2n"),
            ambient.from_integer(y as i128).expect("divisor of 2n"),
        )
    };
    let sym_ok = |b: u64| legendre(b as i128, q) == 1;
    let all_pm1 = ps.iter().all(|p| p % 8 == 1 || p % 8 == 7);
    let all_pm3 = ps.iter().all(|p| p % 8 == 3 || p % 8 == 5);
    let divs = divisors(ps);
    let mut gens = Vec::new();
    let reason;
    if curve.m() % 2 == 1 {
        if all_pm3 {
            if q % 8 == 1 {
                gens.push(pair(2, 2));
                reason = "odd m, all p = +-3 mod 8, q = 1 mod 8".to_string();
            } else {
                reason = "odd m, all p = +-3 mod 8, q = 5 mod 8".to_string();
            }
        } else if all_pm1 {
            for &b in &divs {
                if b % 8 == 1 && sym_ok(b) {
                    gens.push(pair(b, b));
                }
            }
            if q % 8 == 1 {
                for &b in &divs {
                    if b % 8 == 7 && sym_ok(b) {
                        gens.push(pair(2 * b, b));
                    }
                }
                gens.push(pair(2, 2));
                reason = "odd m, all p = +-1 mod 8, q = 1 mod 8".to_string();
            } else {
                reason = "odd m, all p = +-1 mod 8, q = 5 mod 8".to_string();
            }
        } else {
            return TheoremPrediction {
                applicable: false,
                reason: "odd m with prime factors of n in both +-1 and +-3 mod 8".to_string(),
                predicted_quotient: Vec::new(),
            };
        }
    } else {
        for &b in &divs {
            if (b % 8 == 1 || b % 8 == 7) && sym_ok(b) {
                gens.push(pair(b, b));
            }
        }
        if all_pm1 {
            for &b in &divs {
                if sym_ok(b) {
                    gens.push(pair(b, 2 * b));
                }
            }
        }
        reason = if all_pm1 {
            "even m, all p = +-1 mod 8".to_string()
        } else {
            "even m".to_string()
        };
    }
    let tors = curve.torsion_image();
    let group = span(ambient, &[tors.clone(), gens].concat());
    let reps = quotient_reps(ambient, &group, &tors);
    let predicted_quotient = quotient_generators(ambient, &reps, &tors);
    TheoremPrediction { applicable: true, reason, predicted_quotient }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub applicable: bool,
    pub agrees: Option<bool>,
    /// Quotient representatives in the engine group but not predicted.
    pub engine_only: Vec<DescentPair>,
    pub predicted_only: Vec<DescentPair>,
}

/// Compares the subgroups generated by each side together with the torsion
/// image.
pub fn compare_groups(
    ambient: &Ambient,
    torsion: &[DescentPair],
    left: &[DescentPair],
    right: &[DescentPair],
) -> (Vec<DescentPair>, Vec<DescentPair>) {
    let l = span(ambient, &[torsion, left].concat());
    let r = span(ambient, &[torsion, right].concat());
    let only_l: BTreeSet<u32> = l.difference(&r).copied().collect();
    let only_r: BTreeSet<u32> = r.difference(&l).copied().collect();
    (quotient_reps(ambient, &only_l, torsion), quotient_reps(ambient, &only_r, torsion))
}

pub fn compare(selmer: &SelmerGroup, prediction: &TheoremPrediction) -> Comparison {
    if !prediction.applicable {
        return Comparison { applicable: false, agrees: None, engine_only: Vec::new(), predicted_only: Vec::new() };
    }
    let (engine_only, predicted_only) = compare_groups(
        selmer.curve.ambient(),
        &selmer.torsion_image,
        &selmer.quotient_generators,
        &prediction.predicted_quotient,
    );
    let agrees = engine_only.is_empty() && predicted_only.is_empty();
    Comparison { applicable: true, agrees: Some(agrees), engine_only, predicted_only }
}
