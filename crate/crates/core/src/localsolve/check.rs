//! Cross-check of the disc solver against the brute-force oracle.
//!
//! Over `Q_l` a torsor only depends on the local square classes of `b1` and
//! `b2`, so the oracle runs once per class and every pair in that class is
//! compared against it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{brute_oracle, derive_seed, solve_prime, default_depth, LocalConfig, SolveOptions, Status};
use crate::curve::{HeronCurve, Place};
use crate::homspace::HomogeneousSpace;
use crate::padic::{unit_is_square, val};
use crate::squareclass::DescentPair;

/// Index of `x` in `Q_l^* / (Q_l^*)^2`.
pub fn local_class(x: i128, l: u64) -> u8 {
    let (v, u) = val(&BigInt::from(x), l).expect("nonzero class");
    let parity = (v % 2) as u8;
    if l == 2 {
        let r = u.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        parity * 4 + (r / 2) as u8
    } else {
        parity * 2 + (!unit_is_square(&u, l)) as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub pair: DescentPair,
    pub fast: Status,
    pub brute: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub n: u64,
    pub m: u32,
    pub prime: u64,
    pub pairs: usize,
    pub classes: usize,
    pub solvable: usize,
    pub undecided: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleRow {
    pub fn ok(&self) -> bool {
        self.undecided == 0 && self.mismatches.is_empty()
    }
}

/// One row per checked prime `l <= max_prime`.
pub fn oracle_check(curve: &HeronCurve, cfg: &LocalConfig, max_prime: u64, workers: usize) -> Vec<OracleRow> {
    let pairs = curve.ambient().enumerate_pairs();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let mut rows = Vec::new();
    for place in curve.places_to_check() {
        let Place::Prime(l) = place else { continue };
        if l > max_prime {
            continue;
        }
        let fast: Vec<Status> = pool.install(|| {
            pairs
                .par_iter()
                .map(|p| {
                    let s = HomogeneousSpace::build(curve, p);
                    let opts = SolveOptions {
                        max_depth: cfg.depth_override.unwrap_or_else(|| default_depth(&s, l)),
                        seed: derive_seed(cfg.seed, s.b1, s.b2, l),
                        trials: cfg.trials,
                        enum_limit: cfg.enum_limit,
                    };
                    solve_prime(&s, l, &opts).status
                })
                .collect()
        });
        let mut classes: BTreeMap<(u8, u8), Vec<usize>> = BTreeMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let [b1, b2] = p.values();
            classes.entry((local_class(b1, l), local_class(b2, l))).or_default().push(i);
        }
        let reps: Vec<(Vec<usize>, Status)> = pool.install(|| {
            classes
                .values()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|idx| {
                    let s = HomogeneousSpace::build(curve, &pairs[idx[0]]);
                    let v = brute_oracle(&s, l, u32::MAX).expect("prime within oracle range");
                    ((*idx).clone(), v.status)
                })
                .collect()
        });
        let mut mismatches = Vec::new();
        let mut undecided = 0;
        for (idx, brute) in &reps {
            for &i in idx {
                if fast[i] == Status::Undecided || *brute == Status::Undecided {
                    undecided += 1;
                }
                if fast[i] != *brute {
                    mismatches.push(Mismatch { pair: pairs[i].clone(), fast: fast[i], brute: *brute });
                }
            }
        }
        rows.push(OracleRow {
            n: curve.n(),
            m: curve.m(),
            prime: l,
            pairs: pairs.len(),
            classes: reps.len(),
            solvable: fast.iter().filter(|s| **s == Status::Solvable).count(),
            undecided,
            mismatches,
        });
    }
    rows
}
