//! Naive search for rational points `x = u / v^2` and the descent images of
//! what it finds.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::curve::{CurveError, CurvePoint, HeronCurve};
use crate::intmath::exact_sqrt;
use crate::selmer::{quotient_generators, quotient_reps, span, SelmerGroup};
use crate::squareclass::DescentPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub numerator_bound: u64,
    pub denominator_bound: u64,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { numerator_bound: 10_000, denominator_bound: 100, workers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("ImageOutsideSelmer: {point} maps to {pair}")]
    ImageOutsideSelmer { point: String, pair: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

fn point_on(curve: &HeronCurve, u: i128, v: i128) -> Option<CurvePoint> {
    let v2 = v * v;
    let n = u
        .checked_mul(u.checked_sub(curve.a().checked_mul(v2)?)?)?
        .checked_mul(u.checked_add(curve.b().checked_mul(v2)?)?)?;
    let w = exact_sqrt(n)?;
    Some(CurvePoint::affine(Ratio::new(u, v2), Ratio::new(w, v2 * v)))
}

fn sort_key(p: &CurvePoint) -> (i128, i128, i128) {
    match p {
        CurvePoint::Identity => (0, 0, 0),
        CurvePoint::Affine { x, .. } => (*x.denom(), x.numer().abs(), *x.numer()),
    }
}

/// Points with `y >= 0` and `x = u / v^2`, `gcd(u, v) = 1`, `|u| <= N`,
/// `1 <= v <= D`, plus `O` and the 2-torsion.
pub fn search_points(curve: &HeronCurve, cfg: &SearchConfig) -> Vec<CurvePoint> {
    let nb = cfg.numerator_bound as i128;
    let db = cfg.denominator_bound.max(1) as i128;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers.max(1)).build().expect("thread pool");
    let found: Vec<CurvePoint> = pool.install(|| {
        (-nb..=nb)
            .into_par_iter()
            .flat_map_iter(|u| {
                (1..=db).filter(move |&v| u.gcd(&v) == 1).filter_map(move |v| point_on(curve, u, v))
            })
            .collect()
    });
    let mut all: BTreeSet<CurvePoint> = curve.two_torsion().into_iter().collect();
    all.extend(found);
    let mut out: Vec<CurvePoint> = all.into_iter().collect();
    out.sort_by_key(sort_key);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentReport {
    pub images: Vec<(CurvePoint, DescentPair)>,
    /// Generators of the image subgroup modulo the torsion image.
    pub generated: Vec<DescentPair>,
    pub rank_lower_bound: u32,
    pub rank_upper_bound: u32,
}

/// Checks every image against the Selmer group and bounds the rank from
/// below by the dimension of the image span.
pub fn verify_descent_image(
    curve: &HeronCurve,
    points: &[CurvePoint],
    selmer: &SelmerGroup,
) -> Result<DescentReport, PointError> {
    let ambient = curve.ambient();
    let members: BTreeSet<&DescentPair> = selmer.members.iter().collect();
    let mut images = Vec::new();
    for p in points {
        let pair = curve.beta(p)?;
        if !members.contains(&pair) {
            return Err(PointError::ImageOutsideSelmer { point: p.to_string(), pair: pair.to_string() });
        }
        images.push((p.clone(), pair));
    }
    let torsion = curve.torsion_image();
    let pairs: Vec<DescentPair> = images.iter().map(|(_, b)| b.clone()).collect();
    let group = span(ambient, &[torsion.clone(), pairs].concat());
    let reps = quotient_reps(ambient, &group, &torsion);
    let generated = quotient_generators(ambient, &reps, &torsion);
    Ok(DescentReport {
        rank_lower_bound: generated.len() as u32,
        rank_upper_bound: selmer.rank_upper_bound,
        images,
        generated,
    })
}

/// `{"x":["u","v2"],"y":["w","v3"]}`, with `null` for the point at infinity.
pub struct PointJson<'a>(pub &'a CurvePoint);

impl Serialize for PointJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            CurvePoint::Identity => s.serialize_none(),
            CurvePoint::Affine { x, y } => {
                let mut map = s.serialize_map(Some(2))?;
                map.serialize_entry("x", &[x.numer().to_string(), x.denom().to_string()])?;
                map.serialize_entry("y", &[y.numer().to_string(), y.denom().to_string()])?;
                map.end()
            }
        }
    }
}
