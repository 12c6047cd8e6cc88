//! Reference Selmer groups for the fixture curves, stored as data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveError, CurvePoint, HeronCurve};
use crate::selmer::{compare_groups, compute_selmer, SelmerConfig, SelmerError, SelmerGroup};
use crate::squareclass::{ClassError, DescentPair};

pub const BUILTIN: &str = include_str!("../data/tables.toml");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("malformed table file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported table file version {0}")]
    Version(u32),
    #[error("row n={n}: {source}")]
    Curve { n: u64, source: CurveError },
    #[error("row n={n}: generator {value:?}: {source}")]
    Generator { n: u64, value: [i64; 2], source: ClassError },
    #[error("row n={n}: table lists q={listed}, curve has q={actual}")]
    QMismatch { n: u64, listed: u64, actual: u64 },
    #[error(transparent)]
    Selmer(#[from] SelmerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct TableRow {
    /// 1 for odd m, 2 for even m.
    pub table: u8,
    pub n: u64,
    pub q: u64,
    pub generators: Vec<[i64; 2]>,
    pub starred: bool,
}

/// A rational point recorded from an earlier search.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct PointFixture {
    pub n: u64,
    pub m: u32,
    pub x: String,
    pub y: String,
}

impl PointFixture {
    pub fn point(&self) -> Option<CurvePoint> {
        Some(CurvePoint::affine(self.x.parse().ok()?, self.y.parse().ok()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct TableFile {
    pub version: u32,
    pub row: Vec<TableRow>,
    #[serde(default)]
    pub point: Vec<PointFixture>,
}

impl TableFile {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let file: TableFile = toml::from_str(text)?;
        if file.version != 1 {
            return Err(TableError::Version(file.version));
        }
        Ok(file)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("embedded tables parse")
    }
}

impl TableRow {
    pub fn parity(&self) -> &'static str {
        if self.table == 1 {
            "odd"
        } else {
            "even"
        }
    }

    pub fn exponents(&self) -> [u32; 3] {
        if self.table == 1 {
            [1, 3, 5]
        } else {
            [2, 4, 6]
        }
    }

    pub fn curve(&self, m: u32) -> Result<HeronCurve, TableError> {
        let c = HeronCurve::new(self.n, m).map_err(|source| TableError::Curve { n: self.n, source })?;
        if c.q() != self.q {
            return Err(TableError::QMismatch { n: self.n, listed: self.q, actual: c.q() });
        }
        Ok(c)
    }

    pub fn generator_pairs(&self, curve: &HeronCurve) -> Result<Vec<DescentPair>, TableError> {
        let a = curve.ambient();
        self.generators
            .iter()
            .map(|&g| {
                let class = |x: i64| {
                    a.from_integer(x as i128)
                        .map_err(|source| TableError::Generator { n: self.n, value: g, source })
                };
                Ok(DescentPair::new(class(g[0])?, class(g[1])?))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RowCheck {
    pub row: TableRow,
    pub m: u32,
    pub selmer: SelmerGroup,
    pub expected: Vec<DescentPair>,
    /// Quotient classes computed but not listed, and listed but not computed.
    pub engine_only: Vec<DescentPair>,
    pub table_only: Vec<DescentPair>,
}

impl RowCheck {
    pub fn matches(&self) -> bool {
        self.engine_only.is_empty() && self.table_only.is_empty()
    }
}

pub fn check_row(row: &TableRow, m: u32, cfg: &SelmerConfig) -> Result<RowCheck, TableError> {
    let curve = row.curve(m)?;
    let expected = row.generator_pairs(&curve)?;
    let selmer = compute_selmer(&curve, cfg)?;
    let (engine_only, table_only) =
        compare_groups(curve.ambient(), &selmer.torsion_image, &selmer.quotient_generators, &expected);
    Ok(RowCheck { row: row.clone(), m, selmer, expected, engine_only, table_only })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_rows() {
        let t = TableFile::builtin();
        assert_eq!(t.row.iter().filter(|r| r.table == 1).count(), 8);
        assert_eq!(t.row.iter().filter(|r| r.table == 2).count(), 10);
        for r in &t.row {
            let c = r.curve(r.exponents()[0]).unwrap();
            assert_eq!(r.generator_pairs(&c).unwrap().len(), r.generators.len());
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(TableFile::parse("version = 2\nrow = []"), Err(TableError::Version(2))));
        assert!(TableFile::parse("version = 1").is_err());
    }

    #[test]
    fn recorded_points_lie_on_their_curves() {
        let t = TableFile::builtin();
        assert!(!t.point.is_empty());
        for p in &t.point {
            let c = HeronCurve::new(p.n, p.m).unwrap();
            assert!(c.contains(&p.point().unwrap()));
        }
    }
}
