//! Rendering of command results; every format is a pure function of the
//! computed data so output is byte-stable.

use std::fmt::Write;

use serde_json::{json, Value};

use heron_descent::localsolve::{OracleRow, Status};
use heron_descent::pointsearch::{DescentReport, PointJson};
use heron_descent::selmer::{Comparison, SelmerGroup, TheoremPrediction};
use heron_descent::tables::RowCheck;
use heron_descent::{CurvePoint, DescentPair, HeronCurve};

use crate::Format;

fn pairs_json(v: &[DescentPair]) -> Value {
    Value::Array(v.iter().map(|p| json!(p.values())).collect())
}

fn group_text(v: &[DescentPair]) -> String {
    if v.is_empty() {
        return "trivial".to_string();
    }
    let inner: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    format!("<{}>", inner.join(", "))
}

fn set_text(v: &[DescentPair]) -> String {
    let inner: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

fn status_letter(s: Status) -> &'static str {
    match s {
        Status::Solvable => "S",
        Status::Insolvable => "I",
        Status::Undecided => "U",
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn curve_json(c: &HeronCurve) -> Value {
    json!({
        "n": c.n(),
        "m": c.m(),
        "q": c.q(),
        "primes": c.primes(),
        "a": c.a(),
        "b": c.b(),
        "discriminant": c.discriminant().to_string(),
        "places": c.places_to_check().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

pub fn compute(s: &SelmerGroup, t: &TheoremPrediction, cmp: &Comparison, format: Format) -> String {
    let c = &s.curve;
    match format {
        Format::Json => {
            let verdicts: Vec<Value> = s
                .verdicts
                .iter()
                .map(|v| {
                    json!({
                        "pair": v.pair.values(),
                        "locally_solvable": v.all_solvable(),
                        "places": v.verdicts.values().collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&json!({
                "curve": curve_json(c),
                "verdicts": verdicts,
                "members": pairs_json(&s.members),
                "dimension": s.dimension,
                "torsion_image": pairs_json(&s.torsion_image),
                "quotient_reps": pairs_json(&s.quotient_reps),
                "quotient_generators": pairs_json(&s.quotient_generators),
                "rank_upper_bound": s.rank_upper_bound,
                "theorem": {
                    "applicable": t.applicable,
                    "agrees": cmp.agrees,
                    "reason": t.reason,
                    "predicted_quotient": pairs_json(&t.predicted_quotient),
                    "engine_only": pairs_json(&cmp.engine_only),
                    "predicted_only": pairs_json(&cmp.predicted_only),
                },
            }))
        }
        Format::Csv => {
            let mut out = String::from("b1,b2,place,status\n");
            for v in &s.verdicts {
                let [b1, b2] = v.pair.values();
                for (place, lv) in &v.verdicts {
                    let _ = writeln!(out, "{b1},{b2},{place},{:?}", lv.status);
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "curve      {c}");
            let _ = writeln!(out, "q          {}", c.q());
            let primes: Vec<String> = c.primes().iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "n          {} = {}", c.n(), primes.join(" * "));
            let places: Vec<String> = c.places_to_check().iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "places     {}", places.join(" "));
            let _ = writeln!(out, "pairs      {}", s.verdicts.len());
            let _ = writeln!(out, "members    {}", s.members.len());
            let _ = writeln!(out, "dimension  {}", s.dimension);
            let _ = writeln!(out, "torsion    {}", set_text(&s.torsion_image));
            let _ = writeln!(out, "quotient   {}", group_text(&s.quotient_generators));
            let _ = writeln!(out, "rank       <= {}", s.rank_upper_bound);
            let verdict = match cmp.agrees {
                None => "not applicable".to_string(),
                Some(true) => format!("agrees ({})", t.reason),
                Some(false) => format!(
                    "DISAGREES ({}): engine only {}, predicted only {}",
                    t.reason,
                    set_text(&cmp.engine_only),
                    set_text(&cmp.predicted_only)
                ),
            };
            let _ = writeln!(out, "theorem    {verdict}");
            let _ = writeln!(out, "verdicts");
            for v in &s.verdicts {
                let marks: Vec<String> = v
                    .verdicts
                    .iter()
                    .map(|(p, lv)| format!("{p}:{}", status_letter(lv.status)))
                    .collect();
                let flag = if v.all_solvable() { "*" } else { " " };
                let _ = writeln!(out, "  {flag} {:<24} {}", v.pair.to_string(), marks.join(" "));
            }
            out
        }
    }
}

pub fn tables(checks: &[RowCheck], format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "table": c.row.table,
                        "n": c.row.n,
                        "m": c.m,
                        "matches": c.matches(),
                        "starred": c.row.starred,
                        "dimension": c.selmer.dimension,
                        "expected": pairs_json(&c.expected),
                        "engine_generators": pairs_json(&c.selmer.quotient_generators),
                        "engine_only": pairs_json(&c.engine_only),
                        "table_only": pairs_json(&c.table_only),
                    })
                })
                .collect();
            pretty(&Value::Array(rows))
        }
        Format::Csv => {
            let mut out = String::from("table,n,m,matches,dimension,starred\n");
            for c in checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.row.table, c.row.n, c.m, c.matches(), c.selmer.dimension, c.row.starred
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for c in checks {
                let star = if c.row.starred { " (starred in source)" } else { "" };
                if c.matches() {
                    let _ = writeln!(
                        out,
                        "table {} n={:<5} m={}  match     {}{star}",
                        c.row.table,
                        c.row.n,
                        c.m,
                        group_text(&c.expected)
                    );
                } else {
                    let _ = writeln!(
                        out,
                        "table {} n={:<5} m={}  MISMATCH  table {} engine {}; engine only {}, table only {}",
                        c.row.table,
                        c.row.n,
                        c.m,
                        group_text(&c.expected),
                        group_text(&c.selmer.quotient_generators),
                        set_text(&c.engine_only),
                        set_text(&c.table_only)
                    );
                }
            }
            let ok = checks.iter().filter(|c| c.matches()).count();
            let _ = writeln!(out, "{ok}/{} rows match", checks.len());
            out
        }
    }
}

fn point_parts(p: &CurvePoint) -> Option<[String; 4]> {
    match p {
        CurvePoint::Identity => None,
        CurvePoint::Affine { x, y } => Some([
            x.numer().to_string(),
            x.denom().to_string(),
            y.numer().to_string(),
            y.denom().to_string(),
        ]),
    }
}

pub fn points(c: &HeronCurve, r: &DescentReport, format: Format) -> String {
    let certified = r.rank_lower_bound == r.rank_upper_bound;
    match format {
        Format::Json => pretty(&json!({
            "curve": curve_json(c),
            "points": r.images.iter().map(|(p, _)| PointJson(p)).collect::<Vec<_>>(),
            "images": r.images.iter().map(|(_, b)| b.values()).collect::<Vec<_>>(),
            "image_generators": pairs_json(&r.generated),
            "rank_lower_bound": r.rank_lower_bound,
            "rank_upper_bound": r.rank_upper_bound,
            "certified": certified,
        })),
        Format::Csv => {
            let mut out = String::from("x_num,x_den,y_num,y_den,b1,b2\n");
            for (p, b) in &r.images {
                let [b1, b2] = b.values();
                match point_parts(p) {
                    None => {
                        let _ = writeln!(out, ",,,,{b1},{b2}");
                    }
                    Some([a, b, c, d]) => {
                        let _ = writeln!(out, "{a},{b},{c},{d},{b1},{b2}");
                    }
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "curve      {c}");
            let _ = writeln!(out, "points     {}", r.images.len());
            for (p, b) in &r.images {
                let _ = writeln!(out, "  {:<40} -> {b}", p.to_string());
            }
            let _ = writeln!(out, "images     {}", group_text(&r.generated));
            let _ = writeln!(out, "rank       {} <= rank <= {}", r.rank_lower_bound, r.rank_upper_bound);
            if certified {
                let _ = writeln!(out, "rank {} certified", r.rank_lower_bound);
            }
            out
        }
    }
}

pub fn oracle(rows: &[OracleRow], format: Format) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(rows).expect("json")),
        Format::Csv => {
            let mut out = String::from("n,m,prime,pairs,classes,solvable,undecided,mismatches\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.n, r.m, r.prime, r.pairs, r.classes, r.solvable, r.undecided, r.mismatches.len()
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in rows {
                let state = if r.ok() { "ok" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "n={:<5} m={} l={:<3} pairs={:<5} classes={:<3} solvable={:<5} undecided={} mismatches={}  {state}",
                    r.n, r.m, r.prime, r.pairs, r.classes, r.solvable, r.undecided, r.mismatches.len()
                );
                for mm in &r.mismatches {
                    let _ = writeln!(out, "    {} fast={:?} brute={:?}", mm.pair, mm.fast, mm.brute);
                }
            }
            let ok = rows.iter().filter(|r| r.ok()).count();
            let _ = writeln!(out, "{ok}/{} prime checks agree", rows.len());
            out
        }
    }
}
