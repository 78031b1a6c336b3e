//! Report serialization: a summary JSON document, one JSON line per point
//! and a CSV table of extremal points. Every number is written as its exact
//! string next to a double.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use super::abc::AbcReport;
use super::t2::{SaturationRow, T2Construction};
use super::vojta::{PointRecord, ScanReport};
use super::Num;
use crate::error::Result;
use crate::exact::Rat;

fn num<T>(x: &T) -> Value
where
    for<'a> Num: From<&'a T>,
{
    serde_json::to_value(Num::from(x)).expect("plain struct")
}

pub fn point_json(r: &PointRecord) -> Value {
    json!({
        "index": r.index,
        "a": num(&r.a),
        "b": r.b.as_ref().map(num),
        "lhs": num(&r.lhs),
        "rhs": num(&r.rhs),
        "margin": num(&r.margin),
    })
}

/// `timestamp` is seconds since the epoch; `None` leaves it out so runs can
/// be compared byte for byte.
pub fn summary_json(r: &ScanReport, timestamp: Option<u64>) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            json!({
                "a": num(&v.a),
                "b": num(&v.b),
                "center": num(&v.center),
                "prime": v.prime.to_string(),
                "n_p": v.n_p,
                "m_p": v.m_p,
                "lhs": num(&v.lhs),
                "bound": num(&v.bound),
            })
        })
        .collect();
    let failures: Vec<Value> = r
        .factor_failures
        .iter()
        .map(|(a, b)| json!({"a": a.to_string(), "b": b.as_ref().map(Rat::to_string)}))
        .collect();
    let shells: Vec<Value> = r
        .shells
        .iter()
        .map(|s| {
            json!({
                "k": s.k,
                "points": s.points,
                "fitted_C": s.best.as_ref().map(|b| num(&b.margin)),
                "attained_at": s.best.as_ref().map(point_json),
            })
        })
        .collect();
    let mut doc = json!({
        "kind": r.kind,
        "config": r.config,
        "evaluated": r.evaluated,
        "skipped": {
            "a_zero": r.skipped.a_zero,
            "a_on_center": r.skipped.a_on_center,
            "b_zero": r.skipped.b_zero,
        },
        "factor_failures": failures,
        "fitted_C": r.fitted_c.as_ref().map(|b| num(&b.margin)),
        "fitted_at": r.fitted_c.as_ref().map(point_json),
        "extremal": r.extremal.iter().map(point_json).collect::<Vec<_>>(),
        "bound_checks": r.bound_checks,
        "violations": violations,
        "centers_differences_s_units": r.centers_s_units,
        "shells": shells,
    });
    if let Some(t) = timestamp {
        doc["timestamp"] = json!(t);
    }
    doc
}

pub fn points_jsonl(r: &ScanReport) -> String {
    let mut out = String::new();
    for p in &r.points {
        out.push_str(&point_json(p).to_string());
        out.push('\n');
    }
    out
}

pub fn extremal_csv(r: &ScanReport) -> String {
    let mut out = String::from("rank,index,a,b,lhs,rhs,margin,margin_f64\n");
    for (i, p) in r.extremal.iter().enumerate() {
        let b = p.b.as_ref().map(Rat::to_string).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},\"{}\",\"{}\",\"{}\",{}\n",
            i + 1,
            p.index,
            p.a,
            b,
            p.lhs,
            p.rhs,
            p.margin,
            p.margin.to_f64()
        ));
    }
    out
}

/// Writes `summary.json`, `points.jsonl` and `extremal.csv` into `dir`.
pub fn write_outputs(r: &ScanReport, dir: &Path, timestamp: Option<u64>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let summary = serde_json::to_string_pretty(&summary_json(r, timestamp)).expect("json");
    fs::write(dir.join("summary.json"), summary + "\n")?;
    fs::write(dir.join("points.jsonl"), points_jsonl(r))?;
    fs::write(dir.join("extremal.csv"), extremal_csv(r))?;
    Ok(())
}

pub fn abc_json(r: &AbcReport, timestamp: Option<u64>) -> Value {
    let top: Vec<Value> = r
        .top
        .iter()
        .map(|t| {
            json!({
                "a": t.a, "b": t.b, "c": t.c, "rad": t.rad,
                "quality": {
                    "exact": format!("{} / {}", t.log_c(), t.log_rad()),
                    "float": t.quality_f64(),
                },
            })
        })
        .collect();
    let mut doc = json!({
        "kind": "abc",
        "config": {"c_max": r.c_max.to_string(), "top_k": r.top.len().to_string()},
        "considered": r.considered,
        "top": top,
    });
    if let Some(t) = timestamp {
        doc["timestamp"] = json!(t);
    }
    doc
}

pub fn abc_csv(r: &AbcReport) -> String {
    let mut out = String::from("rank,a,b,c,rad,quality_f64\n");
    for (i, t) in r.top.iter().enumerate() {
        out.push_str(&format!("{},{},{},{},{},{}\n", i + 1, t.a, t.b, t.c, t.rad, t.quality_f64()));
    }
    out
}

pub fn t2_json(c: &T2Construction, sat: Option<&SaturationRow>) -> Value {
    let rows: Vec<Value> = c
        .rows
        .iter()
        .map(|r| {
            json!({
                "p": r.prime.to_string(),
                "n_p": r.n_p,
                "m_p": r.m_p,
                "alpha_p": r.alpha.as_ref().map(num),
                "alpha_in_range": r.alpha_ok,
                "lhs": num(&r.lhs),
                "lambda_Y": num(&r.lambda_y),
                "excess": num(&r.excess),
                "expected": num(&r.expected),
                "identity_holds": r.identity_ok,
            })
        })
        .collect();
    let mut doc = json!({
        "a": num(&c.a),
        "n": c.n,
        "S": c.s.to_string(),
        "variant": format!("{:?}", c.variant).to_lowercase(),
        "delta": num(&c.delta),
        "b": c.b.to_string(),
        "h_b": num(&c.h_b),
        "h_b_le_n_h_a_minus_1": c.h_b_le_n_h_am1,
        "h_b_le_n_h_a_minus_1_plus_n_log2": c.h_b_le_n_h_am1_2,
        "h_b_le_n_h_a_plus_n_log2": c.h_b_le_n_h_a_2,
        "primes": rows,
        "total_excess": num(&c.total_excess()),
    });
    if let Some(s) = sat {
        doc["saturation"] = json!({
            "one_power_off": {"lhs": num(&s.one_power_off_lhs), "rhs": num(&s.one_power_off_rhs)},
            "dropped_s_part": num(&s.dropped_s_part),
            "final": {"lhs": num(&s.final_lhs), "rhs": num(&s.final_rhs)},
        });
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{vojta_scan, ScanConfig};

    #[test]
    fn outputs_are_reproducible() {
        let cfg = ScanConfig {
            a_range: (2, 12),
            b_range: (1, 12),
            record_points: true,
            ..ScanConfig::default()
        };
        let r = vojta_scan(&cfg).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        write_outputs(&r, d1.path(), None).unwrap();
        let r2 = vojta_scan(&ScanConfig { jobs: 3, ..cfg }).unwrap();
        write_outputs(&r2, d2.path(), None).unwrap();
        for f in ["summary.json", "points.jsonl", "extremal.csv"] {
            let x = fs::read(d1.path().join(f)).unwrap();
            let y = fs::read(d2.path().join(f)).unwrap();
            assert_eq!(x, y, "{f}");
        }
        let s = summary_json(&r, Some(7));
        assert_eq!(s["timestamp"], 7);
        assert!(summary_json(&r, None).get("timestamp").is_none());
        assert_eq!(points_jsonl(&r).lines().count() as u64, r.evaluated);
        let line: Value = serde_json::from_str(points_jsonl(&r).lines().next().unwrap()).unwrap();
        assert!(line["margin"]["exact"].is_string() && line["margin"]["float"].is_number());
    }
}
