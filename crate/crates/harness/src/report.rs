//! Report rows and their CSV / JSONL serializations. Floats are written
//! with 17 significant digits so every finite f64 round-trips exactly; a
//! NaN statistic (recorded task failure) serializes as `NaN` in CSV and
//! `null` in JSONL.

use serde_json::{json, Map, Value};
use strat_lab_core::{Error, Result};

/// One check outcome. Mode-level rows carry the mode indices and grid
/// node eta; aggregate (theorem) rows are tagged (0, 0, 0.0).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub mode_k: i32,
    pub mode_l: i32,
    pub eta: f64,
    pub check: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub wall_ms: u64,
}

impl ReportRow {
    /// Builds a row with `pass = statistic <= threshold`; NaN fails.
    pub fn evaluate(
        scenario: &str,
        mode_k: i32,
        mode_l: i32,
        eta: f64,
        check: &str,
        statistic: f64,
        threshold: f64,
        wall_ms: u64,
    ) -> Self {
        ReportRow {
            scenario: scenario.to_string(),
            mode_k,
            mode_l,
            eta,
            check: check.to_string(),
            statistic,
            threshold,
            pass: statistic <= threshold,
            wall_ms,
        }
    }
}

pub const CSV_HEADER: &str = "scenario,mode_k,mode_l,eta,check,statistic,threshold,pass,wall_ms";

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn emit_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.scenario,
            r.mode_k,
            r.mode_l,
            fmt_f64(r.eta),
            r.check,
            fmt_f64(r.statistic),
            fmt_f64(r.threshold),
            r.pass,
            r.wall_ms
        ));
    }
    out
}

pub fn emit_jsonl(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let mut obj = Map::new();
        obj.insert("scenario".into(), json!(r.scenario));
        obj.insert("mode_k".into(), json!(r.mode_k));
        obj.insert("mode_l".into(), json!(r.mode_l));
        obj.insert("eta".into(), json!(r.eta));
        obj.insert("check".into(), json!(r.check));
        let stat = if r.statistic.is_nan() {
            Value::Null
        } else {
            json!(r.statistic)
        };
        obj.insert("statistic".into(), stat);
        obj.insert("threshold".into(), json!(r.threshold));
        obj.insert("pass".into(), json!(r.pass));
        obj.insert("wall_ms".into(), json!(r.wall_ms));
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

fn row_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => return Err(row_err(1, "missing or wrong CSV header")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(row_err(idx + 1, format!("expected 9 fields, got {}", parts.len())));
        }
        let f = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| row_err(idx + 1, format!("bad {what}: `{s}`")))
        };
        rows.push(ReportRow {
            scenario: parts[0].to_string(),
            mode_k: parts[1]
                .parse()
                .map_err(|_| row_err(idx + 1, "bad mode_k"))?,
            mode_l: parts[2]
                .parse()
                .map_err(|_| row_err(idx + 1, "bad mode_l"))?,
            eta: f(parts[3], "eta")?,
            check: parts[4].to_string(),
            statistic: f(parts[5], "statistic")?,
            threshold: f(parts[6], "threshold")?,
            pass: match parts[7] {
                "true" => true,
                "false" => false,
                other => return Err(row_err(idx + 1, format!("bad pass: `{other}`"))),
            },
            wall_ms: parts[8]
                .parse()
                .map_err(|_| row_err(idx + 1, "bad wall_ms"))?,
        });
    }
    Ok(rows)
}

pub fn parse_jsonl(text: &str) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line)
            .map_err(|e| row_err(idx + 1, format!("bad JSON: {e}")))?;
        let get = |key: &str| {
            v.get(key)
                .ok_or_else(|| row_err(idx + 1, format!("missing key `{key}`")))
        };
        let num = |key: &str| -> Result<f64> {
            let field = get(key)?;
            if field.is_null() {
                return Ok(f64::NAN);
            }
            field
                .as_f64()
                .ok_or_else(|| row_err(idx + 1, format!("non-numeric `{key}`")))
        };
        rows.push(ReportRow {
            scenario: get("scenario")?
                .as_str()
                .ok_or_else(|| row_err(idx + 1, "non-string scenario"))?
                .to_string(),
            mode_k: num("mode_k")? as i32,
            mode_l: num("mode_l")? as i32,
            eta: num("eta")?,
            check: get("check")?
                .as_str()
                .ok_or_else(|| row_err(idx + 1, "non-string check"))?
                .to_string(),
            statistic: num("statistic")?,
            threshold: num("threshold")?,
            pass: get("pass")?
                .as_bool()
                .ok_or_else(|| row_err(idx + 1, "non-bool pass"))?,
            wall_ms: num("wall_ms")? as u64,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_rows() -> Vec<ReportRow> {
        vec![
            ReportRow::evaluate("a", 1, -2, 0.5, "divergence", 1e-12, 1e-8, 7),
            ReportRow::evaluate("b.x", 0, 0, 0.0, "theorem1", 0.31, 10.0, 0),
            ReportRow::evaluate("c", 2, 1, -3.25, "envelopes", f64::NAN, 1e-9, 0),
        ]
    }

    #[test]
    fn one_row_makes_a_two_line_csv() {
        let csv = emit_csv(&sample_rows()[..1]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("a,1,-2,"));
    }

    #[test]
    fn nan_statistic_fails_and_round_trips() {
        let rows = sample_rows();
        assert!(!rows[2].pass);
        let csv_back = parse_csv(&emit_csv(&rows)).unwrap();
        assert!(csv_back[2].statistic.is_nan());
        let json_back = parse_jsonl(&emit_jsonl(&rows)).unwrap();
        assert!(json_back[2].statistic.is_nan());
        assert!(emit_csv(&rows).contains("NaN"));
        assert!(emit_jsonl(&rows).contains("null"));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = sample_rows();
        let back = parse_csv(&emit_csv(&rows)).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.scenario, b.scenario);
            assert_eq!((a.mode_k, a.mode_l, a.pass, a.wall_ms), (b.mode_k, b.mode_l, b.pass, b.wall_ms));
            assert!(a.eta == b.eta || (a.eta.is_nan() && b.eta.is_nan()));
            assert!(a.threshold == b.threshold);
        }
    }

    #[test]
    fn empty_row_set_is_header_only() {
        assert_eq!(emit_csv(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(emit_jsonl(&[]), "");
        assert!(parse_csv(&emit_csv(&[])).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn finite_floats_survive_both_formats(
            stat in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
            eta in -1e6f64..1e6,
            wall in 0u64..1_000_000,
        ) {
            let rows = vec![ReportRow::evaluate("p", 3, -1, eta, "divergence", stat, 1e-8, wall)];
            let csv = parse_csv(&emit_csv(&rows)).unwrap();
            prop_assert_eq!(csv[0].statistic.to_bits(), stat.to_bits());
            prop_assert_eq!(csv[0].eta.to_bits(), eta.to_bits());
            let jsonl = parse_jsonl(&emit_jsonl(&rows)).unwrap();
            prop_assert_eq!(jsonl[0].statistic.to_bits(), stat.to_bits());
            prop_assert_eq!(jsonl[0].eta.to_bits(), eta.to_bits());
            prop_assert_eq!(jsonl[0].wall_ms, wall);
        }
    }
}
