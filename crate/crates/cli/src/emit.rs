//! Report files and the stdout summary.
//!
//! `report.json` holds no timings, so two runs with the same seed write
//! identical bytes. Wall-clock times go to `timing.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::run::RunReport;
use crate::scenario::Format;

/// Pretty JSON of the run without per-class rows (those go to `classes.csv`).
pub fn report_json(report: &RunReport) -> String {
    let mut r = report.clone();
    for o in &mut r.outcomes {
        for rep in &mut o.reports {
            rep.rows.clear();
        }
    }
    let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
    s.push('\n');
    s
}

fn num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

const SUMMARY_HEADERS: &[&str] = &[
    "index", "verifier", "label", "L", "verdict", "sup_lo", "sup_hi", "bound_lo", "bound_hi",
    "reference_lo", "reference_hi", "error",
];

/// One line per report, plus one per failed verifier.
pub fn summary_csv(report: &RunReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADERS)?;
    for o in &report.outcomes {
        for r in &o.reports {
            let sup = r.window.as_ref().map(|w| w.sup);
            w.write_record([
                o.index.to_string(),
                r.verifier.clone(),
                o.label.clone(),
                r.window_l.to_string(),
                r.verdict.as_str().to_string(),
                num(sup.map(|s| s.lo)),
                num(sup.map(|s| s.hi)),
                num(r.bound.map(|b| b.lo)),
                num(r.bound.map(|b| b.hi)),
                num(r.reference.map(|b| b.lo)),
                num(r.reference.map(|b| b.hi)),
                String::new(),
            ])?;
        }
        if let Some(e) = &o.error {
            let mut rec = vec![o.index.to_string(), o.name.clone(), o.label.clone()];
            rec.extend(std::iter::repeat_n(String::new(), 8));
            rec.push(format!("{}: {}", e.kind, e.message));
            w.write_record(&rec)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn classes_csv(report: &RunReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "verifier", "label", "L", "class", "std_len", "x_lo", "x_hi", "xstar_lo", "xstar_hi",
        "ratio_lo", "ratio_hi",
    ])?;
    for o in &report.outcomes {
        for r in &o.reports {
            for row in &r.rows {
                w.write_record([
                    r.verifier.clone(),
                    o.label.clone(),
                    r.window_l.to_string(),
                    row.class.clone(),
                    row.std_len.to_string(),
                    row.x.lo.to_string(),
                    row.x.hi.to_string(),
                    row.xstar.lo.to_string(),
                    row.xstar.hi.to_string(),
                    num(row.ratio.map(|b| b.lo)),
                    num(row.ratio.map(|b| b.hi)),
                ])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[derive(Serialize)]
struct Timing<'a> {
    index: usize,
    name: &'a str,
    seconds: f64,
}

/// Writes every report file into `dir` and returns their paths.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut put = |name: String, body: String| -> Result<(), CliError> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        paths.push(p);
        Ok(())
    };
    put("report.json".into(), report_json(report))?;
    put("summary.csv".into(), summary_csv(report)?)?;
    put("classes.csv".into(), classes_csv(report)?)?;
    for o in &report.outcomes {
        if let Some(t) = &o.table {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.headers)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            put(
                format!("table-{}-{}.csv", o.index, o.name),
                String::from_utf8(bytes).expect("csv is utf-8"),
            )?;
        }
    }
    let timings: Vec<Timing> = report
        .outcomes
        .iter()
        .map(|o| Timing {
            index: o.index,
            name: &o.name,
            seconds: o.seconds,
        })
        .collect();
    put(
        "timing.json".into(),
        serde_json::to_string_pretty(&timings).expect("timings serialize") + "\n",
    )?;
    Ok(paths)
}

/// Text printed on stdout for `format`.
pub fn stdout_text(report: &RunReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(report_json(report)),
        Format::Csv => summary_csv(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::run;
    use crate::scenario::Scenario;

    #[test]
    fn summary_has_one_line_per_report() {
        let s = Scenario::parse(
            r#"{ "rank": 2,
                 "actions": { "a": { "kind": "tree", "weights": [1, 2] } },
                 "verifiers": [ { "name": "dilation", "x": "a", "xstar": "a", "L": [2, 4] },
                                { "name": "jsr", "matrices": "a" } ] }"#,
        )
        .unwrap();
        let r = run(&s).unwrap();
        let text = summary_csv(&r).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4, "{text}");
        assert!(lines[1].starts_with("0,dilation,dilation x=a xstar=a,2,holds,1,1"));
        assert!(lines[3].contains("input: "), "{}", lines[3]);
    }

    #[test]
    fn report_json_drops_class_rows() {
        let s = Scenario::parse(
            r#"{ "rank": 2,
                 "actions": { "a": { "kind": "tree" } },
                 "verifiers": [ { "name": "dilation", "x": "a", "xstar": "a", "L": [3] } ] }"#,
        )
        .unwrap();
        let r = run(&s).unwrap();
        assert!(!r.outcomes[0].reports[0].rows.is_empty());
        let v: serde_json::Value = serde_json::from_str(&report_json(&r)).unwrap();
        assert_eq!(v["outcomes"][0]["reports"][0]["rows"], serde_json::json!([]));
        assert!(v["outcomes"][0].get("seconds").is_none());
    }
}
