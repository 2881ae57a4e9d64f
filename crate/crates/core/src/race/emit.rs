use std::fmt::Write;

use serde::Serialize;

use super::series::RaceSeries;
use super::sweep::CountVector;
use super::CountingFunction;

/// Rows `x,f,l,value` for every sample, function and class.
pub fn counts_csv(samples: &[CountVector]) -> String {
    let mut out = String::from("x,f,l,value\n");
    for s in samples {
        for f in CountingFunction::ALL {
            for &l in &s.classes {
                if let Some(v) = s.value(f, l) {
                    let _ = writeln!(out, "{},{},{},{}", s.x, f, l, fmt_num(v));
                }
            }
        }
    }
    out
}

/// Rows `x,delta` at the stored sample points.
pub fn series_csv(series: &RaceSeries) -> String {
    let mut out = String::from("x,delta\n");
    for p in &series.checkpoints {
        let _ = writeln!(out, "{},{}", p.x, fmt_num(p.delta));
    }
    out
}

/// Shortest representation that reads back to the same `f64`.
fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub race: String,
    pub first_negative: Option<u64>,
    pub w: u64,
    #[serde(rename = "T")]
    pub t: u64,
}

pub fn crossing_report(series: &RaceSeries) -> CrossingReport {
    CrossingReport {
        race: series.spec.label(series.modulus),
        first_negative: series.first_negative,
        w: series.sign_changes,
        t: series.t,
    }
}
