//! Rendering batch reports as text, JSON or CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::batch::{BatchReport, Check, InstanceRow};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?} (text, json, csv)")),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["instance", "n", "r", "diameter", "hirsch", "tope_path", "crabbed"];

pub fn render(report: &BatchReport, format: Format) -> String {
    match format {
        Format::Text => text(report),
        Format::Json => json(report),
        Format::Csv => csv(report),
    }
}

pub fn text(rep: &BatchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n = {}, r = {}: {} instances", rep.n, rep.r, rep.instances);
    for c in &rep.checks {
        let ok = rep.passed.get(c).copied().unwrap_or(0);
        let bad = rep.failed.get(c).copied().unwrap_or(0);
        let _ = writeln!(s, "  {:<11} {ok} passed, {bad} failed", format!("{c}:"));
    }
    match rep.max_diameter {
        Some(d) => {
            let _ = writeln!(s, "Δ({},{}) = max diam = {d} (n-r+2 = {})", rep.n, rep.r, rep.n + 2 - rep.r);
        }
        None => {
            let _ = writeln!(s, "Δ({},{}) = max diam = n/a", rep.n, rep.r);
        }
    }
    if rep.checks.contains(&Check::Crabbed) {
        let _ = writeln!(s, "  crabbed-disconnected instances: {}", rep.crabbed_disconnected_instances);
    }
    for e in &rep.errors {
        let _ = writeln!(s, "  line {}: {}", e.line, e.message);
    }
    for v in &rep.violations {
        let _ = writeln!(s, "  line {} violates {} ({} witnesses shown)", v.instance, v.conjecture.id(), v.witnesses.len());
        for w in &v.witnesses {
            let bound = w.bound.map_or("none".to_string(), |b| b.to_string());
            let _ = writeln!(s, "    {} {} d={} bound={bound}", w.x, w.y, w.d);
        }
    }
    if let Some(t) = &rep.timing {
        let _ = writeln!(s, "  wall time {:.1} ms, {:.3} ms per instance", t.wall_ms, t.per_instance_ms);
    }
    let _ = writeln!(s, "{}", if rep.all_passed() { "all checks passed" } else { "FAILED" });
    s
}

pub fn json(rep: &BatchReport) -> String {
    serde_json::to_string_pretty(rep).expect("report serializes")
}

fn cell(row: &InstanceRow, c: Check) -> &'static str {
    match row.results.get(&c) {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "",
    }
}

pub fn csv(rep: &BatchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in &rep.rows {
        let diameter = row.diameter.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([
            row.line.to_string().as_str(),
            &row.n.to_string(),
            &row.r.to_string(),
            &diameter,
            cell(row, Check::Hirsch),
            cell(row, Check::TopePath),
            cell(row, Check::Crabbed),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}
