//! Report rendering.

use std::fmt::Write;

use clap::ValueEnum;
use serde_json::Value;

use crate::run::{Report, ReportEntry, Status};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => report.entries.iter().map(text_entry).collect(),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn prime_set(v: &Value) -> String {
    match v.get("kind").and_then(Value::as_str) {
        Some("all") => "all primes".into(),
        _ => {
            let ps: Vec<String> = v
                .get("primes")
                .and_then(Value::as_array)
                .map(|a| a.iter().map(compact).collect())
                .unwrap_or_default();
            format!("{{{}}}", ps.join(", "))
        }
    }
}

fn summary(e: &ReportEntry) -> String {
    let v = &e.verdict;
    let c = &e.certificate;
    match e.kind.as_str() {
        "torus" => format!(
            "residually p for {}; residually nilpotent: {}; charpoly {}",
            prime_set(&v["prime_set"]),
            v["residually_nilpotent"],
            compact(&c["charpoly"])
        ),
        "primes" => format!("residually p for {}", prime_set(&v["prime_set"])),
        "fibered" => {
            let mut s = format!("residually p at {}", compact(&v["residually_p_at"]));
            if let Some(arr) = v["verdicts"].as_array() {
                let labels: Vec<String> = arr
                    .iter()
                    .map(|x| format!("{}:{}", x["p"], compact(&x["outcome"])))
                    .collect();
                write!(s, " [{}]", labels.join(" ")).unwrap();
            }
            if !c["braid"].is_null() {
                write!(s, "; permutation order {}", c["braid"]["permutation_order"]).unwrap();
            }
            s
        }
        "bs" => format!(
            "q = {}: residually p for {}; omega-nilpotent: {}",
            compact(&v["q"]),
            prime_set(&v["residually_p_primes"]),
            v["omega_nilpotent"]
        ),
        "braid-cover" => format!(
            "cover homology rank {}; charpoly {}; divisibility {}",
            v["rank"],
            compact(&c["charpoly"]),
            compact(&v["divisibility"])
        ),
        "witness" => {
            let mut s = format!("p = {}: {}", v["p"], compact(&v["outcome"]));
            if let Some(q) = c.get("quotient") {
                write!(
                    s,
                    "; survivors {}; components {}; |Q| <= p^{}; re-verified: {}",
                    compact(&v["survivors"]),
                    compact(&q["components"]),
                    q["order_log_bound"],
                    c["check"]["valid"]
                )
                .unwrap();
            }
            s
        }
        "extension" => compact(v),
        "sl2-power" => compact(&v["least_powers"]),
        _ => compact(v),
    }
}

fn text_entry(e: &ReportEntry) -> String {
    let status = match e.status {
        Status::Ok => "ok",
        Status::Error => "error",
        Status::CapExceeded => "cap exceeded",
    };
    let mut s = format!("{} [{}] {}", e.id, e.kind, status);
    match &e.error {
        Some(err) => write!(s, ": {err}").unwrap(),
        None => write!(s, ": {}", summary(e)).unwrap(),
    }
    s.push('\n');
    for ev in &e.cap_events {
        writeln!(s, "  cap: {} (limit {})", ev.what, ev.limit).unwrap();
    }
    s
}
