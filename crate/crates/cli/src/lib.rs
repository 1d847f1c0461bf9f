//! Task-file front end for `resip-core`.

pub mod caps;
pub mod report;
pub mod run;
pub mod schema;

pub use caps::CapOverrides;
pub use report::{emit_report, Format};
pub use run::{run_tasks, Report, ReportEntry, RunOptions, Status};
pub use schema::{parse_task_file, SchemaError, Task, TaskFile, TaskKind};

use resip_core::witness::{verify_witness, PGroupQuotient, WitnessCheck};
use serde_json::Value;

/// Certificates to re-check: a bare quotient, a witness report entry, or a
/// whole report.
pub fn certificates_in(v: &Value) -> Result<Vec<PGroupQuotient>, String> {
    if let Ok(q) = serde_json::from_value::<PGroupQuotient>(v.clone()) {
        return Ok(vec![q]);
    }
    if let Some(q) = v.get("quotient") {
        return serde_json::from_value(q.clone()).map(|q| vec![q]).map_err(|e| e.to_string());
    }
    if let Some(c) = v.get("certificate") {
        return certificates_in(c);
    }
    if let Some(entries) = v.get("entries").and_then(Value::as_array) {
        let mut out = Vec::new();
        for e in entries.iter().filter(|e| e["kind"] == "witness" && !e["certificate"].is_null()) {
            out.extend(certificates_in(&e["certificate"])?);
        }
        return Ok(out);
    }
    Err("no witness certificate found".into())
}

pub fn verify_certificates(v: &Value) -> Result<Vec<WitnessCheck>, String> {
    certificates_in(v)?
        .iter()
        .map(|q| verify_witness(q).map_err(|e| e.to_string()))
        .collect()
}
