//! JSON check reports shared by the analysis layer and the CLI driver.

use serde_json::{json, Value};
use std::time::Instant;

/// Outcome of one verification check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub check: String,
    pub instance: Value,
    pub verdict: bool,
    pub witness: Value,
    pub degrees_used: Value,
    pub wall_time_ms: u128,
}

impl CheckReport {
    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "instance": self.instance,
            "verdict": self.verdict,
            "witness": self.witness,
            "degrees_used": self.degrees_used,
            "wall_time_ms": self.wall_time_ms,
        })
    }
}

/// Builder that stamps wall time onto a report.
pub struct CheckTimer {
    check: String,
    instance: Value,
    start: Instant,
}

impl CheckTimer {
    pub fn start(check: impl Into<String>, instance: Value) -> Self {
        CheckTimer {
            check: check.into(),
            instance,
            start: Instant::now(),
        }
    }

    pub fn finish(self, verdict: bool, witness: Value, degrees_used: Value) -> CheckReport {
        CheckReport {
            check: self.check,
            instance: self.instance,
            verdict,
            witness,
            degrees_used,
            wall_time_ms: self.start.elapsed().as_millis(),
        }
    }
}

/// Aggregates per-check reports into a suite-level report.
pub fn suite_report(suite: &str, seed: u64, reports: &[CheckReport]) -> Value {
    json!({
        "suite": suite,
        "seed": seed,
        "passed": reports.iter().all(|r| r.verdict),
        "num_checks": reports.len(),
        "num_failures": reports.iter().filter(|r| !r.verdict).count(),
        "checks": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
    })
}
