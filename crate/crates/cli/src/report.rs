//! Structured reports. Everything that depends on the run environment
//! (timing) goes to a sidecar so the report itself is reproducible.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// How a value is judged against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ tolerance`
    AtMost,
    /// `value > tolerance`
    Above,
    /// `value < tolerance`
    Below,
    /// Reported without a pass/fail claim.
    Diagnostic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    /// The identity or inequality the entry checks.
    pub anchor: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub comparison: Comparison,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub detail: serde_json::Value,
}

impl Entry {
    fn judged(name: impl Into<String>, anchor: &str, value: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::AtMost => value <= tolerance,
            Comparison::Above => value > tolerance,
            Comparison::Below => value < tolerance,
            Comparison::Diagnostic => unreachable!(),
        };
        Entry {
            name: name.into(),
            anchor: anchor.into(),
            value,
            tolerance: Some(tolerance),
            comparison,
            pass: Some(pass && value.is_finite()),
            detail: serde_json::Value::Null,
        }
    }

    pub fn at_most(name: impl Into<String>, anchor: &str, value: f64, tolerance: f64) -> Self {
        Self::judged(name, anchor, value, tolerance, Comparison::AtMost)
    }

    pub fn above(name: impl Into<String>, anchor: &str, value: f64, bound: f64) -> Self {
        Self::judged(name, anchor, value, bound, Comparison::Above)
    }

    pub fn below(name: impl Into<String>, anchor: &str, value: f64, bound: f64) -> Self {
        Self::judged(name, anchor, value, bound, Comparison::Below)
    }

    pub fn diagnostic(name: impl Into<String>, anchor: &str, value: f64) -> Self {
        Entry {
            name: name.into(),
            anchor: anchor.into(),
            value,
            tolerance: None,
            comparison: Comparison::Diagnostic,
            pass: None,
            detail: serde_json::Value::Null,
        }
    }

    /// A computation that failed outright.
    pub fn failed(name: impl Into<String>, anchor: &str, error: &dyn std::fmt::Display) -> Self {
        Entry {
            name: name.into(),
            anchor: anchor.into(),
            value: f64::NAN,
            tolerance: None,
            comparison: Comparison::Diagnostic,
            pass: Some(false),
            detail: serde_json::json!({ "error": error.to_string() }),
        }
    }

    pub fn with_detail(mut self, detail: impl Serialize) -> Self {
        self.detail = serde_json::to_value(detail).unwrap_or(serde_json::Value::Null);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub entries: Vec<Entry>,
    pub out_of_scope: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &'static str, config: serde_json::Value, entries: Vec<Entry>, out_of_scope: Vec<String>) -> Self {
        let pass = entries.iter().all(|e| e.pass != Some(false));
        Report { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), command, config, entries, out_of_scope, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.pass == Some(false))
    }

    /// Pretty JSON with a trailing newline. Non-finite values become `null`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub report_sha256: String,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

impl Sidecar {
    pub fn new(report_json: &str, wall_clock_seconds: f64, threads: usize) -> Self {
        let digest = Sha256::digest(report_json.as_bytes());
        let report_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Sidecar { report_sha256, wall_clock_seconds, threads }
    }
}
