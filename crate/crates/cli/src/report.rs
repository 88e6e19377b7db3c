//! Output documents and error mapping.

use std::fmt;

use muwork_core::halt::{Analysis, Verdict};
use serde_json::{Map, Value};

pub const SCHEMA: &str = "1";

/// One verb's result, in both renderings.
pub struct Report {
    /// Fields after `schema` and `verb`, in output order.
    pub json: Map<String, Value>,
    pub text: String,
    /// The verb ran but found a problem (exit 2).
    pub failed: bool,
}

impl Report {
    pub fn new(json: Map<String, Value>, text: String) -> Self {
        Report { json, text, failed: false }
    }

    pub fn to_json(&self, verb: &str) -> String {
        let mut doc = header(verb);
        doc.extend(self.json.clone());
        serde_json::to_string_pretty(&Value::Object(doc)).expect("values serialize")
    }
}

fn header(verb: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("verb".into(), verb.into());
    m
}

#[derive(Debug)]
pub enum CliError {
    /// Bad command-line values (exit 1).
    Usage(String),
    /// Unreadable or malformed input files, failed analyses (exit 2).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failed(_) => 2,
        }
    }

    pub fn to_json(&self, verb: &str) -> String {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Failed(m) => ("analysis", m),
        };
        let mut doc = header(verb);
        doc.insert("error".into(), serde_json::json!({ "kind": kind, "message": msg }));
        serde_json::to_string_pretty(&Value::Object(doc)).expect("values serialize")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

pub fn usage(m: impl fmt::Display) -> CliError {
    CliError::Usage(m.to_string())
}

pub fn failed(m: impl fmt::Display) -> CliError {
    CliError::Failed(m.to_string())
}

/// Builds a JSON object from `(key, value)` pairs, keeping their order.
pub fn obj<const N: usize>(pairs: [(&str, Value); N]) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

/// Fields of an analysis, verdict first.
pub fn analysis_fields(a: &Analysis) -> Map<String, Value> {
    match to_value(a) {
        Value::Object(m) => m,
        _ => unreachable!("analyses serialize to objects"),
    }
}

/// One-line verdict, then its degree.
pub fn analysis_text(a: &Analysis) -> String {
    let v = match &a.verdict {
        Verdict::Halts { value, steps } => format!("Halts({value}) after {steps} steps"),
        Verdict::DivergesPeriodic { start, period } => format!("DivergesPeriodic(start {start}, period {period})"),
        Verdict::DivergesProven { reason } => format!("DivergesProven: {}", to_value(reason)),
        Verdict::NonRecursiveDefinition { explanation } => format!("NonRecursiveDefinition: {explanation}"),
        Verdict::Unknown { fuel_spent, snapshots_checked, note, advisory } => {
            let mut s = format!("Unknown (fuel spent {fuel_spent}, snapshots checked {snapshots_checked})");
            if let Some(n) = note {
                s += &format!("\nnote: {n}");
            }
            if let Some(adv) = advisory {
                s += &format!("\nadvisory: {adv}");
            }
            s
        }
    };
    let d = a.degree.map_or("none".to_string(), |d| d.to_string());
    format!("{v}\ndegree: {d}\n")
}
