//! Report envelope, failure records and deterministic JSON output.

use serde::Serialize;
use serde_json::{json, Value};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Significant digits kept for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub module: &'static str,
    pub operation: &'static str,
    pub input: Value,
    pub observed: Value,
    pub tolerance: Value,
}

impl FailureRecord {
    pub fn new(
        module: &'static str,
        operation: &'static str,
        input: impl Serialize,
        observed: impl Serialize,
        tolerance: impl Serialize,
    ) -> Self {
        Self {
            module,
            operation,
            input: to_value(input),
            observed: to_value(observed),
            tolerance: to_value(tolerance),
        }
    }

    /// Record for an operation that returned an error instead of a value.
    pub fn error(module: &'static str, operation: &'static str, input: impl Serialize, err: impl std::fmt::Display) -> Self {
        Self::new(module, operation, input, json!({ "error": err.to_string() }), Value::Null)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| json!({ "unserializable": e.to_string() }))
}

/// Collects checks while a command runs.
#[derive(Debug, Default)]
pub struct Checks {
    pub failures: Vec<FailureRecord>,
}

impl Checks {
    /// Records a failure unless `observed ≤ tolerance`.
    pub fn at_most(&mut self, module: &'static str, operation: &'static str, input: impl Serialize, observed: f64, tolerance: f64) {
        if !(observed <= tolerance) {
            self.failures
                .push(FailureRecord::new(module, operation, input, observed, tolerance));
        }
    }

    /// Records a failure unless `observed ∈ [lo, hi]`.
    pub fn within(&mut self, module: &'static str, operation: &'static str, input: impl Serialize, observed: f64, lo: f64, hi: f64) {
        if !(lo..=hi).contains(&observed) {
            self.failures
                .push(FailureRecord::new(module, operation, input, observed, [lo, hi]));
        }
    }

    pub fn push(&mut self, record: FailureRecord) {
        self.failures.push(record);
    }
}

/// What a command hands back to the dispatcher.
#[derive(Debug)]
pub struct Outcome {
    pub parameters: Value,
    pub result: Value,
    pub failures: Vec<FailureRecord>,
    /// Extra files for `--output`, as `(name, contents)`.
    pub artifacts: Vec<(String, String)>,
}

pub fn envelope(command: &str, seed: u64, outcome: &Outcome) -> Value {
    let status = if outcome.failures.is_empty() { "pass" } else { "fail" };
    fixed_precision(json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "parameters": outcome.parameters,
        "result": outcome.result,
        "failures": outcome.failures,
        "status": status,
    }))
}

/// Rounds every float to [`SIGNIFICANT_DIGITS`] so output is stable across
/// platforms whose last bits differ.
pub fn fixed_precision(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
            let r: f64 = s.parse().expect("formatted float parses");
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(fixed_precision).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, fixed_precision(v))).collect()),
        other => other,
    }
}
