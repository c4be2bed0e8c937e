//! JSON report assembly.

use gpdkit_core::{CheckResult, Status, ValidationReport};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SIG_DIGITS: usize = 12;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x))) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Checks plus free-form data for one run.
pub struct Report {
    verb: &'static str,
    digest: String,
    pub checks: Vec<CheckResult>,
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(verb: &'static str, input: &[u8]) -> Self {
        Report { verb, digest: sha256_hex(input), checks: Vec::new(), data: Map::new() }
    }

    /// Appends `rep` with every check name prefixed by `scope/`.
    pub fn scoped(&mut self, scope: &str, rep: ValidationReport) {
        for mut c in rep.checks {
            c.check = format!("{scope}/{}", c.check);
            self.checks.push(c);
        }
    }

    pub fn push(&mut self, scope: &str, mut c: CheckResult) {
        c.check = format!("{scope}/{}", c.check);
        self.checks.push(c);
    }

    pub fn insert(&mut self, key: &str, v: Value) {
        self.data.insert(key.to_string(), v);
    }

    /// Skipped checks do not fail a run.
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self.checks.iter().map(|c| serde_json::to_value(c).expect("plain data")).collect();
        let mut v = json!({
            "tool": "gpdkit",
            "version": env!("CARGO_PKG_VERSION"),
            "input_sha256": self.digest,
            "verb": self.verb,
            "status": if self.is_ok() { "pass" } else { "fail" },
            "checks": checks,
            "data": Value::Object(self.data.clone()),
        });
        round_floats(&mut v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234_567_890_123_456e-7), 1.234_567_890_12e-7);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn key_order_is_stable() {
        let r = Report::new("check", b"");
        let keys: Vec<String> = r.to_json().as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["tool", "version", "input_sha256", "verb", "status", "checks", "data"]);
    }
}
