//! Machine-readable command reports.
//!
//! Every command that answers a question (rather than emitting a tuple
//! document) prints exactly one `Report` to stdout. Reports are
//! schema-versioned and deterministic given the inputs and the seed: the
//! only field that varies between identical runs is `timestamp_ms`.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "1";

/// Verdict confidence flags.
pub const LOW_CONFIDENCE: &str = "LOW_CONFIDENCE";
/// The input sits on a positive-codimension locus (non-generating tuple,
/// degenerate intertwiner kernel, on-quadric point).
pub const NON_GENERIC: &str = "NON_GENERIC";

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub timestamp_ms: u64,
    pub flags: Vec<String>,
    pub results: serde_json::Value,
    pub residuals: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs_digest,
            seed: None,
            timestamp_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            flags: Vec::new(),
            results: serde_json::Value::Null,
            residuals: BTreeMap::new(),
        }
    }

    pub fn flag(&mut self, name: &str) {
        if !self.flags.iter().any(|f| f == name) {
            self.flags.push(name.to_string());
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// SHA-256 over the labeled canonical inputs of a command, so reports can
/// be tied to exactly what they were computed from.
pub struct InputsDigest {
    hasher: Sha256,
}

impl InputsDigest {
    pub fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        InputsDigest { hasher }
    }

    pub fn part(mut self, label: &str, value: &str) -> Self {
        self.hasher.update([0u8]);
        self.hasher.update(label.as_bytes());
        self.hasher.update([0u8]);
        self.hasher.update(value.as_bytes());
        self
    }

    pub fn finish(self) -> String {
        let bytes = self.hasher.finalize();
        let mut out = String::with_capacity(64);
        for b in bytes {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_labels_from_values() {
        let a = InputsDigest::new("check").part("file", "xy").finish();
        let b = InputsDigest::new("check").part("filex", "y").finish();
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
        let again = InputsDigest::new("check").part("file", "xy").finish();
        assert_eq!(a, again);
    }

    #[test]
    fn flags_deduplicate() {
        let mut r = Report::new("check", "0".repeat(64));
        r.flag(NON_GENERIC);
        r.flag(NON_GENERIC);
        assert_eq!(r.flags, vec![NON_GENERIC.to_string()]);
    }
}
