//! Machine-readable run reports.
//!
//! A report is deterministic given identical inputs and tool version:
//! the `digest` field is a SHA-256 over everything except `timings`,
//! which is the only part allowed to differ between runs.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
struct ReportCore {
    tool: &'static str,
    version: &'static str,
    command: String,
    inputs: BTreeMap<String, String>,
    params: BTreeMap<String, Value>,
    result: Value,
    witness: Value,
}

#[derive(Serialize)]
pub struct Report {
    #[serde(flatten)]
    core: ReportCore,
    digest: String,
    timings: BTreeMap<String, Value>,
}

pub struct ReportBuilder {
    command: String,
    inputs: BTreeMap<String, String>,
    params: BTreeMap<String, Value>,
    started: std::time::Instant,
}

impl ReportBuilder {
    pub fn new(command: impl Into<String>) -> Self {
        ReportBuilder {
            command: command.into(),
            inputs: BTreeMap::new(),
            params: BTreeMap::new(),
            started: std::time::Instant::now(),
        }
    }

    /// Records an input file by content digest.
    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.inputs
            .insert(name.to_string(), format!("sha256:{:x}", hasher.finalize()));
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) {
        self.params.insert(
            name.to_string(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
    }

    pub fn finish(self, result: Value, witness: Value) -> Report {
        let core = ReportCore {
            tool: "h1wb",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            inputs: self.inputs,
            params: self.params,
            result,
            witness,
        };
        let canonical = serde_json::to_vec(&core).expect("report serializes");
        let mut hasher = Sha256::new();
        hasher.update(&canonical);
        let digest = format!("sha256:{:x}", hasher.finalize());
        let mut timings = BTreeMap::new();
        timings.insert(
            "total_ms".to_string(),
            Value::from(self.started.elapsed().as_millis() as u64),
        );
        Report {
            core,
            digest,
            timings,
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "h1wb {} — {}\n",
            self.core.version, self.core.command
        );
        out.push_str(&format!(
            "result: {}\n",
            serde_json::to_string(&self.core.result).expect("serializable")
        ));
        if !self.core.witness.is_null() {
            out.push_str(&format!(
                "witness: {}\n",
                serde_json::to_string(&self.core.witness).expect("serializable")
            ));
        }
        out.push_str(&format!("digest: {}\n", self.digest));
        out
    }
}
