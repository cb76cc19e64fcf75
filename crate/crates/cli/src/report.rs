use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Versions {
    pub cgmt: &'static str,
    pub schema: u32,
}

/// Every command emits one of these. Keys are sorted and no timing or
/// host information is recorded, so reruns are byte-identical.
#[derive(Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    pub versions: Versions,
    pub seed: Option<u64>,
}

impl ReportDocument {
    pub fn new(command: &str, inputs: Map<String, Value>, results: Value, seed: Option<u64>) -> Self {
        ReportDocument {
            command: command.to_string(),
            inputs,
            results,
            versions: Versions { cgmt: env!("CARGO_PKG_VERSION"), schema: SCHEMA_VERSION },
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// `block,ring,decimal` rows of a measure sequence.
pub fn sequence_csv(rows: &[(u32, String, String)]) -> String {
    let mut out = String::from("block,value,decimal\n");
    for (block, ring, dec) in rows {
        out.push_str(&format!("{block},{ring},{dec}\n"));
    }
    out
}
