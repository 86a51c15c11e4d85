use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything but the timing, which is excluded from the digest.
#[derive(Serialize)]
struct Body<'a> {
    schema_version: u32,
    command: &'a [String],
    inputs_digest: &'a str,
    seed: Option<u64>,
    results: &'a Value,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub seed: Option<u64>,
    pub results: Value,
    pub elapsed_ms: u64,
    pub digest: String,
}

impl RunReport {
    pub fn new(
        command: Vec<String>,
        inputs_digest: String,
        seed: Option<u64>,
        results: Value,
        elapsed_ms: u64,
    ) -> Self {
        let body = Body {
            schema_version: SCHEMA_VERSION,
            command: &command,
            inputs_digest: &inputs_digest,
            seed,
            results: &results,
        };
        let bytes = serde_json::to_vec(&body).expect("report body serializes");
        let digest = hex::encode(Sha256::digest(&bytes));
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            inputs_digest,
            seed,
            results,
            elapsed_ms,
            digest,
        }
    }
}
