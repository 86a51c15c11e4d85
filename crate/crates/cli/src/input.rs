use std::io::Read;

use choqlab::{Aggregator, Builtin, Extension};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Running SHA-256 over every input the command consumed, in order.
#[derive(Default)]
pub struct InputLog {
    hasher: Sha256,
}

impl InputLog {
    pub fn record(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

/// Reads `-` (stdin), an inline JSON literal, or a file path.
pub fn read_source(spec: &str, log: &mut InputLog) -> Result<String, CliError> {
    let text = if spec == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::parse(format!("cannot read stdin: {e}")))?;
        s
    } else if spec.trim_start().starts_with(['[', '{']) {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| CliError::parse(format!("cannot read `{spec}`: {e}")))?
    };
    log.record(spec, text.as_bytes());
    Ok(text)
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // library errors surface through serde as custom messages
        if msg.contains("dimension error") {
            CliError::dimension(format!("invalid {what}: {msg}"))
        } else {
            CliError::parse(format!("invalid {what}: {msg}"))
        }
    })
}

pub fn load_extension(spec: &str, log: &mut InputLog) -> Result<Extension, CliError> {
    let text = read_source(spec, log)?;
    parse_json(&text, "extension")
}

/// One vector `[..]` or a list of vectors `[[..], ..]`.
pub fn load_vectors(spec: &str, log: &mut InputLog) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read_source(spec, log)?;
    if let Ok(one) = serde_json::from_str::<Vec<f64>>(&text) {
        return Ok(vec![one]);
    }
    parse_json::<Vec<Vec<f64>>>(&text, "vector list")
}

pub fn load_vector(spec: &str, log: &mut InputLog) -> Result<Vec<f64>, CliError> {
    let text = read_source(spec, log)?;
    parse_json(&text, "vector")
}

/// A function to check: a compiled-in demo or an extension file.
pub enum Target {
    Builtin(Builtin),
    Extension(Extension),
}

impl Target {
    pub fn load(spec: &str, log: &mut InputLog) -> Result<Self, CliError> {
        if let Some(name) = spec.strip_prefix("builtin:") {
            let b: Builtin = name.parse().map_err(CliError::from)?;
            log.record("builtin", b.name().as_bytes());
            return Ok(Target::Builtin(b));
        }
        load_extension(spec, log).map(Target::Extension)
    }

    pub fn describe(&self) -> String {
        match self {
            Target::Builtin(b) => format!("builtin:{}", b.name()),
            Target::Extension(e) => format!("{} extension (n = {})", e.kind(), e.n()),
        }
    }
}

impl Aggregator for Target {
    fn arity(&self) -> usize {
        match self {
            Target::Builtin(b) => b.arity(),
            Target::Extension(e) => e.arity(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Target::Builtin(b) => b.value(x),
            Target::Extension(e) => e.value(x),
        }
    }
}
