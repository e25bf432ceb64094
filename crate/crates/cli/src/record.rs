//! JSON-lines result records.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub config_hash: String,
    pub timestamp: String,
    pub payload: Value,
}

pub fn hash_json(value: &Value) -> String {
    let bytes = serde_json::to_vec(value).expect("json values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn contains_hash(path: &Path, hash: &str) -> anyhow::Result<bool> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(false),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Value =
            serde_json::from_str(&line).with_context(|| format!("malformed record in {}", path.display()))?;
        if parsed.get("config_hash").and_then(Value::as_str) == Some(hash) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Appends `record` unless one with the same hash exists. Returns whether
/// a line was written.
pub fn append(path: &Path, record: &OutputRecord) -> anyhow::Result<bool> {
    if contains_hash(path, &record.config_hash)? {
        return Ok(false);
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    writeln!(file, "{}", serde_json::to_string(record)?)?;
    Ok(true)
}
