//! Run manifests and report emission.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use cosbias_core::embedding_io::write_atomically;

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to reproduce a report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputFile>,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_owned(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputFile {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_owned(), value);
    }
}

/// Pretty JSON with sorted keys; `serde_json` maps are ordered by key.
pub fn canonical_json(value: &impl Serialize) -> Result<String> {
    let value = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&value)?)
}

/// Embeds `manifest` under the `manifest` key of `body` and writes the result
/// to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, body: impl Serialize, manifest: &RunManifest) -> Result<()> {
    let mut value = serde_json::to_value(body)?;
    match &mut value {
        Value::Object(map) => {
            map.insert("manifest".into(), serde_json::to_value(manifest)?);
        }
        other => {
            value = serde_json::json!({ "result": other.take(), "manifest": manifest });
        }
    }
    let text = canonical_json(&value)?;
    match out {
        Some(path) => {
            write_atomically(path, |w| writeln!(w, "{text}")).with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// Writes a CSV mirror atomically.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    write_atomically(path, |f| f.write_all(&bytes)).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
