//! Append-only JSONL result records.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kwise_core::SetFamily;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Families on more than this many points go to a sidecar file.
pub const INLINE_MAX_N: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub schema_version: u32,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub result: Value,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl LedgerRecord {
    /// Records with equal keys must carry equal results.
    pub fn key(&self) -> (String, String, u64) {
        let params = serde_json::to_string(&self.params).expect("params serialize");
        (self.command.clone(), params, self.seed)
    }
}

pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Where records and sidecars go.
#[derive(Clone, Debug)]
pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    fn sidecar_dir(&self) -> PathBuf {
        match self.out.as_deref().and_then(Path::parent) {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        }
    }

    /// Inline hex for small families, otherwise a content-addressed file.
    pub fn family_value(&self, f: &SetFamily) -> Result<Value> {
        let hex = f.to_hex();
        if f.n() <= INLINE_MAX_N {
            return Ok(Value::String(hex));
        }
        let digest = sha256_hex(hex.as_bytes());
        let name = format!("family-{digest}.hex");
        let path = self.sidecar_dir().join(&name);
        if !path.exists() {
            fs::write(&path, &hex).with_context(|| format!("writing sidecar {}", path.display()))?;
        }
        Ok(json!({ "sidecar": name, "sha256": digest, "n": f.n() }))
    }

    pub fn append(&self, record: &LedgerRecord, stdout: &mut dyn Write) -> Result<()> {
        let line = serde_json::to_string(record)?;
        match &self.out {
            Some(path) => {
                let mut file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .with_context(|| format!("opening ledger {}", path.display()))?;
                writeln!(file, "{line}")?;
            }
            None => writeln!(stdout, "{line}")?,
        }
        Ok(())
    }
}
