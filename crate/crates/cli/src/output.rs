//! Output files with an embedded metadata header.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// SHA-256 of the effective settings, serialized as canonical JSON.
    pub config_hash: String,
    pub seed: u64,
    pub rng_family: &'static str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Meta {
    /// `settings` must not include anything that leaves results unchanged
    /// (output paths, scheduling).
    pub fn new(command: &'static str, seed: u64, settings: Value) -> Self {
        let canonical = json!({ "command": command, "seed": seed, "settings": settings });
        Meta {
            tool: "scbnn",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash: sha256_hex(canonical.to_string().as_bytes()),
            seed,
            rng_family: scnn_core::RNG_FAMILY,
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("plain struct")
    }

    fn csv_preamble(&self) -> String {
        format!(
            "# tool: {}\n# version: {}\n# command: {}\n# config_hash: {}\n# seed: {}\n# rng_family: {}\n",
            self.tool, self.version, self.command, self.config_hash, self.seed, self.rng_family
        )
    }
}

pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| {
            Failure::Usage(format!(
                "cannot create output directory {}: {e}",
                dir.display()
            ))
        })?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        fs::write(&path, bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Writes `body` with a top-level `"meta"` key added.
    pub fn json(&self, name: &str, meta: &Meta, body: impl Serialize) -> Result<PathBuf, Failure> {
        let mut value = serde_json::to_value(body).map_err(|e| Failure::Usage(e.to_string()))?;
        match &mut value {
            Value::Object(map) => {
                map.insert("meta".into(), meta.to_value());
            }
            other => {
                value = json!({ "meta": meta.to_value(), "value": other.take() });
            }
        }
        self.raw_json(name, &value)
    }

    /// Writes an already complete JSON document.
    pub fn raw_json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf, Failure> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// `#` comment lines with the metadata, then the CSV body.
    pub fn csv(&self, name: &str, meta: &Meta, body: &[u8]) -> Result<PathBuf, Failure> {
        let mut bytes = meta.csv_preamble().into_bytes();
        bytes.extend_from_slice(body);
        self.write(name, &bytes)
    }
}
