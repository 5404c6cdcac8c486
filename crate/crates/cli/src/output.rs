use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Process outcome mapped to the documented exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Malformed input, unsupported sizes or an exceeded cap. Exit code 2.
    Validation(String),
    /// A requested check ran and failed. Exit code 3.
    Verification(String),
    /// Reading or writing files failed. Exit code 1.
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Verification(m) | Failure::Io(m) => m,
        }
    }
}

pub fn invalid(e: impl ToString) -> Failure {
    Failure::Validation(e.to_string())
}

/// Provenance block embedded in every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Meta {
    /// Hashes the canonical JSON of `config`; object keys are sorted.
    pub fn new(command: &str, seed: u64, config: &impl Serialize) -> Self {
        let canonical = serde_json::to_string(&json!({ "command": command, "config": config }))
            .expect("configuration serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        Meta {
            tool: "ferriq",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_hash: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }

    pub fn csv_header(&self) -> String {
        format!(
            "# {} {} command={} seed={} config_hash={}\n",
            self.tool, self.version, self.command, self.seed, self.config_hash
        )
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("meta serializes")
    }
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// Writes to `path` through a temporary file in the same directory, or to
/// stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
