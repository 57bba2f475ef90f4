//! Run metadata, input digests and output writing.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

/// Embedded in every JSON output and written next to every CSV output.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub n_perm: Option<usize>,
    pub max_words: Option<usize>,
    pub options: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    /// sha256 over everything above.
    pub config_digest: String,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub struct MetaBuilder {
    command: &'static str,
    seed: u64,
    n_perm: Option<usize>,
    max_words: Option<usize>,
    options: serde_json::Map<String, serde_json::Value>,
    inputs: Vec<InputDigest>,
}

impl MetaBuilder {
    pub fn new(command: &'static str, seed: u64, max_words: Option<usize>) -> Self {
        MetaBuilder {
            command,
            seed,
            n_perm: None,
            max_words,
            options: serde_json::Map::new(),
            inputs: Vec::new(),
        }
    }

    pub fn n_perm(&mut self, n: usize) -> &mut Self {
        self.n_perm = Some(n);
        self
    }

    pub fn option(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.options.insert(key.to_string(), v);
        self
    }

    pub fn input(&mut self, role: &'static str, path: &Path) -> Result<&mut Self, CliError> {
        self.inputs.push(InputDigest {
            role,
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(self)
    }

    pub fn build(&self) -> RunMeta {
        let mut meta = RunMeta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            seed: self.seed,
            n_perm: self.n_perm,
            max_words: self.max_words,
            options: serde_json::Value::Object(self.options.clone()),
            inputs: self.inputs.clone(),
            config_digest: String::new(),
        };
        let canonical = serde_json::to_vec(&meta).expect("metadata serializes");
        meta.config_digest = hex::encode(Sha256::digest(&canonical));
        meta
    }
}

/// `{"meta": ..., <body fields>}` as pretty JSON with a trailing newline.
pub fn json_document<T: Serialize>(meta: &RunMeta, body: &T) -> Result<String, CliError> {
    let mut doc = serde_json::Map::new();
    doc.insert("meta".into(), serde_json::to_value(meta)?);
    match serde_json::to_value(body)? {
        serde_json::Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))?;
    text.push('\n');
    Ok(text)
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// `<path>.meta.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes a CSV body to `out` (or stdout) and, for files, the metadata
/// sidecar.
pub fn emit_csv(out: Option<&Path>, meta: &RunMeta, csv: &str) -> Result<(), CliError> {
    emit(out, csv)?;
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(meta)?;
        text.push('\n');
        write_file(&sidecar_path(path), text.as_bytes())?;
    }
    Ok(())
}
