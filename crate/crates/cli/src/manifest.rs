use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use duffjoint::config::LoadedConfig;
use duffjoint::export::CODE_VERSION;

/// Sidecar describing how an output file was produced.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub config: &'a LoadedConfig,
    pub parameters: &'a Value,
    pub outputs: Vec<String>,
    pub code_version: &'static str,
    pub timestamp: String,
}

/// UTC timestamp; `SOURCE_DATE_EPOCH` pins it for reproducible runs.
pub fn timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    pinned
        .unwrap_or_else(Utc::now)
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Collected outputs, written together once the computation has succeeded.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    /// Writes every file plus a `<name>.manifest.json` sidecar for each.
    pub fn write(self, command: &str, config: &LoadedConfig, parameters: &Value) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir)?;
        let names: Vec<String> = self.files.iter().map(|(n, _)| n.clone()).collect();
        let stamp = timestamp();
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let path = self.dir.join(name);
            fs::write(&path, contents)?;
            let manifest = RunManifest {
                command,
                config,
                parameters,
                outputs: names.clone(),
                code_version: CODE_VERSION,
                timestamp: stamp.clone(),
            };
            let sidecar = self.dir.join(format!("{name}.manifest.json"));
            let text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
            fs::write(&sidecar, text + "\n")?;
            written.push(path);
            written.push(sidecar);
        }
        Ok(written)
    }
}
