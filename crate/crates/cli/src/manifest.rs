//! Run manifests and file persistence.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Everything needed to reproduce and judge one invocation. Wall time lives
/// in a sidecar so manifests stay byte-identical across reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// the parsed arguments or flow config
    pub config: Value,
    pub seeds: Vec<u64>,
    /// named constants chosen during the run, e.g. `c0` and `a`
    pub constants: BTreeMap<String, f64>,
    /// named assertions of the invoked suite
    pub checks: BTreeMap<String, bool>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<String>,
    /// files written next to the manifest
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seeds: Vec::new(),
            constants: BTreeMap::new(),
            checks: BTreeMap::new(),
            passed: true,
            abort: None,
            outputs: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
        self.passed &= ok;
    }

    pub fn file_name(&self) -> String {
        format!("{}.manifest.json", self.command)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub command: String,
    pub wall_seconds: f64,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Writes `contents` to `dir/name`, creating `dir` first.
pub fn persist(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Reads every `*.manifest.json` in `dir`, sorted by file name.
pub fn load_manifests(dir: &Path) -> io::Result<Vec<(String, RunManifest)>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".manifest.json"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let text = fs::read_to_string(dir.join(&n))?;
            let m = serde_json::from_str(&text)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{n}: {e}")))?;
            Ok((n, m))
        })
        .collect()
}
