//! Run directories: atomic writes, content digests and the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG: &str = "config.toml";

/// Writes through a sibling temporary file and a rename, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskFailure {
    pub task: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CommandRecord {
    pub started_unix: u64,
    pub finished_unix: u64,
    pub computed_tasks: usize,
    pub reused_tasks: usize,
    pub failures: Vec<TaskFailure>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit_version: String,
    pub master_seed: u64,
    pub seed_rule: String,
    pub config_sha256: String,
    pub notes: Vec<String>,
    pub commands: BTreeMap<String, CommandRecord>,
    /// Every file in the run directory except this manifest, by relative path.
    pub outputs: Vec<OutputEntry>,
}

pub const SEED_RULE: &str = "task seed = derive_seed(master_seed, key): splitmix64 over the master seed, \
then acc = splitmix64(acc ^ splitmix64(k)) for each key element; sweep keys are [gs_index, h_index], \
the RA-only key is [2^63] and the forward key is [2^63 + 1]; sampled reads of initial state i within a \
task use derive_seed(task_seed, [i])";

pub const NOTES: [&str; 2] = [
    "no auto-scaling is applied to the problem or h-gain coefficients",
    "closed-system dynamics: no thermal or readout noise model",
];

#[derive(Debug, Clone)]
pub struct RunDir {
    pub root: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).is_file()
    }

    pub fn read(&self, rel: &str) -> Result<String> {
        let p = self.path(rel);
        fs::read_to_string(&p).map_err(|e| CliError::file(&p, e))
    }

    pub fn write(&self, rel: &str, contents: &str) -> Result<()> {
        write_atomic(&self.path(rel), contents.as_bytes())
    }

    pub fn require(&self, rel: &str, command: &'static str) -> Result<String> {
        if !self.exists(rel) {
            return Err(CliError::Missing {
                command,
                message: format!("{} not found", self.path(rel).display()),
            });
        }
        self.read(rel)
    }

    fn scan(&self) -> Result<Vec<OutputEntry>> {
        let mut out = Vec::new();
        let mut stack = vec![self.root.clone()];
        while let Some(dir) = stack.pop() {
            for entry in fs::read_dir(&dir)? {
                let path = entry?.path();
                if path.is_dir() {
                    stack.push(path);
                    continue;
                }
                let rel = path
                    .strip_prefix(&self.root)
                    .expect("scan stays under root")
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect::<Vec<_>>()
                    .join("/");
                if rel == MANIFEST || rel.ends_with(".partial") {
                    continue;
                }
                out.push(OutputEntry {
                    sha256: sha256_hex(&fs::read(&path)?),
                    path: rel,
                });
            }
        }
        out.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(out)
    }

    pub fn manifest(&self) -> Result<Option<Manifest>> {
        if !self.exists(MANIFEST) {
            return Ok(None);
        }
        let text = self.read(MANIFEST)?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::file(&self.path(MANIFEST), e))
    }

    /// Records `command` and re-digests every output.
    pub fn update_manifest(&self, command: &str, record: CommandRecord, master_seed: u64) -> Result<Manifest> {
        let config_sha256 = sha256_hex(self.read(CONFIG)?.as_bytes());
        let mut commands = self.manifest()?.map(|m| m.commands).unwrap_or_default();
        commands.insert(command.to_string(), record);
        let manifest = Manifest {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            seed_rule: SEED_RULE.to_string(),
            config_sha256,
            notes: NOTES.iter().map(|s| s.to_string()).collect(),
            commands,
            outputs: self.scan()?,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        self.write(MANIFEST, &text)?;
        Ok(manifest)
    }
}
