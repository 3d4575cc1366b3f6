use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use graphreg::cylinder::CylinderPartition;
use graphreg::{io, DenseGraph, EditSet, VertexPartition};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Bad or missing arguments that clap cannot catch on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

impl FileDigest {
    fn of(path: &Path, data: &[u8]) -> Self {
        FileDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(data)), bytes: data.len() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub params: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_seconds: f64,
    pub version: String,
}

/// What a subcommand hands back to `main`.
pub struct Outcome {
    pub result: Value,
    /// False for a verification that ran but did not hold.
    pub passed: bool,
    /// CSV text to print instead of the JSON summary.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn ok(result: impl Serialize) -> Result<Self> {
        Ok(Outcome { result: serde_json::to_value(result)?, passed: true, csv: None })
    }

    pub fn verdict(passed: bool, result: impl Serialize) -> Result<Self> {
        Ok(Outcome { result: serde_json::to_value(result)?, passed, csv: None })
    }
}

/// Run state shared by all subcommands: the seed, the output path and a
/// digest of every file touched.
pub struct Ctx {
    pub seed: u64,
    pub out: Option<PathBuf>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    start: Instant,
}

impl Ctx {
    pub fn new(seed: u64, out: Option<PathBuf>) -> Self {
        Ctx { seed, out, inputs: Vec::new(), outputs: Vec::new(), start: Instant::now() }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(FileDigest::of(path, &data));
        String::from_utf8(data).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(FileDigest::of(path, text.as_bytes()));
        Ok(())
    }

    pub fn write_json(&mut self, path: &Path, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(path, &text)
    }

    pub fn out_path(&self) -> Result<PathBuf> {
        match &self.out {
            Some(p) => Ok(p.clone()),
            None => usage("this command needs --out"),
        }
    }

    /// `<out>.json`, the sidecar next to the main output.
    pub fn sidecar(&self) -> Result<PathBuf> {
        let mut s = self.out_path()?.into_os_string();
        s.push(".json");
        Ok(s.into())
    }

    /// Writes to `--out` when one was given.
    pub fn emit(&mut self, text: &str) -> Result<()> {
        if let Some(p) = self.out.clone() {
            self.write(&p, text)?;
        }
        Ok(())
    }

    pub fn graph(&mut self, path: &Path) -> Result<DenseGraph> {
        let text = self.read(path)?;
        io::read_graph(&text).with_context(|| format!("parsing graph {}", path.display()))
    }

    pub fn partition(&mut self, path: &Path, n: usize) -> Result<VertexPartition> {
        let text = self.read(path)?;
        io::read_partition(&text, n).with_context(|| format!("parsing partition {}", path.display()))
    }

    pub fn edits(&mut self, path: &Path) -> Result<EditSet> {
        let text = self.read(path)?;
        io::read_edits(&text).with_context(|| format!("parsing edits {}", path.display()))
    }

    pub fn cylinders(&mut self, path: &Path) -> Result<CylinderPartition> {
        let text = self.read(path)?;
        io::read_cylinders(&text).with_context(|| format!("parsing cylinders {}", path.display()))
    }

    pub fn manifest(&self, command_line: Vec<String>, threads: Option<usize>, params: Value) -> RunManifest {
        RunManifest {
            command_line,
            seed: self.seed,
            threads,
            params,
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            wall_seconds: self.start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}
