//! Run reports and their on-disk form.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Command, RunConfig};

pub const SCHEMA: &str = "sd-twistor-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when `value ≤ tolerance`.
    Upper,
    /// Passes when `value ≥ tolerance`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn upper(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Upper,
            pass: value <= tolerance,
        }
    }

    pub fn lower(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Lower,
            pass: value >= tolerance,
        }
    }
}

/// A CSV or JSON file produced by a run, held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
    pub timing: Timing,
}

/// Everything except timing; hashed for the determinism fingerprint.
#[derive(Serialize)]
struct Body<'a> {
    schema: &'a str,
    command: Command,
    seed: u64,
    config: &'a RunConfig,
    pass: bool,
    checks: &'a [Check],
    artifacts: Vec<&'a str>,
}

#[derive(Serialize)]
struct Document<'a> {
    #[serde(flatten)]
    body: Body<'a>,
    sha256: String,
    timing: &'a Timing,
}

impl RunReport {
    pub fn new(config: RunConfig) -> Self {
        Self {
            command: config.command,
            config,
            checks: Vec::new(),
            artifacts: Vec::new(),
            timing: Timing::default(),
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn artifact_names(&self) -> Vec<&str> {
        let mut names = vec!["report.json"];
        names.extend(self.artifacts.iter().map(|a| a.name.as_str()));
        names
    }

    fn body(&self) -> Body<'_> {
        Body {
            schema: SCHEMA,
            command: self.command,
            seed: self.config.seed,
            config: &self.config,
            pass: self.pass(),
            checks: &self.checks,
            artifacts: self.artifact_names(),
        }
    }

    /// SHA-256 of the report without its timing section, plus the bytes of
    /// every artifact.
    pub fn fingerprint(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(&self.body())?);
        for a in &self.artifacts {
            hasher.update(a.name.as_bytes());
            hasher.update(&a.contents);
        }
        Ok(hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = Document {
            body: self.body(),
            sha256: self.fingerprint()?,
            timing: &self.timing,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Writes `report.json` and every artifact into `dir`, returning the paths.
pub fn write_report(r: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    fs::write(&path, r.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    for a in &r.artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.contents).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
