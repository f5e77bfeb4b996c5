use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::Result;
use crate::io::config::ScenarioConfig;

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Written last; its absence signals an aborted run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub format_version: u32,
    /// The resolved configuration the run actually used.
    pub config: ScenarioConfig,
    pub artifacts: Vec<ArtifactEntry>,
    pub wall_clock_seconds: f64,
    pub invariants: Vec<InvariantResult>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactEntry {
    /// Path relative to the manifest.
    pub path: String,
    pub rows: u64,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl RunManifest {
    pub fn all_passed(&self) -> bool {
        self.invariants.iter().all(|i| i.passed)
    }

    pub fn first_failure(&self) -> Option<&InvariantResult> {
        self.invariants.iter().find(|i| !i.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
