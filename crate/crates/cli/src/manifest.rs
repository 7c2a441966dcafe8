use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::{Command, Settings};
use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to rerun a command: the command with resolved input
/// paths, all numeric settings, and the files it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: Command,
    pub settings: Settings,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn save(&self, dir: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
