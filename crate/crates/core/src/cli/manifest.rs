//! JSONL work manifests, one entry per line.
//!
//! ```text
//! {"kind":"image","id":"img-0","native_w":1000,"native_h":750}
//! {"kind":"video","id":"clip-3","duration":200.0,"task_kind":"general","aspect":1.7778}
//! ```
//!
//! Images may carry pixel-space `boxes` (`[x1, y1, x2, y2]`) and `points`
//! (`[x, y]`) that are normalized into grounding tokens. Any entry may pin
//! the device that loads it with `origin_rank`. Blank lines are skipped.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::videoplan::TaskKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ManifestEntry {
    Image {
        id: String,
        native_w: u32,
        native_h: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin_rank: Option<usize>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        boxes: Vec<[f64; 4]>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        points: Vec<[f64; 2]>,
    },
    Video {
        id: String,
        duration: f64,
        #[serde(default = "default_task")]
        task_kind: TaskKind,
        #[serde(default = "default_aspect")]
        aspect: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin_rank: Option<usize>,
    },
}

fn default_task() -> TaskKind {
    TaskKind::General
}

fn default_aspect() -> f64 {
    16.0 / 9.0
}

impl ManifestEntry {
    pub fn id(&self) -> &str {
        match self {
            ManifestEntry::Image { id, .. } | ManifestEntry::Video { id, .. } => id,
        }
    }
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, CliError> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(line)
            .map_err(|e| CliError::Data(format!("manifest line {lineno}: {e}")))?;
        if !seen.insert(entry.id().to_owned()) {
            return Err(CliError::Data(format!(
                "manifest line {lineno}: duplicate id `{}`",
                entry.id()
            )));
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read manifest {}: {e}", path.display())))?;
    parse_manifest(&text)
}
