//! JSONL batch manifests.
//!
//! Each line describes one item:
//!
//! ```json
//! {"id": "page-1", "path": "page-1.dt", "page_width": 612, "page_height": 792}
//! {"id": "page-2", "content": "<doctag>...</doctag>", "format": "doctags"}
//! {"id": "page-3", "detections": [{"label": "Text", "bbox": [10, 10, 90, 20], "score": 0.9}],
//!  "page_width": 100, "page_height": 100}
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use doctags_core::Diagnostic;
use serde::Deserialize;

use crate::codes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Doctags,
    Json,
    Markdown,
    Text,
    Html,
    Latex,
}

impl Format {
    fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "dt" | "doctags" | "xml" => Some(Format::Doctags),
            "json" => Some(Format::Json),
            "md" | "markdown" => Some(Format::Markdown),
            "txt" => Some(Format::Text),
            "html" | "htm" => Some(Format::Html),
            "tex" | "latex" => Some(Format::Latex),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionRecord {
    pub label: String,
    /// Pixel box `[x1, y1, x2, y2]`.
    pub bbox: [f64; 4],
    #[serde(default)]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub id: String,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub content: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub page_width: Option<f64>,
    #[serde(default)]
    pub page_height: Option<f64>,
    #[serde(default)]
    pub detections: Option<Vec<DetectionRecord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub base: PathBuf,
    pub entries: Vec<Entry>,
}

impl Entry {
    /// Declared format, else guessed from the path, else DocTags.
    pub fn format(&self) -> Format {
        self.format
            .or_else(|| self.path.as_deref().and_then(Format::from_extension))
            .unwrap_or(Format::Doctags)
    }

    pub fn payload(&self, base: &Path) -> Result<String, Diagnostic> {
        match (&self.content, &self.path) {
            (Some(content), _) => Ok(content.clone()),
            (None, Some(path)) => {
                let full = base.join(path);
                fs::read_to_string(&full).map_err(|e| {
                    Diagnostic::error(codes::ENTRY_UNREADABLE, format!("{}: {e}", full.display()))
                })
            }
            (None, None) => Err(Diagnostic::error(
                codes::ENTRY_UNREADABLE,
                format!("entry `{}` has neither `path` nor `content`", self.id),
            )),
        }
    }
}

impl Manifest {
    pub fn parse(text: &str, base: impl Into<PathBuf>) -> Result<Self, Diagnostic> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: Entry = serde_json::from_str(line)
                .map_err(|e| Diagnostic::error(codes::MANIFEST_INVALID, format!("line {}: {e}", n + 1)))?;
            entries.push(entry);
        }
        Ok(Manifest {
            base: base.into(),
            entries,
        })
    }

    pub fn read(path: &Path) -> Result<Self, Diagnostic> {
        let text = fs::read_to_string(path)
            .map_err(|e| Diagnostic::error(codes::IO_ERROR, format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }
}
