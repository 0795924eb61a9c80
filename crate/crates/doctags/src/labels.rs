//! Mapping between block kinds, detector labels and evaluation classes.

use std::collections::BTreeMap;

use doctags_core::{BlockKind, Diagnostic};
use serde::Deserialize;

use crate::codes;

const BUILTIN: &str = include_str!("../data/layout_labels.json");

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelMap {
    /// Evaluation classes, in report order.
    pub classes: Vec<String>,
    /// DocTags block kind name to class.
    pub block_kinds: BTreeMap<String, String>,
    /// Other spellings of class names found in detector output.
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
}

impl LabelMap {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled label map is valid")
    }

    pub fn from_json(s: &str) -> Result<Self, Diagnostic> {
        let map: LabelMap = serde_json::from_str(s).map_err(|e| Diagnostic::error(codes::LABELS_INVALID, e.to_string()))?;
        for kind in map.block_kinds.keys() {
            if BlockKind::from_name(kind).is_none() {
                return Err(Diagnostic::error(
                    codes::LABELS_INVALID,
                    format!("`{kind}` is not a block kind"),
                ));
            }
        }
        for class in map.block_kinds.values().chain(map.aliases.values()) {
            if !map.classes.contains(class) {
                return Err(Diagnostic::error(
                    codes::LABELS_INVALID,
                    format!("`{class}` is not one of the classes"),
                ));
            }
        }
        Ok(map)
    }

    pub fn class_of_kind(&self, kind: BlockKind) -> Option<&str> {
        self.block_kinds.get(kind.name()).map(String::as_str)
    }

    /// Canonical class name for a detector label; unknown labels pass
    /// through unchanged.
    pub fn canonical<'a>(&'a self, label: &'a str) -> &'a str {
        self.aliases.get(label).map_or(label, String::as_str)
    }

    pub fn class_names(&self) -> Vec<&str> {
        self.classes.iter().map(String::as_str).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_six_classes() {
        let map = LabelMap::builtin();
        assert_eq!(map.classes.len(), 6);
        assert_eq!(map.class_of_kind(BlockKind::Otsl), Some("Table"));
        assert_eq!(map.class_of_kind(BlockKind::PageFooter), None);
        assert_eq!(map.canonical("List-item"), "List Item");
        assert_eq!(map.canonical("Chart"), "Chart");
    }

    #[test]
    fn rejects_dangling_classes() {
        let bad = r#"{"classes": ["A"], "block_kinds": {"text": "B"}}"#;
        assert_eq!(LabelMap::from_json(bad).unwrap_err().code, codes::LABELS_INVALID);
        let bad = r#"{"classes": ["A"], "block_kinds": {"paragraph": "A"}}"#;
        assert!(LabelMap::from_json(bad).is_err());
    }
}
