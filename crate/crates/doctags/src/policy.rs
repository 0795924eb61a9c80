//! LaTeX normalization policy files.

use doctags_core::latex::NormPolicy;
use doctags_core::Diagnostic;
use sha2::{Digest, Sha256};

use crate::codes;

const BUILTIN: &str = include_str!("../data/latex_policy.json");

/// A policy together with the SHA-256 of the file it was read from, so
/// reports can name the exact rules used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedPolicy {
    pub policy: NormPolicy,
    pub sha256: String,
}

impl LoadedPolicy {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled policy is valid")
    }

    pub fn from_json(s: &str) -> Result<Self, Diagnostic> {
        let policy: NormPolicy =
            serde_json::from_str(s).map_err(|e| Diagnostic::error(codes::POLICY_INVALID, e.to_string()))?;
        if let Some(problem) = policy.validate().into_iter().next() {
            return Err(problem);
        }
        let digest = Sha256::digest(s.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(LoadedPolicy { policy, sha256 })
    }
}
