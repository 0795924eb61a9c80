//! Diagnostic codes raised by this crate, in addition to
//! [`doctags_core::diagnostic::codes`].

pub const SCHEMA_VERSION_UNSUPPORTED: &str = "schema-version-unsupported";
pub const JSON_INVALID: &str = "json-invalid";
pub const IO_ERROR: &str = "io-error";
pub const MANIFEST_INVALID: &str = "manifest-invalid";
pub const ID_MISMATCH: &str = "id-mismatch";
pub const ENTRY_UNREADABLE: &str = "entry-unreadable";
pub const FORMAT_UNSUPPORTED: &str = "format-unsupported";
pub const POLICY_INVALID: &str = "policy-invalid";
pub const LABELS_INVALID: &str = "labels-invalid";
