use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diagnostic::{codes, Diagnostic};

/// Which simplification passes run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CollapseRules {
    /// `^{\prime\prime}` becomes `''`.
    pub primes: bool,
    /// Three or more `.` become `\ldots`; repeated dot commands become one.
    pub dots: bool,
    /// A run of spacing commands keeps only its first command.
    pub spacing: bool,
    /// `\big(`/`\Big)` and relatives become `\left(`/`\right)`.
    pub sized_delimiters: bool,
    /// Arguments of `^`, `_` and commands in `arity` are always braced.
    pub brace_arguments: bool,
}

impl Default for CollapseRules {
    fn default() -> Self {
        CollapseRules {
            primes: true,
            dots: true,
            spacing: true,
            sized_delimiters: true,
            brace_arguments: true,
        }
    }
}

/// Rewriting rules for [`normalize`](super::normalize).
///
/// Command names include the leading backslash.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct NormPolicy {
    pub remove: BTreeSet<String>,
    /// Removed together with their following argument.
    pub remove_with_argument: BTreeSet<String>,
    pub replace: BTreeMap<String, String>,
    /// Infix operators rewritten as prefix commands: `a \over b` becomes
    /// `\frac{a}{b}`.
    pub infix: BTreeMap<String, String>,
    /// Number of mandatory arguments of commands whose arguments are braced.
    pub arity: BTreeMap<String, usize>,
    /// Commands that take an optional `[...]` argument before the mandatory
    /// ones.
    pub optional_argument: BTreeSet<String>,
    pub spacing_commands: BTreeSet<String>,
    pub dot_commands: BTreeSet<String>,
    pub collapse: CollapseRules,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| String::from(*s)).collect()
}

impl Default for NormPolicy {
    fn default() -> Self {
        let mut arity = BTreeMap::new();
        for cmd in ["\\frac", "\\binom"] {
            arity.insert(cmd.into(), 2);
        }
        for cmd in [
            "\\sqrt", "\\mathrm", "\\mathbf", "\\mathit", "\\mathcal", "\\mathbb", "\\mathsf", "\\mathtt",
            "\\mathfrak", "\\boldsymbol", "\\text", "\\textbf", "\\textit", "\\textrm", "\\operatorname",
            "\\hat", "\\bar", "\\vec", "\\tilde", "\\dot", "\\ddot", "\\widehat", "\\widetilde",
            "\\overline", "\\underline", "\\overrightarrow", "\\overleftarrow", "\\overbrace", "\\underbrace",
        ] {
            arity.insert(cmd.into(), 1);
        }
        NormPolicy {
            remove: set(&["\\displaystyle", "\\nonumber"]),
            remove_with_argument: set(&["\\label"]),
            replace: [("\\dfrac", "\\frac"), ("\\tfrac", "\\frac")]
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
            infix: [("\\over".into(), "\\frac".into())].into_iter().collect(),
            arity,
            optional_argument: set(&["\\sqrt"]),
            spacing_commands: set(&[
                "\\,", "\\;", "\\:", "\\!", "\\ ", "\\quad", "\\qquad", "\\enspace", "\\thinspace",
                "\\medspace", "\\thickspace",
            ]),
            dot_commands: set(&["\\ldots", "\\cdots", "\\dots", "\\vdots", "\\ddots", "\\dotsc", "\\dotsb"]),
            collapse: CollapseRules::default(),
        }
    }
}

impl NormPolicy {
    /// Checks that no command both disappears and is produced, and that
    /// replacement chains end.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        for start in self.replace.keys() {
            let mut seen = BTreeSet::new();
            let mut current = start;
            while let Some(next) = self.replace.get(current) {
                if !seen.insert(current) {
                    diagnostics.push(Diagnostic::error(
                        codes::POLICY_CYCLE,
                        format!("replacement chain starting at `{start}` never ends"),
                    ));
                    break;
                }
                current = next;
            }
        }
        let gone: BTreeSet<&String> = self
            .remove
            .iter()
            .chain(&self.remove_with_argument)
            .chain(self.infix.keys())
            .collect();
        for target in self.replace.values().chain(self.infix.values()) {
            if gone.contains(target) {
                diagnostics.push(Diagnostic::error(
                    codes::POLICY_CONFLICT,
                    format!("`{target}` is produced by a rewrite but also removed"),
                ));
            }
        }
        for key in self.replace.keys() {
            if gone.contains(key) {
                diagnostics.push(Diagnostic::error(
                    codes::POLICY_CONFLICT,
                    format!("`{key}` is both replaced and removed"),
                ));
            }
        }
        diagnostics
    }

    /// Follows the replacement chain for `name`; the policy must be valid.
    pub(crate) fn resolve<'a>(&'a self, mut name: &'a str) -> &'a str {
        let mut steps = 0;
        while let Some(next) = self.replace.get(name) {
            name = next;
            steps += 1;
            if steps > self.replace.len() {
                break;
            }
        }
        name
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_policy_is_valid() {
        assert!(NormPolicy::default().validate().is_empty());
    }

    #[test]
    fn cycles_and_conflicts() {
        let mut policy = NormPolicy::default();
        policy.replace.insert("\\a".into(), "\\b".into());
        policy.replace.insert("\\b".into(), "\\a".into());
        assert!(policy.validate().iter().any(|d| d.code == codes::POLICY_CYCLE));

        let mut policy = NormPolicy::default();
        policy.replace.insert("\\x".into(), "\\displaystyle".into());
        assert_eq!(policy.validate()[0].code, codes::POLICY_CONFLICT);
    }

    #[test]
    fn chains_resolve() {
        let mut policy = NormPolicy::default();
        policy.replace.insert("\\a".into(), "\\dfrac".into());
        assert_eq!(policy.resolve("\\a"), "\\frac");
        assert_eq!(policy.resolve("\\zeta"), "\\zeta");
    }
}
