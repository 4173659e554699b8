//! Validation reports. An empty report means every checked axiom holds.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Short rule name, e.g. `laxator.assoc`.
    pub rule: String,
    /// Where the violation happened (entity names, elements).
    pub at: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub entries: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_ok(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, rule: &str, at: impl Into<String>, detail: impl Into<String>) {
        self.entries.push(Violation { rule: rule.to_string(), at: at.into(), detail: detail.into() });
    }

    /// Record a violation unless `ok` holds.
    pub fn check(&mut self, ok: bool, rule: &str, at: impl FnOnce() -> String, detail: &str) {
        if !ok {
            self.push(rule, at(), detail);
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn has_rule(&self, prefix: &str) -> bool {
        self.entries.iter().any(|v| v.rule.starts_with(prefix))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return writeln!(f, "ok");
        }
        for v in &self.entries {
            writeln!(f, "{}\t{}\t{}", v.rule, v.at, v.detail)?;
        }
        Ok(())
    }
}
