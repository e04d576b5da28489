use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub location: String,
}

/// Outcome of a structural check. Every violated rule is listed, not just
/// the first one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self {
            ok: true,
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, rule: impl Into<String>, location: impl Into<String>) {
        self.violations.push(Violation {
            rule: rule.into(),
            location: location.into(),
        });
        self.ok = false;
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn count_rule(&self, rule: &str) -> usize {
        self.violations.iter().filter(|v| v.rule == rule).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(8) {
            write!(f, "; {} at {}", v.rule, v.location)?;
        }
        if self.violations.len() > 8 {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}
