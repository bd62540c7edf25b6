use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Comparison {
    /// `|expected − observed| ≤ tolerance`.
    Equal { tolerance: f64 },
    /// `observed ≤ expected`.
    AtMost,
    /// `observed ≥ expected`.
    AtLeast,
    /// `observed > expected`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub description: String,
    pub expected: f64,
    pub observed: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Claim {
    pub fn new(description: impl Into<String>, expected: f64, observed: f64, comparison: Comparison) -> Self {
        let passed = match comparison {
            Comparison::Equal { tolerance } => (expected - observed).abs() <= tolerance,
            Comparison::AtMost => observed <= expected,
            Comparison::AtLeast => observed >= expected,
            Comparison::Above => observed > expected,
        };
        Claim {
            description: description.into(),
            expected,
            observed,
            comparison,
            passed,
        }
    }

    pub fn exact(description: impl Into<String>, expected: f64, observed: f64) -> Self {
        Claim::new(description, expected, observed, Comparison::Equal { tolerance: 0.0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub name: String,
    pub claims: Vec<Claim>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl ScenarioResult {
    pub fn new(name: &str) -> Self {
        ScenarioResult {
            name: name.to_string(),
            claims: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn claim(&self, prefix: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.description.starts_with(prefix))
    }

    pub(crate) fn note(&mut self, key: &str, value: impl Serialize) {
        self.metadata
            .insert(key.to_string(), serde_json::to_value(value).expect("metadata serializes"));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario results serialize")
    }
}
