use std::collections::BTreeMap;

use rwstreams_core::{MachineBudget, UsageReport};
use serde::{Deserialize, Serialize};

/// What a command writes to standard error or `--report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub input_symbols: u64,
    pub budget: MachineBudget,
    pub usage: UsageReport,
    /// Command-specific figures such as output bits or the chosen period.
    #[serde(default)]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl RunReport {
    pub fn new(command: &str, input_symbols: u64, budget: MachineBudget, usage: UsageReport) -> Self {
        RunReport {
            command: command.into(),
            input_symbols,
            budget,
            usage,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.details.insert(key.into(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
