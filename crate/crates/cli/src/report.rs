use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Task};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "FEASIBLE")]
    Feasible,
    #[serde(rename = "INFEASIBLE")]
    Infeasible,
    #[serde(rename = "FIRM-CONSISTENT")]
    FirmConsistent,
    #[serde(rename = "NOT-FIRM-CONSISTENT")]
    NotFirmConsistent,
    #[serde(rename = "N/A")]
    NotApplicable,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::Feasible | Verdict::FirmConsistent => 0,
            _ => 1,
        }
    }

    pub fn label(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }
}

/// The JSON report. Nothing run-specific (time, thread count, paths) goes in.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub artifact_version: &'static str,
    pub config: ExperimentConfig,
    pub task: Task,
    pub verdict: Verdict,
    pub metrics: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }
}
