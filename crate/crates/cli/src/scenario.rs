//! Declarative scenario configs.
//!
//! ```json
//! {"scenarios": [
//!   {"id": "count-2", "task": {"kind": "count", "n": 2}},
//!   {"id": "otp", "mode": "rigorous", "task": {"kind": "reduce", "scheme": "xor-otp", "n": 2}}
//! ]}
//! ```
//!
//! Unknown keys anywhere are errors.

use std::path::PathBuf;

use qhe_limits::bounds::BoundMode;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    /// Falls back to the command-line `--mode`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<BoundMode>,
    /// Falls back to the command-line `--seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Wall-clock budget; overruns are flagged in the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<f64>,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    /// Closed-form bounds. Nayak and subset bounds need `p`; the
    /// communication bound needs `epsilon` (family defaults to all
    /// `2^(2^n)` functions); `corollary` scans `eps(n) = 2^(-1.01 n)`.
    Bounds {
        n: usize,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        family_size: Option<u64>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        corollary: Option<Vec<usize>>,
    },
    Count {
        n: usize,
    },
    QracOptimize {
        n: usize,
        m: usize,
        /// Seeds `seed, seed + 1, ...`.
        runs: usize,
        iterations: usize,
        /// Defaults to all `2^n` strings.
        #[serde(default)]
        family: Option<Vec<String>>,
    },
    QheAudit {
        scheme: String,
        n: usize,
        #[serde(default)]
        delta: Option<f64>,
    },
    Reduce {
        scheme: String,
        n: usize,
        #[serde(default)]
        delta: Option<f64>,
        /// Defaults to all zeros.
        #[serde(default)]
        base: Option<String>,
        #[serde(default)]
        chain_out: Option<PathBuf>,
    },
    TraceLemma {
        code: CodeSource,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        iterations: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeSource {
    #[serde(rename = "known-2to1")]
    Known2to1,
    #[serde(rename = "known-3to1")]
    Known3to1,
    Computational,
    Seesaw,
}

impl std::str::FromStr for CodeSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| {
            format!("unknown code {s:?}; expected known-2to1, known-3to1, computational or seesaw")
        })
    }
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Bounds { .. } => "bounds",
            Task::Count { .. } => "count",
            Task::QracOptimize { .. } => "qrac-optimize",
            Task::QheAudit { .. } => "qhe-audit",
            Task::Reduce { .. } => "reduce",
            Task::TraceLemma { .. } => "trace-lemma",
        }
    }
}

/// Parses a scenario file, reporting the JSON path of the first offending
/// field.
pub fn parse_scenarios(text: &str) -> Result<ScenarioFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    validate(&file)?;
    Ok(file)
}

fn validate(file: &ScenarioFile) -> Result<(), CliError> {
    let bad = |i: usize, field: &str, message: String| CliError::Config { path: format!("scenarios[{i}].{field}"), message };
    if file.scenarios.is_empty() {
        return Err(CliError::Config { path: "scenarios".into(), message: "no scenarios".into() });
    }
    for (i, s) in file.scenarios.iter().enumerate() {
        if s.id.is_empty() || s.id.contains([',', '"', '\n', '\r']) {
            return Err(bad(i, "id", format!("{:?} must be nonempty without commas, quotes or newlines", s.id)));
        }
        if file.scenarios[..i].iter().any(|t| t.id == s.id) {
            return Err(bad(i, "id", format!("duplicate id {:?}", s.id)));
        }
        if let Some(b) = s.budget_seconds {
            if !(b.is_finite() && b > 0.0) {
                return Err(bad(i, "budget_seconds", format!("{b} is not a positive number")));
            }
        }
    }
    Ok(())
}
