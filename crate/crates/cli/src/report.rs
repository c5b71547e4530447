//! Report rows and their CSV / JSON encodings.

use std::io::Write;
use std::path::Path;

use qhe_limits::bounds::{BoundMode, SLACK_TOL};
use qhe_limits::repr::format_real;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_HEADER: &str = "scenario_id,quantity,value,bound,slack,pass,mode";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}; expected csv or json")),
        }
    }
}

/// One reported quantity. Checked rows carry a bound, the slack in the
/// direction that must be nonnegative, and the resulting pass flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRow {
    pub scenario_id: String,
    pub quantity: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub pass: Option<bool>,
    pub mode: BoundMode,
}

impl ReportRow {
    pub fn value(id: &str, quantity: impl Into<String>, value: f64, mode: BoundMode) -> Self {
        ReportRow { scenario_id: id.into(), quantity: quantity.into(), value, bound: None, slack: None, pass: None, mode }
    }

    /// Requires `value >= bound`.
    pub fn at_least(id: &str, quantity: impl Into<String>, value: f64, bound: f64, mode: BoundMode) -> Self {
        Self::checked(id, quantity, value, bound, value - bound, mode)
    }

    /// Requires `value <= bound`.
    pub fn at_most(id: &str, quantity: impl Into<String>, value: f64, bound: f64, mode: BoundMode) -> Self {
        Self::checked(id, quantity, value, bound, bound - value, mode)
    }

    /// Bound shown for reference only, no pass flag.
    pub fn recorded(id: &str, quantity: impl Into<String>, value: f64, bound: f64, slack: f64, mode: BoundMode) -> Self {
        ReportRow { bound: Some(bound), slack: Some(slack), ..Self::value(id, quantity, value, mode) }
    }

    fn checked(id: &str, quantity: impl Into<String>, value: f64, bound: f64, slack: f64, mode: BoundMode) -> Self {
        ReportRow {
            bound: Some(bound),
            slack: Some(slack),
            pass: Some(slack.is_finite() && slack >= -SLACK_TOL),
            ..Self::value(id, quantity, value, mode)
        }
    }

    pub fn flag(id: &str, quantity: impl Into<String>, ok: bool, mode: BoundMode) -> Self {
        ReportRow { pass: Some(ok), ..Self::value(id, quantity, if ok { 1.0 } else { 0.0 }, mode) }
    }

    fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.scenario_id,
            self.quantity,
            format_real(self.value),
            opt(self.bound),
            opt(self.slack),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
            self.mode
        )
    }
}

/// True iff no row has `pass = false`.
pub fn all_pass(rows: &[ReportRow]) -> bool {
    rows.iter().all(|r| r.pass != Some(false))
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ReportRow]) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<ReportRow>, CliError> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(rows: &[ReportRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(to_csv(rows)),
        Format::Json => to_json(rows),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Renders the rows and writes them to `out`, or stdout when `None`.
pub fn emit_report(rows: &[ReportRow], format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = render(rows, format)?;
    match out {
        Some(p) => write_atomic(p, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ReportRow> {
        vec![
            ReportRow::value("count", "reversible_count_bits", 24f64.log2(), BoundMode::Rigorous),
            ReportRow::at_least("otp", "communication_qubits", 4.0, 1.0, BoundMode::Paper),
            ReportRow::at_most("otp", "chain_step_1", 2e-16, 0.0, BoundMode::Paper),
            ReportRow::flag("scan", "decreasing", false, BoundMode::Paper),
        ]
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&rows()[..1]);
        assert_eq!(
            csv,
            "scenario_id,quantity,value,bound,slack,pass,mode\ncount,reversible_count_bits,4.58496250072,,,,rigorous\n"
        );
        let csv = to_csv(&rows());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[2], "otp,communication_qubits,4,1,3,true,paper");
        assert_eq!(lines[3], "otp,chain_step_1,2e-16,0,-2e-16,true,paper");
        assert_eq!(lines[4], "scan,decreasing,0,,,false,paper");
    }

    #[test]
    fn pass_follows_slack() {
        assert_eq!(ReportRow::at_least("a", "q", 8.0, 16.0, BoundMode::Paper).pass, Some(false));
        assert_eq!(ReportRow::at_most("a", "q", 0.5, 0.5, BoundMode::Paper).pass, Some(true));
        assert!(!all_pass(&rows()));
        assert!(all_pass(&rows()[..3]));
    }

    #[test]
    fn json_round_trip() {
        let r = rows();
        assert_eq!(from_json(&to_json(&r).unwrap()).unwrap(), r);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, "first\n").unwrap();
        write_atomic(&p, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
