use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Rate, RunStatistics};
use crate::scenario::Scenario;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

/// Everything needed to replay a batch: scenario hash, seed and trial count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario_hash: String,
    pub seed: u64,
    pub trials: u64,
    pub stats: RunStatistics,
}

impl Report {
    pub fn new(scenario: &Scenario, seed: u64, stats: RunStatistics) -> Self {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            scenario_hash: scenario.hash(),
            seed,
            trials: stats.trials,
            stats,
        }
    }

    fn csv_rows(&self) -> Vec<[String; 6]> {
        let s = &self.stats;
        let plain = |name: &str, v: String| {
            [
                name.to_string(),
                v,
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]
        };
        let rate = |name: &str, r: &Rate| {
            [
                name.to_string(),
                r.value.to_string(),
                r.count.to_string(),
                r.trials.to_string(),
                r.ci99_low.to_string(),
                r.ci99_high.to_string(),
            ]
        };
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            plain("schema_version", self.schema_version.to_string()),
            plain("scenario_hash", self.scenario_hash.clone()),
            plain("seed", self.seed.to_string()),
            plain("trials", s.trials.to_string()),
            plain("completions", s.completions.to_string()),
            plain("channel_aborts", s.channel_aborts.to_string()),
            plain(
                "post_confirmation_aborts",
                s.post_confirmation_aborts.to_string(),
            ),
            plain("ties", s.ties.to_string()),
            rate("detection", &s.detection),
            rate("decoy_error", &s.decoy_error),
            rate("decode_error", &s.decode_error),
            rate("post_confirmation_failure", &s.post_confirmation_failure),
            rate("collusion_success", &s.collusion_success),
            plain("message_qubits", s.message_qubits.to_string()),
            plain("bid_cbits", s.bid_cbits.to_string()),
            plain("decoy_qubits", s.decoy_qubits.to_string()),
            plain("epr_qubits", s.epr_qubits.to_string()),
            plain("xi", opt(s.xi)),
            plain("decoy_qubits_per_cbit", opt(s.decoy_qubits_per_cbit)),
            plain("epr_qubits_per_cbit", opt(s.epr_qubits_per_cbit)),
        ]
    }
}

/// Renders `report`; CSV has one row per metric under the header
/// `metric,value,count,trials,ci99_low,ci99_high`.
pub fn render_report(report: &Report, format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
            text.push('\n');
            Ok(text)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "metric",
                "value",
                "count",
                "trials",
                "ci99_low",
                "ci99_high",
            ])?;
            for row in report.csv_rows() {
                w.write_record(&row)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| csv::Error::from(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn emit_report(report: &Report, format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let text = render_report(report, format)?;
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
