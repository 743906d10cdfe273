//! Rendering of reports and comparisons as CSV, JSON or a markdown table.
//!
//! Report CSV header: `policy,metric,mean,std`, one row per metric after two
//! leading rows for `replications` and `duration_s` (std 0). Comparison CSV
//! header: `metric,<policy>...,delta_<policy>_pct...`, empty cells for
//! undefined deltas.

use std::fmt::Write as _;
use std::str::FromStr;

use super::compare::Comparison;
use super::metrics::{Metric, MetricsReport, PrivacyRisk, Stat};
use crate::error::ReportError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Markdown => "md",
        }
    }
}

fn csv_err(e: impl std::fmt::Display) -> ReportError {
    ReportError::Csv(e.to_string())
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn emit_report(report: &MetricsReport, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["policy", "metric", "mean", "std"]).map_err(csv_err)?;
            let p = report.policy.as_str();
            w.write_record([p, "replications", &report.replications.to_string(), "0"])
                .map_err(csv_err)?;
            w.write_record([p, "duration_s", &report.duration_s.to_string(), "0"])
                .map_err(csv_err)?;
            for m in Metric::ALL {
                let s = report.stat(m);
                w.write_record([p, m.key(), &s.mean.to_string(), &s.std.to_string()])
                    .map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
        }
        Format::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "### {} ({} replications)\n", report.policy, report.replications);
            s.push_str("| Metric | Mean | Std |\n|---|---:|---:|\n");
            for m in Metric::ALL {
                let st = report.stat(m);
                let _ = writeln!(s, "| {} | {} | {} |", m.label(), st.mean, st.std);
            }
            let _ = writeln!(s, "| Privacy Risk | {} | |", report.privacy_risk.as_str());
            Ok(s)
        }
    }
}

/// Inverse of [`emit_report`] for the CSV format.
pub fn parse_report_csv(text: &str) -> Result<MetricsReport, ReportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut policy = None;
    let mut replications = None;
    let mut duration = None;
    let mut stats: Vec<(Metric, Stat)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 4 {
            return Err(csv_err(format!("expected 4 columns, found {}", rec.len())));
        }
        let num = |i: usize| rec[i].parse::<f64>().map_err(|e| csv_err(format!("{}: {e}", &rec[1])));
        policy.get_or_insert_with(|| rec[0].to_string());
        match &rec[1] {
            "replications" => {
                replications = Some(
                    rec[2]
                        .parse::<usize>()
                        .map_err(|e| csv_err(format!("replications: {e}")))?,
                )
            }
            "duration_s" => duration = Some(num(2)?),
            key => {
                let m = Metric::from_key(key).ok_or_else(|| csv_err(format!("unknown metric `{key}`")))?;
                stats.push((
                    m,
                    Stat {
                        mean: num(2)?,
                        std: num(3)?,
                    },
                ));
            }
        }
    }
    let policy = policy.ok_or_else(|| csv_err("no rows"))?;
    let mut report = MetricsReport::empty(
        &policy,
        replications.ok_or_else(|| csv_err("missing replications row"))?,
        duration.ok_or_else(|| csv_err("missing duration_s row"))?,
    );
    for m in Metric::ALL {
        let s = stats
            .iter()
            .find(|(k, _)| *k == m)
            .ok_or_else(|| csv_err(format!("missing metric `{}`", m.key())))?;
        *report.stat_mut(m) = s.1;
    }
    report.privacy_risk = PrivacyRisk::from_local_pct(report.sensitive_local_pct.mean);
    Ok(report)
}

pub fn emit_comparison(cmp: &Comparison, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(cmp)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["metric".to_string()];
            header.extend(cmp.policies.iter().cloned());
            header.extend(cmp.policies.iter().map(|p| format!("delta_{p}_pct")));
            w.write_record(&header).map_err(csv_err)?;
            for row in &cmp.rows {
                let mut rec = vec![row.metric.to_string()];
                rec.extend(row.values.iter().map(|v| v.to_string()));
                rec.extend(row.deltas_pct.iter().map(|d| cell(*d)));
                w.write_record(&rec).map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
        }
        Format::Markdown => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "Means over {} replications; deltas are reductions relative to `{}` (n/a when the baseline is zero).\n",
                cmp.replications, cmp.baseline
            );
            s.push_str("| Metric |");
            for p in &cmp.policies {
                let _ = write!(s, " {p} |");
            }
            for p in &cmp.policies {
                let _ = write!(s, " Δ {p} (%) |");
            }
            s.push_str("\n|---|");
            s.push_str(&"---:|".repeat(2 * cmp.policies.len()));
            s.push('\n');
            for row in &cmp.rows {
                let _ = write!(s, "| {} |", row.label);
                for v in &row.values {
                    let _ = write!(s, " {v} |");
                }
                for d in &row.deltas_pct {
                    match d {
                        Some(d) => {
                            let _ = write!(s, " {d} |");
                        }
                        None => s.push_str(" n/a |"),
                    }
                }
                s.push('\n');
            }
            Ok(s)
        }
    }
}
