//! Aggregate metrics, baseline comparisons and their textual forms.

mod compare;
mod emit;
mod metrics;

pub use compare::{compare, delta_pct, Comparison, ComparisonRow};
pub use emit::{emit_comparison, emit_report, parse_report_csv, Format};
pub use metrics::{compute_metrics, Metric, MetricsReport, PrivacyRisk, Stat};
