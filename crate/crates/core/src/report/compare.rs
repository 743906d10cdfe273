use serde::Serialize;

use super::metrics::{Metric, MetricsReport};
use crate::error::ReportError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub metric: &'static str,
    pub label: &'static str,
    /// One mean per policy, in `Comparison::policies` order.
    pub values: Vec<f64>,
    /// `(baseline - candidate) / baseline` in percent; `None` when the
    /// baseline is zero and the candidate is not.
    pub deltas_pct: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub baseline: String,
    pub policies: Vec<String>,
    pub replications: usize,
    pub rows: Vec<ComparisonRow>,
}

pub fn delta_pct(baseline: f64, candidate: f64) -> Option<f64> {
    if baseline == 0.0 {
        (candidate == 0.0).then_some(0.0)
    } else {
        Some(100.0 * (baseline - candidate) / baseline)
    }
}

/// Side-by-side means with percentage deltas against `baseline`.
pub fn compare(reports: &[MetricsReport], baseline: &str) -> Result<Comparison, ReportError> {
    let base = reports
        .iter()
        .find(|r| r.policy == baseline)
        .ok_or_else(|| ReportError::UnknownBaseline(baseline.to_string()))?;
    let rows = Metric::ALL
        .into_iter()
        .map(|m| {
            let b = base.stat(m).mean;
            let values: Vec<f64> = reports.iter().map(|r| r.stat(m).mean).collect();
            ComparisonRow {
                metric: m.key(),
                label: m.label(),
                deltas_pct: values.iter().map(|v| delta_pct(b, *v)).collect(),
                values,
            }
        })
        .collect();
    Ok(Comparison {
        baseline: baseline.to_string(),
        policies: reports.iter().map(|r| r.policy.clone()).collect(),
        replications: base.replications,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::metrics::Stat;

    fn report(policy: &str, latency: f64, bandwidth: f64) -> MetricsReport {
        let mut r = MetricsReport::empty(policy, 1, 3600.0);
        r.mean_latency_ms = Stat {
            mean: latency,
            std: 0.0,
        };
        r.bandwidth_gb_per_hour = Stat {
            mean: bandwidth,
            std: 0.0,
        };
        r
    }

    #[test]
    fn reductions_against_baseline() {
        let cmp = compare(
            &[report("cloud-only", 10.0, 200.0), report("rl-hipa", 6.5, 150.0)],
            "cloud-only",
        )
        .unwrap();
        let lat = &cmp.rows[0];
        assert_eq!(lat.metric, "mean_latency_ms");
        assert!((lat.deltas_pct[1].unwrap() - 35.0).abs() < 1e-9);
        let bw = &cmp.rows[1];
        assert!((bw.deltas_pct[1].unwrap() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn self_comparison_is_zero() {
        let r = report("cloud-only", 10.0, 200.0);
        let cmp = compare(&[r.clone(), r], "cloud-only").unwrap();
        for row in &cmp.rows {
            assert!(row.deltas_pct.iter().all(|d| *d == Some(0.0)), "{}", row.metric);
        }
    }

    #[test]
    fn unknown_baseline() {
        assert!(matches!(
            compare(&[report("a", 1.0, 1.0)], "b"),
            Err(ReportError::UnknownBaseline(_))
        ));
    }

    #[test]
    fn antisymmetry_up_to_denominator() {
        let (a, b) = (10.0, 6.5);
        let d_ab = delta_pct(a, b).unwrap() * a;
        let d_ba = delta_pct(b, a).unwrap() * b;
        assert!((d_ab + d_ba).abs() < 1e-9);
    }
}
