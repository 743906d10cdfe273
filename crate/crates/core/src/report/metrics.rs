use serde::{Deserialize, Serialize};

use crate::error::ReportError;
use crate::model::Layer;
use crate::sim::{Trace, TraceEvent};

const JOULES_PER_KWH: f64 = 3.6e6;
const MB_PER_GB: f64 = 1000.0;

/// Mean and sample standard deviation across replications.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn from_samples(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stat { mean, std }
    }
}

/// Every scalar in a [`MetricsReport`], in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    MeanLatency,
    Bandwidth,
    Energy,
    ProcessingTime,
    SensitiveLocal,
    MedianLatency,
    P95Latency,
    EdgeShare,
    FogShare,
    CloudShare,
    EncryptionOverhead,
    RerouteRate,
    DropRate,
    CompletedTasks,
}

impl Metric {
    pub const ALL: [Metric; 14] = [
        Metric::MeanLatency,
        Metric::Bandwidth,
        Metric::Energy,
        Metric::ProcessingTime,
        Metric::SensitiveLocal,
        Metric::MedianLatency,
        Metric::P95Latency,
        Metric::EdgeShare,
        Metric::FogShare,
        Metric::CloudShare,
        Metric::EncryptionOverhead,
        Metric::RerouteRate,
        Metric::DropRate,
        Metric::CompletedTasks,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::MeanLatency => "mean_latency_ms",
            Metric::Bandwidth => "bandwidth_gb_per_hour",
            Metric::Energy => "energy_kwh",
            Metric::ProcessingTime => "mean_proc_time_s",
            Metric::SensitiveLocal => "sensitive_local_pct",
            Metric::MedianLatency => "median_latency_ms",
            Metric::P95Latency => "p95_latency_ms",
            Metric::EdgeShare => "edge_share_pct",
            Metric::FogShare => "fog_share_pct",
            Metric::CloudShare => "cloud_share_pct",
            Metric::EncryptionOverhead => "mean_encryption_ms",
            Metric::RerouteRate => "reroute_rate_pct",
            Metric::DropRate => "drop_rate_pct",
            Metric::CompletedTasks => "completed_tasks",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::MeanLatency => "Average Latency (ms)",
            Metric::Bandwidth => "Bandwidth Usage (GB/hour)",
            Metric::Energy => "Energy Consumption (kWh, per run)",
            Metric::ProcessingTime => "Task Processing Time (s, compute only)",
            Metric::SensitiveLocal => "% of Sensitive Data Processed Locally",
            Metric::MedianLatency => "Median Latency (ms)",
            Metric::P95Latency => "P95 Latency (ms)",
            Metric::EdgeShare => "Edge Share (%)",
            Metric::FogShare => "Fog Share (%)",
            Metric::CloudShare => "Cloud Share (%)",
            Metric::EncryptionOverhead => "Encryption Overhead (ms, sensitive tasks)",
            Metric::RerouteRate => "Rerouted Tasks (%)",
            Metric::DropRate => "Dropped Tasks (%)",
            Metric::CompletedTasks => "Completed Tasks",
        }
    }

    pub fn from_key(key: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.key() == key)
    }
}

/// Three-band reading of the local-processing share of sensitive tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrivacyRisk {
    Low,
    Medium,
    High,
}

impl PrivacyRisk {
    pub fn from_local_pct(pct: f64) -> Self {
        if pct >= 50.0 {
            PrivacyRisk::Low
        } else if pct >= 20.0 {
            PrivacyRisk::Medium
        } else {
            PrivacyRisk::High
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PrivacyRisk::Low => "Low",
            PrivacyRisk::Medium => "Medium",
            PrivacyRisk::High => "High",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub policy: String,
    pub replications: usize,
    pub duration_s: f64,
    pub mean_latency_ms: Stat,
    pub bandwidth_gb_per_hour: Stat,
    pub energy_kwh: Stat,
    pub mean_proc_time_s: Stat,
    pub sensitive_local_pct: Stat,
    pub median_latency_ms: Stat,
    pub p95_latency_ms: Stat,
    pub edge_share_pct: Stat,
    pub fog_share_pct: Stat,
    pub cloud_share_pct: Stat,
    pub mean_encryption_ms: Stat,
    pub reroute_rate_pct: Stat,
    pub drop_rate_pct: Stat,
    pub completed_tasks: Stat,
    pub privacy_risk: PrivacyRisk,
}

impl MetricsReport {
    pub fn stat(&self, m: Metric) -> Stat {
        match m {
            Metric::MeanLatency => self.mean_latency_ms,
            Metric::Bandwidth => self.bandwidth_gb_per_hour,
            Metric::Energy => self.energy_kwh,
            Metric::ProcessingTime => self.mean_proc_time_s,
            Metric::SensitiveLocal => self.sensitive_local_pct,
            Metric::MedianLatency => self.median_latency_ms,
            Metric::P95Latency => self.p95_latency_ms,
            Metric::EdgeShare => self.edge_share_pct,
            Metric::FogShare => self.fog_share_pct,
            Metric::CloudShare => self.cloud_share_pct,
            Metric::EncryptionOverhead => self.mean_encryption_ms,
            Metric::RerouteRate => self.reroute_rate_pct,
            Metric::DropRate => self.drop_rate_pct,
            Metric::CompletedTasks => self.completed_tasks,
        }
    }

    pub(crate) fn stat_mut(&mut self, m: Metric) -> &mut Stat {
        match m {
            Metric::MeanLatency => &mut self.mean_latency_ms,
            Metric::Bandwidth => &mut self.bandwidth_gb_per_hour,
            Metric::Energy => &mut self.energy_kwh,
            Metric::ProcessingTime => &mut self.mean_proc_time_s,
            Metric::SensitiveLocal => &mut self.sensitive_local_pct,
            Metric::MedianLatency => &mut self.median_latency_ms,
            Metric::P95Latency => &mut self.p95_latency_ms,
            Metric::EdgeShare => &mut self.edge_share_pct,
            Metric::FogShare => &mut self.fog_share_pct,
            Metric::CloudShare => &mut self.cloud_share_pct,
            Metric::EncryptionOverhead => &mut self.mean_encryption_ms,
            Metric::RerouteRate => &mut self.reroute_rate_pct,
            Metric::DropRate => &mut self.drop_rate_pct,
            Metric::CompletedTasks => &mut self.completed_tasks,
        }
    }

    pub(crate) fn empty(policy: &str, replications: usize, duration_s: f64) -> Self {
        let z = Stat::default();
        MetricsReport {
            policy: policy.to_string(),
            replications,
            duration_s,
            mean_latency_ms: z,
            bandwidth_gb_per_hour: z,
            energy_kwh: z,
            mean_proc_time_s: z,
            sensitive_local_pct: z,
            median_latency_ms: z,
            p95_latency_ms: z,
            edge_share_pct: z,
            fog_share_pct: z,
            cloud_share_pct: z,
            mean_encryption_ms: z,
            reroute_rate_pct: z,
            drop_rate_pct: z,
            completed_tasks: z,
            privacy_risk: PrivacyRisk::High,
        }
    }
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Nearest-rank percentile of an ascending slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = (p / 100.0 * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Scalars of a single replication, keyed like [`Metric::ALL`].
fn run_scalars(events: &[TraceEvent], duration: f64) -> [f64; 14] {
    let done: Vec<&TraceEvent> = events.iter().filter(|e| !e.dropped).collect();
    let n = done.len();
    let mut latencies: Vec<f64> = done.iter().map(|e| e.total_latency).collect();
    latencies.sort_by(f64::total_cmp);
    let mean = |f: &dyn Fn(&TraceEvent) -> f64| done.iter().map(|e| f(e)).sum::<f64>() / n as f64;

    let on = |l: Layer| done.iter().filter(|e| e.layer == l).count();
    let sensitive: Vec<&&TraceEvent> = done.iter().filter(|e| e.privacy).collect();
    let local = sensitive.iter().filter(|e| e.layer != Layer::Cloud).count();
    let enc_ms = if sensitive.is_empty() {
        0.0
    } else {
        1000.0 * sensitive.iter().map(|e| e.enc_time).sum::<f64>() / sensitive.len() as f64
    };
    let mb: f64 = done.iter().map(|e| e.bytes_transferred()).sum();

    [
        1000.0 * mean(&|e| e.total_latency),
        (mb / MB_PER_GB) / (duration / 3600.0),
        done.iter().map(|e| e.energy).sum::<f64>() / JOULES_PER_KWH,
        mean(&|e| e.proc_time),
        percent(local, sensitive.len()),
        1000.0 * median(&latencies),
        1000.0 * percentile(&latencies, 95.0),
        percent(on(Layer::Edge), n),
        percent(on(Layer::Fog), n),
        percent(on(Layer::Cloud), n),
        enc_ms,
        percent(done.iter().filter(|e| e.rerouted).count(), n),
        percent(events.len() - n, events.len()),
        n as f64,
    ]
}

/// Aggregates per-replication traces into one report.
pub fn compute_metrics(policy: &str, traces: &[Trace]) -> Result<MetricsReport, ReportError> {
    if traces.is_empty() || traces.iter().any(|t| t.events.iter().all(|e| e.dropped)) {
        return Err(ReportError::EmptyInput);
    }
    let per_run: Vec<[f64; 14]> = traces.iter().map(|t| run_scalars(&t.events, t.duration)).collect();
    let mut report = MetricsReport::empty(policy, traces.len(), traces[0].duration);
    for (i, m) in Metric::ALL.into_iter().enumerate() {
        let xs: Vec<f64> = per_run.iter().map(|r| r[i]).collect();
        *report.stat_mut(m) = Stat::from_samples(&xs);
    }
    report.privacy_risk = PrivacyRisk::from_local_pct(report.sensitive_local_pct.mean);
    Ok(report)
}
