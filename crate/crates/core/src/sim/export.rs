//! Trace serialization: CSV with a fixed header and newline-delimited JSON.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::engine::{Trace, TraceEvent};
use crate::error::SimError;
use crate::model::{Layer, TaskCategory};

/// Column order of the trace CSV.
pub const TRACE_CSV_HEADER: [&str; 21] = [
    "run",
    "task_id",
    "arrival_time",
    "layer",
    "node",
    "rerouted",
    "dropped",
    "privacy",
    "category",
    "data_size_mb",
    "queue_wait_s",
    "proc_time_s",
    "comm_time_s",
    "enc_time_s",
    "total_latency_s",
    "service_start",
    "energy_j",
    "reward",
    "bytes_edge_fog_mb",
    "bytes_fog_cloud_mb",
    "duration_s",
];

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    run: usize,
    task_id: u64,
    arrival_time: f64,
    layer: Layer,
    node: usize,
    rerouted: bool,
    dropped: bool,
    privacy: bool,
    category: TaskCategory,
    data_size_mb: f64,
    queue_wait_s: f64,
    proc_time_s: f64,
    comm_time_s: f64,
    enc_time_s: f64,
    total_latency_s: f64,
    service_start: f64,
    energy_j: f64,
    reward: f64,
    bytes_edge_fog_mb: f64,
    bytes_fog_cloud_mb: f64,
    duration_s: f64,
}

impl Row {
    fn new(run: usize, duration: f64, e: &TraceEvent) -> Self {
        Row {
            run,
            task_id: e.task_id,
            arrival_time: e.arrival_time,
            layer: e.layer,
            node: e.node,
            rerouted: e.rerouted,
            dropped: e.dropped,
            privacy: e.privacy,
            category: e.category,
            data_size_mb: e.data_size,
            queue_wait_s: e.queue_wait,
            proc_time_s: e.proc_time,
            comm_time_s: e.comm_time,
            enc_time_s: e.enc_time,
            total_latency_s: e.total_latency,
            service_start: e.service_start,
            energy_j: e.energy,
            reward: e.reward,
            bytes_edge_fog_mb: e.bytes_edge_fog,
            bytes_fog_cloud_mb: e.bytes_fog_cloud,
            duration_s: duration,
        }
    }

    fn into_event(self) -> TraceEvent {
        TraceEvent {
            task_id: self.task_id,
            arrival_time: self.arrival_time,
            layer: self.layer,
            node: self.node,
            rerouted: self.rerouted,
            dropped: self.dropped,
            privacy: self.privacy,
            category: self.category,
            data_size: self.data_size_mb,
            queue_wait: self.queue_wait_s,
            proc_time: self.proc_time_s,
            comm_time: self.comm_time_s,
            enc_time: self.enc_time_s,
            total_latency: self.total_latency_s,
            service_start: self.service_start,
            energy: self.energy_j,
            reward: self.reward,
            bytes_edge_fog: self.bytes_edge_fog_mb,
            bytes_fog_cloud: self.bytes_fog_cloud_mb,
        }
    }
}

/// Writes every event of every trace as one CSV row, header first.
pub fn write_csv<W: Write>(traces: &[Trace], out: W) -> Result<(), SimError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_CSV_HEADER)?;
    for t in traces {
        for e in &t.events {
            w.serialize(Row::new(t.run, t.duration, e))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_csv`]: groups rows back into traces by run index.
/// Seeds are not stored in the CSV and come back as zero.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Trace>, SimError> {
    let mut r = csv::Reader::from_reader(input);
    let mut traces: Vec<Trace> = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row?;
        let (run, duration) = (row.run, row.duration_s);
        match traces.iter_mut().find(|t| t.run == run) {
            Some(t) => t.events.push(row.into_event()),
            None => traces.push(Trace {
                run,
                seed: 0,
                duration,
                events: vec![row.into_event()],
            }),
        }
    }
    Ok(traces)
}

pub fn write_ndjson<W: Write>(traces: &[Trace], mut out: W) -> Result<(), SimError> {
    for t in traces {
        for e in &t.events {
            serde_json::to_writer(&mut out, &Row::new(t.run, t.duration, e))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
