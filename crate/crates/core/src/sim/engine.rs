//! Event-driven execution of a workload against per-layer node pools.
//!
//! Each node is a single FIFO server. A task is encrypted on its device,
//! crosses the network, waits for its node, then runs. Only the run phase
//! occupies the node.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::ScenarioSpec;
use super::workload::generate_workload;
use crate::error::SimError;
use crate::model::{
    comm_time, enc_time, energy, privacy_score, proc_time, reward_from_outcome, Layer, LayerSpec, Task, TaskCategory,
    TaskId,
};
use crate::policy::{Orchestrator, SystemState};
use crate::SimRng;

/// Realized outcome of one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub task_id: TaskId,
    pub arrival_time: f64,
    pub layer: Layer,
    /// Pool index of the serving node.
    pub node: usize,
    pub rerouted: bool,
    /// Set when a full cloud refused the task; all cost fields are then zero.
    pub dropped: bool,
    pub privacy: bool,
    pub category: TaskCategory,
    pub data_size: f64,
    pub queue_wait: f64,
    pub proc_time: f64,
    pub comm_time: f64,
    pub enc_time: f64,
    pub total_latency: f64,
    pub service_start: f64,
    pub energy: f64,
    pub reward: f64,
    /// Megabytes over the edge-to-fog hop.
    pub bytes_edge_fog: f64,
    /// Megabytes over the fog-to-cloud hop.
    pub bytes_fog_cloud: f64,
}

impl TraceEvent {
    pub fn bytes_transferred(&self) -> f64 {
        self.bytes_edge_fog + self.bytes_fog_cloud
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub run: usize,
    pub seed: u64,
    pub duration: f64,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone)]
struct Node {
    busy_until: f64,
    /// Completion times of tasks assigned and not yet departed, FIFO.
    in_system: VecDeque<f64>,
}

/// All nodes of one layer.
#[derive(Debug, Clone)]
pub struct NodePool {
    layer: Layer,
    spec: LayerSpec,
    queue_capacity: usize,
    nodes: Vec<Node>,
    cursor: usize,
}

impl NodePool {
    pub fn new(spec: LayerSpec, size: usize, queue_capacity: usize) -> Self {
        NodePool {
            layer: spec.layer,
            spec,
            queue_capacity,
            nodes: vec![
                Node {
                    busy_until: 0.0,
                    in_system: VecDeque::new(),
                };
                size
            ],
            cursor: 0,
        }
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn occupied(&self) -> usize {
        self.nodes.iter().map(|n| n.in_system.len()).sum()
    }

    pub fn slots(&self) -> usize {
        self.nodes.len() * self.queue_capacity
    }

    pub fn occupancy(&self, node: usize) -> usize {
        self.nodes[node].in_system.len()
    }

    pub fn busy_until(&self, node: usize) -> f64 {
        self.nodes[node].busy_until
    }

    /// Node with the fewest queued tasks; ties rotate so peers share load.
    fn least_loaded(&mut self) -> usize {
        let n = self.nodes.len();
        let mut best = self.cursor % n;
        for k in 1..n {
            let i = (self.cursor + k) % n;
            if self.nodes[i].in_system.len() < self.nodes[best].in_system.len() {
                best = i;
            }
        }
        self.cursor = (best + 1) % n;
        best
    }

    fn has_room(&self, node: usize) -> bool {
        self.nodes[node].in_system.len() < self.queue_capacity
    }

    /// Books `service` seconds on `node` for a task ready at `ready`; returns
    /// the service start.
    fn book(&mut self, node: usize, ready: f64, service: f64) -> f64 {
        let n = &mut self.nodes[node];
        let start = ready.max(n.busy_until);
        n.busy_until = start + service;
        n.in_system.push_back(n.busy_until);
        start
    }

    fn depart(&mut self, node: usize) {
        self.nodes[node].in_system.pop_front();
    }
}

/// Snapshot of pool occupancy and link RTTs for the orchestrator.
pub fn build_system_state(pools: &[NodePool; 3], battery: &[f64]) -> SystemState {
    SystemState {
        queue_utilization: pools.each_ref().map(|p| {
            if p.slots() == 0 {
                0.0
            } else {
                (p.occupied() as f64 / p.slots() as f64).min(1.0)
            }
        }),
        network_rtt: pools.each_ref().map(|p| p.spec.base_rtt),
        battery: battery.to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    // departures sort first so freed slots are visible to simultaneous arrivals
    Departure { layer: Layer, node: usize },
    Arrival(usize),
}

impl EventKind {
    fn rank(&self) -> u8 {
        match self {
            EventKind::Departure { .. } => 0,
            EventKind::Arrival(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // reversed: BinaryHeap is a max-heap and we want the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.kind.rank().cmp(&self.kind.rank()))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Engine<'a> {
    spec: &'a ScenarioSpec,
    orchestrator: &'a Orchestrator,
    pools: [NodePool; 3],
    battery: Vec<f64>,
    events: BinaryHeap<Event>,
    seq: u64,
}

impl<'a> Engine<'a> {
    fn new(spec: &'a ScenarioSpec, orchestrator: &'a Orchestrator) -> Self {
        let pools = Layer::ALL.map(|l| {
            let cfg = spec.layers.get(l);
            NodePool::new(cfg.spec.clone(), spec.pool_size(l), cfg.queue_capacity)
        });
        Engine {
            spec,
            orchestrator,
            battery: vec![1.0; pools[Layer::Edge.index()].len()],
            pools,
            events: BinaryHeap::new(),
            seq: 0,
        }
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.events.push(Event {
            time,
            seq: self.seq,
            kind,
        });
        self.seq += 1;
    }

    fn run(mut self, tasks: &[Task]) -> Vec<TraceEvent> {
        for (i, t) in tasks.iter().enumerate() {
            self.schedule(t.arrival_time(), EventKind::Arrival(i));
        }
        let mut trace = Vec::with_capacity(tasks.len());
        while let Some(ev) = self.events.pop() {
            match ev.kind {
                EventKind::Departure { layer, node } => self.pools[layer.index()].depart(node),
                EventKind::Arrival(i) => trace.push(self.arrive(&tasks[i], ev.time)),
            }
        }
        trace
    }

    fn arrive(&mut self, task: &Task, now: f64) -> TraceEvent {
        let state = build_system_state(&self.pools, &self.battery);
        let decision = self.orchestrator.place(task, &state);
        let mut layer = decision.layer;
        let mut rerouted = decision.rerouted;

        // queue overflow escalates outward; a full cloud only refuses when configured to
        let node = loop {
            let pool = &mut self.pools[layer.index()];
            let node = pool.least_loaded();
            if pool.has_room(node) || (layer == Layer::Cloud && !self.spec.cloud_rejects) {
                break Some(node);
            }
            match layer.outward() {
                Some(next) => {
                    layer = next;
                    rerouted = true;
                }
                None => break None,
            }
        };

        let Some(node) = node else {
            return self.dropped(task, rerouted);
        };

        let pool = &self.pools[layer.index()];
        let spec = &pool.spec;
        let enc = enc_time(task, &self.spec.encryption);
        let comm = comm_time(task, spec);
        let proc = proc_time(task, spec);
        let joules = energy(task, spec);
        let accuracy = spec.accuracy;
        let ready = now + enc + comm;
        let start = self.pools[layer.index()].book(node, ready, proc);
        self.schedule(start + proc, EventKind::Departure { layer, node });
        let wait = start - ready;
        let total = wait + proc + comm + enc;

        if layer == Layer::Edge {
            let level = &mut self.battery[node];
            *level = (*level - joules / self.spec.battery_capacity).max(0.0);
        }

        let (bytes_edge_fog, bytes_fog_cloud) = match layer {
            Layer::Edge => (0.0, 0.0),
            Layer::Fog => (task.data_size(), 0.0),
            Layer::Cloud => {
                let onward = if task.category() == TaskCategory::Aggregation {
                    task.data_size() * (1.0 - self.spec.fog_summarization)
                } else {
                    task.data_size()
                };
                (task.data_size(), onward)
            }
        };

        TraceEvent {
            task_id: task.id(),
            arrival_time: now,
            layer,
            node,
            rerouted,
            dropped: false,
            privacy: task.is_sensitive(),
            category: task.category(),
            data_size: task.data_size(),
            queue_wait: wait,
            proc_time: proc,
            comm_time: comm,
            enc_time: enc,
            total_latency: total,
            service_start: start,
            energy: joules,
            reward: reward_from_outcome(total, joules, accuracy, privacy_score(task, layer), &self.spec.weights),
            bytes_edge_fog,
            bytes_fog_cloud,
        }
    }

    fn dropped(&self, task: &Task, rerouted: bool) -> TraceEvent {
        TraceEvent {
            task_id: task.id(),
            arrival_time: task.arrival_time(),
            layer: Layer::Cloud,
            node: 0,
            rerouted,
            dropped: true,
            privacy: task.is_sensitive(),
            category: task.category(),
            data_size: task.data_size(),
            queue_wait: 0.0,
            proc_time: 0.0,
            comm_time: 0.0,
            enc_time: 0.0,
            total_latency: 0.0,
            service_start: task.arrival_time(),
            energy: 0.0,
            reward: 0.0,
            bytes_edge_fog: 0.0,
            bytes_fog_cloud: 0.0,
        }
    }
}

/// Simulates an explicit task list.
pub fn run_tasks(spec: &ScenarioSpec, orchestrator: &Orchestrator, tasks: &[Task]) -> Vec<TraceEvent> {
    Engine::new(spec, orchestrator).run(tasks)
}

/// Generates the workload for `seed` and simulates it.
pub fn run(spec: &ScenarioSpec, orchestrator: &Orchestrator, seed: u64) -> Result<Trace, SimError> {
    spec.validate()?;
    let tasks = generate_workload(spec, &mut SimRng::seed_from_u64(seed));
    Ok(Trace {
        run: 0,
        seed,
        duration: spec.duration,
        events: run_tasks(spec, orchestrator, &tasks),
    })
}

/// Independent runs with seeds `spec.seed + i`, ordered by run index.
pub fn replicate(
    spec: &ScenarioSpec,
    orchestrator: &Orchestrator,
    replications: usize,
    parallel: bool,
) -> Result<Vec<Trace>, SimError> {
    let one = |i: usize| run(spec, orchestrator, spec.seed.wrapping_add(i as u64)).map(|t| Trace { run: i, ..t });
    if parallel {
        (0..replications).into_par_iter().map(one).collect()
    } else {
        (0..replications).map(one).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::total_time;
    use crate::policy::PolicyKind;

    fn orchestrator(spec: &ScenarioSpec, kind: PolicyKind) -> Orchestrator {
        Orchestrator::new(kind, spec.policy_config().unwrap(), None).unwrap()
    }

    #[test]
    fn single_task_on_idle_system_has_no_wait() {
        let spec = ScenarioSpec::smart_city();
        let task = Task::new(0, 0.5, 1e7, 0.05, true).unwrap().with_arrival(10.0).unwrap();
        for kind in [
            PolicyKind::CloudOnly,
            PolicyKind::FogCentric,
            PolicyKind::StaticOrchestration,
        ] {
            let o = orchestrator(&spec, kind);
            let ev = &run_tasks(&spec, &o, std::slice::from_ref(&task))[0];
            assert_eq!(ev.queue_wait, 0.0);
            let expected = total_time(&task, &spec.layers.get(ev.layer).spec, &spec.encryption);
            assert!(
                (ev.total_latency - expected).abs() <= 1e-15 * expected.max(1.0),
                "{kind}"
            );
        }
    }

    #[test]
    fn cloud_only_uses_network() {
        let spec = ScenarioSpec::smart_city();
        let trace = run(&spec, &orchestrator(&spec, PolicyKind::CloudOnly), 1).unwrap();
        assert!(trace
            .events
            .iter()
            .all(|e| e.layer == Layer::Cloud && e.comm_time > 0.0));
    }

    #[test]
    fn empty_pools_are_idle() {
        let spec = ScenarioSpec::smart_city();
        let pools = Layer::ALL.map(|l| NodePool::new(spec.layers.get(l).spec.clone(), 4, 2));
        let s = build_system_state(&pools, &[]);
        assert_eq!(s.queue_utilization, [0.0; 3]);
        assert_eq!(s.network_rtt, [0.0, 0.005, 0.05]);
    }

    #[test]
    fn full_layer_reports_saturation() {
        let spec = ScenarioSpec::smart_city();
        let mut pools = Layer::ALL.map(|l| NodePool::new(spec.layers.get(l).spec.clone(), 2, 2));
        let fog = &mut pools[Layer::Fog.index()];
        for _ in 0..4 {
            let n = fog.least_loaded();
            fog.book(n, 0.0, 1.0);
        }
        let s = build_system_state(&pools, &[]);
        assert_eq!(s.queue_utilization, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn least_loaded_rotates_over_peers() {
        let spec = ScenarioSpec::smart_city();
        let mut pool = NodePool::new(spec.layers.fog.spec.clone(), 3, 8);
        let picks: Vec<usize> = (0..6)
            .map(|_| {
                let n = pool.least_loaded();
                pool.book(n, 0.0, 1.0);
                n
            })
            .collect();
        assert_eq!(picks, vec![0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn overflow_escalates_and_optional_drop() {
        let mut spec = ScenarioSpec::smart_city();
        for l in [Layer::Fog, Layer::Cloud] {
            let cfg = match l {
                Layer::Fog => &mut spec.layers.fog,
                _ => &mut spec.layers.cloud,
            };
            cfg.pool_size = Some(1);
            cfg.queue_capacity = 1;
        }
        spec.cloud_rejects = true;
        spec.overload_threshold = 1.0;
        let o = orchestrator(&spec, PolicyKind::FogCentric);
        let tasks: Vec<Task> = (0..3)
            .map(|i| Task::new(i, 1.0, 1e6, 0.01, false).unwrap().with_arrival(0.0).unwrap())
            .collect();
        let trace = run_tasks(&spec, &o, &tasks);
        assert_eq!(trace[0].layer, Layer::Fog);
        assert_eq!(trace[1].layer, Layer::Cloud);
        assert!(trace[1].rerouted);
        assert!(trace[2].dropped);
    }
}
