use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use tiersim::policy::{Orchestrator, PolicyKind};
use tiersim::report::{compare, compute_metrics, emit_comparison, emit_report, Format, MetricsReport};
use tiersim::rl::{self, AgentConfig, TrainedAgent};
use tiersim::sim::{export, replicate, ScenarioEnv, ScenarioSpec, Trace};

const AFTER_HELP: &str = "\
Precedence: command-line flags override values in the --scenario file, which \
override the built-in smart-city defaults.
Exit codes: 0 success, 1 usage error, 2 runtime failure.";

#[derive(Parser, Debug)]
#[command(name = "tiersim", version, about = "Edge/fog/cloud task placement simulator", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one policy over seeded replications; write traces and a metrics report.
    Simulate(SimulateArgs),
    /// Train a placement agent; write the agent file and its learning curve.
    Train(TrainArgs),
    /// Run several policies on identical seeds and emit a comparison table.
    Compare(CompareArgs),
    /// Run one policy over the cartesian product of scenario overrides.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario JSON file (defaults to the bundled smart-city scenario).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Base seed; replication i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of replications.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    replications: Option<u64>,
    /// Tasks per replication.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    tasks: Option<u64>,
    /// Output directory.
    #[arg(long, env = "TIERSIM_OUT_DIR", default_value = "tiersim-out")]
    out: PathBuf,
    /// Report format: csv, json or markdown.
    #[arg(long, default_value = "markdown")]
    format: String,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Policy: rl-hipa, threshold-hipa, greedy-utility, cloud-only, static, fog-centric.
    #[arg(long)]
    policy: String,
    /// Trained agent file, required for rl-hipa.
    #[arg(long)]
    agent: Option<PathBuf>,
    /// Trace format: csv or ndjson.
    #[arg(long, default_value = "csv")]
    trace_format: String,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Scenario JSON file (defaults to the bundled smart-city scenario).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Agent configuration JSON, replacing the scenario's training block.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    episodes: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    tasks_per_episode: Option<u64>,
    /// Output directory.
    #[arg(long, env = "TIERSIM_OUT_DIR", default_value = "tiersim-out")]
    out: PathBuf,
    /// Agent file name inside the output directory.
    #[arg(long, default_value = "agent.tsq")]
    agent_name: String,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated policies, in column order.
    #[arg(long, value_delimiter = ',', default_value = "cloud-only,static,fog-centric,rl-hipa")]
    policies: Vec<String>,
    /// Policy that deltas are measured against.
    #[arg(long, default_value = "cloud-only")]
    baseline: String,
    /// Trained agent file, required when rl-hipa is compared.
    #[arg(long)]
    agent: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    policy: String,
    #[arg(long)]
    agent: Option<PathBuf>,
    /// Override grid entry `key=v1,v2,...`; dotted keys reach nested fields,
    /// values are JSON. Repeatable.
    #[arg(long = "grid")]
    grid: Vec<String>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Train(a) => train(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(path: Option<&Path>) -> Result<ScenarioSpec> {
    match path {
        None => Ok(ScenarioSpec::smart_city()),
        Some(p) => ScenarioSpec::from_path(p).with_context(|| format!("scenario {}", p.display())),
    }
}

fn apply_common(spec: &mut ScenarioSpec, c: &Common) -> Result<()> {
    if let Some(s) = c.seed {
        spec.seed = s;
    }
    if let Some(r) = c.replications {
        spec.replications = r as usize;
    }
    if let Some(t) = c.tasks {
        spec.task_count = t as usize;
    }
    spec.validate().context("scenario after flag overrides")?;
    Ok(())
}

fn parse_format(s: &str) -> Result<Format, Failure> {
    s.parse::<Format>().map_err(|e| usage(e.to_string()))
}

fn parse_policy(s: &str) -> Result<PolicyKind, Failure> {
    s.parse::<PolicyKind>().map_err(|e| usage(e.to_string()))
}

fn load_agent(kind: PolicyKind, path: Option<&Path>) -> Result<Option<Arc<TrainedAgent>>, Failure> {
    if kind != PolicyKind::RlHipa {
        return Ok(None);
    }
    let path =
        path.ok_or_else(|| usage("policy rl-hipa requires --agent <FILE> (produce one with `tiersim train`)"))?;
    let agent = rl::io::load(path).with_context(|| format!("agent file {}", path.display()))?;
    Ok(Some(Arc::new(agent)))
}

fn run_policy(spec: &ScenarioSpec, kind: PolicyKind, agent: Option<Arc<TrainedAgent>>) -> Result<Vec<Trace>> {
    let orch = Orchestrator::new(kind, spec.policy_config()?, agent).with_context(|| format!("policy {kind}"))?;
    replicate(spec, &orch, spec.replications, true).with_context(|| format!("simulating {kind}"))
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let kind = parse_policy(&a.policy)?;
    let format = parse_format(&a.common.format)?;
    if !matches!(a.trace_format.as_str(), "csv" | "ndjson") {
        return Err(usage(format!(
            "unknown trace format `{}` (expected csv or ndjson)",
            a.trace_format
        )));
    }
    let agent = load_agent(kind, a.agent.as_deref())?;
    let mut spec = load_scenario(a.common.scenario.as_deref())?;
    apply_common(&mut spec, &a.common)?;

    let traces = run_policy(&spec, kind, agent)?;
    let report = compute_metrics(kind.as_str(), &traces).context("computing metrics")?;
    ensure_dir(&a.common.out)?;

    let mut buf = Vec::new();
    if a.trace_format == "csv" {
        export::write_csv(&traces, &mut buf).context("trace csv")?;
    } else {
        export::write_ndjson(&traces, &mut buf).context("trace ndjson")?;
    }
    let trace_path = a.common.out.join(format!("{kind}-trace.{}", a.trace_format));
    write(&trace_path, &buf)?;
    let text = emit_report(&report, format).context("rendering report")?;
    write(
        &a.common.out.join(format!("{kind}-report.{}", format.extension())),
        text.as_bytes(),
    )?;
    print!("{text}");
    Ok(())
}

fn train(a: TrainArgs) -> Result<(), Failure> {
    let spec = load_scenario(a.scenario.as_deref())?;
    let mut cfg: AgentConfig = match &a.config {
        None => spec.training.clone(),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("agent config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("agent config {}", p.display()))?
        }
    };
    if let Some(e) = a.episodes {
        cfg.episodes = e as usize;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(lr) = a.learning_rate {
        cfg.learning_rate = lr;
    }
    if let Some(t) = a.tasks_per_episode {
        cfg.tasks_per_episode = t as usize;
    }
    cfg.validate().context("agent config")?;

    let mut env = ScenarioEnv::new(&spec).context("training environment")?;
    let outcome = rl::train(&mut env, &cfg).context("training")?;
    ensure_dir(&a.out)?;
    let agent_path = a.out.join(&a.agent_name);
    write(&agent_path, &rl::io::to_bytes(&outcome.agent))?;

    let mut curve = String::from("episode,mean_reward\n");
    for (i, r) in outcome.learning_curve.iter().enumerate() {
        curve.push_str(&format!("{i},{r}\n"));
    }
    write(&a.out.join("learning-curve.csv"), curve.as_bytes())?;
    println!("agent written to {}", agent_path.display());
    Ok(())
}

fn compare_cmd(a: CompareArgs) -> Result<(), Failure> {
    let format = parse_format(&a.common.format)?;
    let kinds: Vec<PolicyKind> = a.policies.iter().map(|p| parse_policy(p)).collect::<Result<_, _>>()?;
    if !kinds.iter().any(|k| k.as_str() == a.baseline) {
        return Err(usage(format!("baseline `{}` is not in --policies", a.baseline)));
    }
    let agent = match kinds.contains(&PolicyKind::RlHipa) {
        true => load_agent(PolicyKind::RlHipa, a.agent.as_deref())?,
        false => None,
    };
    let mut spec = load_scenario(a.common.scenario.as_deref())?;
    apply_common(&mut spec, &a.common)?;

    let reports = kinds
        .iter()
        .map(|&k| {
            let traces = run_policy(&spec, k, agent.clone())?;
            compute_metrics(k.as_str(), &traces).with_context(|| format!("metrics for {k}"))
        })
        .collect::<Result<Vec<MetricsReport>>>()?;
    let cmp = compare(&reports, &a.baseline).context("comparison")?;
    let text = emit_comparison(&cmp, format).context("rendering comparison")?;
    ensure_dir(&a.common.out)?;
    write(
        &a.common.out.join(format!("comparison.{}", format.extension())),
        text.as_bytes(),
    )?;
    print!("{text}");
    Ok(())
}

struct GridAxis {
    path: Vec<String>,
    values: Vec<Value>,
}

fn parse_axis(entry: &str, base: &Value) -> Result<GridAxis, Failure> {
    let (key, vals) = entry
        .split_once('=')
        .ok_or_else(|| usage(format!("grid entry `{entry}` must look like key=v1,v2")))?;
    let path: Vec<String> = key.split('.').map(str::to_string).collect();
    let mut node = base;
    for part in &path {
        node = node
            .get(part)
            .ok_or_else(|| usage(format!("unknown grid key `{key}`: no scenario field `{part}`")))?;
    }
    let values = vals
        .split(',')
        .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string())))
        .collect::<Vec<Value>>();
    if values.is_empty() || vals.is_empty() {
        return Err(usage(format!("grid key `{key}` has no values")));
    }
    Ok(GridAxis { path, values })
}

fn set_path(root: &mut Value, path: &[String], v: Value) {
    let mut node = root;
    for part in path {
        node = node.get_mut(part).expect("path checked against scenario");
    }
    *node = v;
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Index tuples of the cartesian product, last axis fastest.
fn cells(dims: &[usize]) -> Vec<Vec<usize>> {
    dims.iter().fold(vec![vec![]], |acc, &n| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut c = prefix.clone();
                    c.push(i);
                    c
                })
            })
            .collect()
    })
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let kind = parse_policy(&a.policy)?;
    let format = parse_format(&a.common.format)?;
    let mut base_spec = load_scenario(a.common.scenario.as_deref())?;
    apply_common(&mut base_spec, &a.common)?;
    let base: Value = serde_json::from_str(&base_spec.to_json()).context("scenario to json")?;
    let axes = a
        .grid
        .iter()
        .map(|g| parse_axis(g, &base))
        .collect::<Result<Vec<_>, _>>()?;
    let agent = load_agent(kind, a.agent.as_deref())?;
    ensure_dir(&a.common.out)?;

    let dims: Vec<usize> = axes.iter().map(|ax| ax.values.len()).collect();
    let mut index = String::from("cell");
    for ax in &axes {
        index.push(',');
        index.push_str(&ax.path.join("."));
    }
    index.push_str(",report\n");

    for (n, cell) in cells(&dims).iter().enumerate() {
        let mut v = base.clone();
        let mut labels = Vec::new();
        for (ax, &i) in axes.iter().zip(cell) {
            set_path(&mut v, &ax.path, ax.values[i].clone());
            labels.push(match &ax.values[i] {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            });
        }
        let spec = ScenarioSpec::from_json(&v.to_string())
            .with_context(|| format!("sweep cell {n} ({})", labels.join(", ")))?;
        let traces = run_policy(&spec, kind, agent.clone())?;
        let report = compute_metrics(kind.as_str(), &traces).with_context(|| format!("metrics for cell {n}"))?;
        let name = format!("cell-{n}.{}", format.extension());
        let text = emit_report(&report, format).context("rendering report")?;
        write(&a.common.out.join(&name), text.as_bytes())?;
        index.push_str(&n.to_string());
        for l in &labels {
            index.push(',');
            index.push_str(&csv_field(l));
        }
        index.push_str(&format!(",{name}\n"));
    }
    write(&a.common.out.join("index.csv"), index.as_bytes())?;
    print!("{index}");
    Ok(())
}
