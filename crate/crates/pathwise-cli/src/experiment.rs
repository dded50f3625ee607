//! Single runs and experiment sweeps, plus the CSV surfaces.
//!
//! Trace CSVs hold one row per logged checkpoint. All data columns are
//! deterministic functions of the flags, so repeated invocations produce
//! byte-identical bodies; wall-clock runtime is reported on the summary
//! line (and as per-cell means in sweep output), never in trace rows.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Deserialize;

use pathwise::graph::{Network, NetworkSpec};
use pathwise::policy::PolicyError;
use pathwise::sim::{
    build_policy, make_instance, run, trace_csv, RunConfig, RunStatus, TraceMeta, TRACE_CSV_HEADER,
};
use pathwise::spanner::general_basis;
use pathwise::{Basis, PolicyKind, RegretTrace};

use crate::parse_policy;

#[derive(Debug, Clone)]
pub enum NetworkChoice {
    Grid(usize),
    File(PathBuf),
}

impl NetworkChoice {
    fn load(&self) -> Result<(Arc<Network>, Option<usize>)> {
        match self {
            NetworkChoice::Grid(p) => Ok((Arc::new(Network::grid(*p)), Some(*p))),
            NetworkChoice::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let spec: NetworkSpec = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                Ok((Arc::new(Network::try_from(spec)?), None))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NetworkChoiceFile {
    Grid { grid: usize },
    File { file: PathBuf },
}

fn default_mu_max() -> f64 {
    1000.0
}
fn default_iterations() -> usize {
    50
}
fn default_stride() -> u64 {
    100
}
fn default_budget() -> u64 {
    90
}

/// JSON experiment description accepted by `sweep --config`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfigFile {
    network: NetworkChoiceFile,
    policies: Vec<String>,
    #[serde(rename = "T")]
    horizons: Vec<u64>,
    #[serde(rename = "R")]
    noise: Vec<f64>,
    #[serde(default = "default_mu_max")]
    mu_max: f64,
    #[serde(default = "default_iterations")]
    iterations: usize,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default = "default_stride")]
    stride: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    jobs: Option<usize>,
    #[serde(default = "default_budget")]
    budget_secs: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub networks: Vec<NetworkChoice>,
    pub policies: Vec<String>,
    pub horizons: Vec<u64>,
    pub noise: Vec<f64>,
    pub mu_max: f64,
    pub iterations: usize,
    pub out: Option<PathBuf>,
    pub stride: u64,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub budget_secs: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            networks: Vec::new(),
            policies: Vec::new(),
            horizons: Vec::new(),
            noise: Vec::new(),
            mu_max: default_mu_max(),
            iterations: default_iterations(),
            out: None,
            stride: default_stride(),
            seed: 0,
            jobs: None,
            budget_secs: default_budget(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: ExperimentConfigFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(ExperimentConfig {
            networks: vec![match file.network {
                NetworkChoiceFile::Grid { grid } => NetworkChoice::Grid(grid),
                NetworkChoiceFile::File { file } => NetworkChoice::File(file),
            }],
            policies: file.policies,
            horizons: file.horizons,
            noise: file.noise,
            mu_max: file.mu_max,
            iterations: file.iterations,
            out: file.out,
            stride: file.stride,
            seed: file.seed,
            jobs: file.jobs,
            budget_secs: file.budget_secs,
        })
    }
}

fn opt_to_string<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_run(
    loaded: &(Arc<Network>, Option<usize>),
    policy_name: &str,
    horizon: u64,
    noise: f64,
    mu_max: f64,
    seed: u64,
    out: Option<&Path>,
    stride: u64,
    budget: Duration,
) -> Result<()> {
    let (net, p) = loaded;
    let kind = parse_policy(policy_name)?;
    let basis: Basis = general_basis(net);
    let horizon = clamp_horizon(horizon, basis.d0());
    let instance = make_instance(Arc::clone(net), mu_max, noise, seed)?;

    let csv: String;
    match build_policy(kind, &instance, &basis, horizon, seed) {
        Ok(mut policy) => {
            for w in policy.warnings() {
                eprintln!("warning: {w}");
            }
            let mut cfg = RunConfig::new(horizon);
            cfg.checkpoint_stride = stride;
            cfg.budget = Some(budget);
            let trace = run(policy.as_mut(), &instance, &cfg, seed)?;
            csv = trace_csv(
                &trace,
                &TraceMeta {
                    seed,
                    policy: kind.name(),
                    grid_p: *p,
                    d: net.d(),
                    horizon,
                    noise,
                    epoch_len: basis.d0(),
                },
            );
            let status = match trace.status {
                RunStatus::Completed => "completed".to_string(),
                RunStatus::TimedOut { at_round } => format!("timeout@{at_round}"),
            };
            let summary = format!(
                "policy={} seed={} T={} R={} final_cum_pseudo_regret={} time_avg_pseudo_regret={} commit_epoch={} fallback_epoch={} status={} runtime_ms={}",
                kind.name(),
                seed,
                horizon,
                noise,
                trace.final_cum_pseudo_regret,
                trace.time_average_pseudo_regret(),
                opt_to_string(trace.commit_epoch),
                opt_to_string(trace.fallback_epoch),
                status,
                trace.runtime.as_millis(),
            );
            emit(out, &csv, &summary)?;
        }
        Err(PolicyError::CapExceeded { count, cap }) => {
            // header-only CSV; the summary carries the reason
            csv = format!("{TRACE_CSV_HEADER}\n");
            let summary = format!(
                "policy={} seed={} T={} R={} status=not_run:CapExceeded({count}>{cap})",
                kind.name(),
                seed,
                horizon,
                noise,
            );
            emit(out, &csv, &summary)?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn emit(out: Option<&Path>, csv: &str, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary}");
            println!("trace written to {}", path.display());
        }
        None => {
            print!("{csv}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn clamp_horizon(horizon: u64, d0: usize) -> u64 {
    if horizon < d0 as u64 {
        eprintln!(
            "warning: T={} below one epoch (d0={}); clamped",
            horizon, d0
        );
        d0 as u64
    } else {
        horizon
    }
}

/// Outcome of one (network, policy, T, R, seed) run inside a sweep.
struct CellRun {
    time_avg: f64,
    cum: f64,
    runtime_ms: f64,
    timed_out: bool,
}

#[derive(Default)]
struct CellAgg {
    runs: Vec<CellRun>,
    not_run: Option<String>,
}

pub const SWEEP_HEADER: &str = "policy,p,d,T,R,iters,mean_time_avg_pseudo_regret,stderr_time_avg_pseudo_regret,mean_cum_pseudo_regret,mean_runtime_ms,status";

pub fn cmd_sweep(cfg: ExperimentConfig) -> Result<()> {
    if cfg.networks.is_empty() {
        bail!("no network given: use --grid, --network, or --config");
    }
    if cfg.policies.is_empty() {
        bail!("empty policy list");
    }
    if cfg.horizons.is_empty() || cfg.noise.is_empty() {
        bail!("at least one --T and one --R value are required");
    }
    if cfg.iterations < 1 {
        bail!("--iters must be at least 1");
    }
    let kinds: Vec<PolicyKind> = cfg
        .policies
        .iter()
        .map(|s| parse_policy(s))
        .collect::<Result<_>>()?;

    // network + basis built once per choice, shared across the fan-out
    let mut nets: Vec<(Arc<Network>, Option<usize>, Arc<Basis>)> = Vec::new();
    for choice in &cfg.networks {
        let (net, p) = choice.load()?;
        let basis = Arc::new(general_basis::<f64>(&net));
        nets.push((net, p, basis));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .context("building worker pool")?;

    // one work item per (network, T, R, policy, seed)
    struct Item {
        net_idx: usize,
        kind: PolicyKind,
        horizon: u64,
        noise: f64,
        seed: u64,
    }
    let mut items = Vec::new();
    for (net_idx, (_, _, basis)) in nets.iter().enumerate() {
        for &t in &cfg.horizons {
            let horizon = clamp_horizon(t, basis.d0());
            for &noise in &cfg.noise {
                for kind in &kinds {
                    for i in 0..cfg.iterations {
                        items.push(Item {
                            net_idx,
                            kind: *kind,
                            horizon,
                            noise,
                            seed: cfg.seed.wrapping_add(i as u64),
                        });
                    }
                }
            }
        }
    }

    let budget = Duration::from_secs(cfg.budget_secs);
    let stride = cfg.stride;
    let mu_max = cfg.mu_max;
    let results: Vec<(Item, Result<CellRun, String>)> = pool.install(|| {
        items
            .into_par_iter()
            .map(|item| {
                let (net, _, basis) = &nets[item.net_idx];
                let outcome = simulate_one(
                    net,
                    basis,
                    item.kind,
                    item.horizon,
                    item.noise,
                    mu_max,
                    item.seed,
                    stride,
                    budget,
                )
                .map(|trace| CellRun {
                    time_avg: trace.time_average_pseudo_regret(),
                    cum: trace.final_cum_pseudo_regret,
                    runtime_ms: trace.runtime.as_secs_f64() * 1000.0,
                    timed_out: matches!(trace.status, RunStatus::TimedOut { .. }),
                });
                (item, outcome)
            })
            .collect()
    });

    // aggregate in deterministic key order
    let mut cells: BTreeMap<(String, usize, u64, u64), CellAgg> = BTreeMap::new();
    for (item, outcome) in results {
        let agg = cells
            .entry((
                item.kind.name().to_string(),
                item.net_idx,
                item.horizon,
                item.noise.to_bits(),
            ))
            .or_default();
        match outcome {
            Ok(run) => agg.runs.push(run),
            Err(reason) => agg.not_run = Some(reason),
        }
    }

    let mut csv = String::new();
    csv.push_str(SWEEP_HEADER);
    csv.push('\n');
    for ((policy, net_idx, horizon, noise_bits), agg) in &cells {
        let (net, p, _) = &nets[*net_idx];
        let noise = f64::from_bits(*noise_bits);
        let row = if let Some(reason) = &agg.not_run {
            format!(
                "{},{},{},{},{},{},,,,,{}",
                policy,
                opt_to_string(*p),
                net.d(),
                horizon,
                noise,
                cfg.iterations,
                reason
            )
        } else {
            let n = agg.runs.len() as f64;
            let mean_ta = agg.runs.iter().map(|r| r.time_avg).sum::<f64>() / n;
            let var_ta = if agg.runs.len() > 1 {
                agg.runs
                    .iter()
                    .map(|r| (r.time_avg - mean_ta).powi(2))
                    .sum::<f64>()
                    / (n - 1.0)
            } else {
                0.0
            };
            let stderr_ta = (var_ta / n).sqrt();
            let mean_cum = agg.runs.iter().map(|r| r.cum).sum::<f64>() / n;
            let mean_rt = agg.runs.iter().map(|r| r.runtime_ms).sum::<f64>() / n;
            let timeouts = agg.runs.iter().filter(|r| r.timed_out).count();
            let status = if timeouts > 0 {
                format!("timeout:{}/{}", timeouts, agg.runs.len())
            } else {
                "ok".to_string()
            };
            format!(
                "{},{},{},{},{},{},{},{},{},{:.3},{}",
                policy,
                opt_to_string(*p),
                net.d(),
                horizon,
                noise,
                agg.runs.len(),
                mean_ta,
                stderr_ta,
                mean_cum,
                mean_rt,
                status
            )
        };
        csv.push_str(&row);
        csv.push('\n');
    }

    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            println!("sweep written to {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn simulate_one(
    net: &Arc<Network>,
    basis: &Basis,
    kind: PolicyKind,
    horizon: u64,
    noise: f64,
    mu_max: f64,
    seed: u64,
    stride: u64,
    budget: Duration,
) -> Result<RegretTrace, String> {
    let instance =
        make_instance(Arc::clone(net), mu_max, noise, seed).map_err(|e| e.to_string())?;
    let mut policy = match build_policy(kind, &instance, basis, horizon, seed) {
        Ok(p) => p,
        Err(PolicyError::CapExceeded { count, cap }) => {
            return Err(format!("not_run:CapExceeded({count}>{cap})"));
        }
        Err(e) => return Err(e.to_string()),
    };
    let mut cfg = RunConfig::new(horizon);
    cfg.checkpoint_stride = stride;
    cfg.budget = Some(budget);
    run(policy.as_mut(), &instance, &cfg, seed).map_err(|e| e.to_string())
}
