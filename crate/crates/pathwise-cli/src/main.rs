//! `pathwise`: generate networks, inspect exploration bases, run routing
//! policies under end-to-end feedback, sweep experiment grids, and
//! cross-check the fast paths against brute force.

mod experiment;
mod verify;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pathwise::graph::{network_stats, Network, NetworkSpec};
use pathwise::spanner::{general_basis, Basis};
use pathwise::PolicyKind;

use experiment::{ExperimentConfig, NetworkChoice};

#[derive(Parser)]
#[command(name = "pathwise", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct NetworkArgs {
    /// Grid side length p (the network is the p-by-p grid).
    #[arg(long, conflicts_with = "network")]
    grid: Option<usize>,
    /// Network JSON file: {nodes, links: [[tail,head],...], source, destination}.
    #[arg(long)]
    network: Option<PathBuf>,
}

impl NetworkArgs {
    fn load(&self) -> Result<(Arc<Network>, Option<usize>)> {
        match (&self.grid, &self.network) {
            (Some(p), None) => {
                if *p < 1 {
                    bail!("--grid must be at least 1");
                }
                Ok((Arc::new(Network::grid(*p)), Some(*p)))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let spec: NetworkSpec = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                let net = Network::try_from(spec)
                    .with_context(|| format!("validating {}", path.display()))?;
                Ok((Arc::new(net), None))
            }
            _ => bail!("exactly one of --grid or --network is required"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print structural statistics of a network.
    Gen {
        #[command(flatten)]
        net: NetworkArgs,
    },
    /// Build the exploration basis and print its summary.
    Basis {
        #[command(flatten)]
        net: NetworkArgs,
        /// Write the basis as JSON {paths, d0, S}.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one policy on one seeded instance and export the regret trace.
    Run {
        #[command(flatten)]
        net: NetworkArgs,
        /// Policy name (ec-gap, ec-worstcase, ttc, mttc, ts, ofu,
        /// uniform-random, optimal).
        #[arg(long)]
        policy: String,
        /// Horizon T.
        #[arg(long = "T")]
        horizon: u64,
        /// Noise scale R.
        #[arg(long = "R", default_value_t = 1.0)]
        noise: f64,
        /// Upper bound of the uniform mean link delays.
        #[arg(long = "mu-max", default_value_t = 1000.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rounds between trace checkpoints.
        #[arg(long, default_value_t = 100)]
        stride: u64,
        /// Wall-clock budget per run in seconds.
        #[arg(long = "budget-secs", default_value_t = 90)]
        budget_secs: u64,
    },
    /// Sweep policies over horizons, noise levels, and seeds; write the
    /// aggregated CSV.
    Sweep {
        /// JSON experiment config; command-line flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid side lengths, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "network")]
        grid: Vec<usize>,
        #[arg(long)]
        network: Option<PathBuf>,
        /// Policies, comma separated.
        #[arg(long, value_delimiter = ',')]
        policy: Vec<String>,
        /// Horizons, comma separated.
        #[arg(long = "T", value_delimiter = ',')]
        horizons: Vec<u64>,
        /// Noise scales, comma separated.
        #[arg(long = "R", value_delimiter = ',')]
        noise: Vec<f64>,
        #[arg(long = "mu-max")]
        mu_max: Option<f64>,
        /// Seeds per cell.
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker cap for the run fan-out.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        stride: Option<u64>,
        #[arg(long = "budget-secs")]
        budget_secs: Option<u64>,
    },
    /// Cross-check the fast implementations against brute force on one
    /// network; exits nonzero on any failure.
    Verify {
        #[command(flatten)]
        net: NetworkArgs,
        /// Optional basis JSON to validate instead of a freshly built one.
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { net } => cmd_gen(&net),
        Command::Basis { net, out } => cmd_basis(&net, out.as_deref()),
        Command::Run {
            net,
            policy,
            horizon,
            noise,
            mu_max,
            seed,
            out,
            stride,
            budget_secs,
        } => experiment::cmd_run(
            &net.load()?,
            &policy,
            horizon,
            noise,
            mu_max,
            seed,
            out.as_deref(),
            stride,
            Duration::from_secs(budget_secs),
        ),
        Command::Sweep {
            config,
            grid,
            network,
            policy,
            horizons,
            noise,
            mu_max,
            iters,
            seed,
            out,
            jobs,
            stride,
            budget_secs,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => ExperimentConfig::default(),
            };
            if !grid.is_empty() {
                cfg.networks = grid.iter().map(|&p| NetworkChoice::Grid(p)).collect();
            }
            if let Some(file) = network {
                cfg.networks = vec![NetworkChoice::File(file)];
            }
            if !policy.is_empty() {
                cfg.policies = policy;
            }
            if !horizons.is_empty() {
                cfg.horizons = horizons;
            }
            if !noise.is_empty() {
                cfg.noise = noise;
            }
            if let Some(x) = mu_max {
                cfg.mu_max = x;
            }
            if let Some(n) = iters {
                cfg.iterations = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.out = Some(o);
            }
            if let Some(j) = jobs {
                cfg.jobs = Some(j);
            }
            if let Some(s) = stride {
                cfg.stride = s;
            }
            if let Some(b) = budget_secs {
                cfg.budget_secs = b;
            }
            experiment::cmd_sweep(cfg)
        }
        Command::Verify { net, basis, seed } => {
            let (network, p) = net.load()?;
            verify::cmd_verify(&network, p, basis.as_deref(), seed)
        }
    }
}

fn cmd_gen(net_args: &NetworkArgs) -> Result<()> {
    let (net, _) = net_args.load()?;
    let stats = network_stats(&net);
    println!("d (number of links): {}", stats.d);
    println!("d0 (size of basis):  {}", stats.d0);
    println!("paths:               {}", stats.path_count);
    println!("minimum hops:        {}", stats.min_hops);
    println!("maximum hops:        {}", stats.max_hops);
    Ok(())
}

fn cmd_basis(net_args: &NetworkArgs, out: Option<&std::path::Path>) -> Result<()> {
    let (net, _) = net_args.load()?;
    let basis: Basis<f64> = general_basis(&net);
    println!("d0: {}", basis.d0());
    println!("S:  {}", basis.s());
    let hops: Vec<usize> = basis.paths().iter().map(|p| p.hop_count()).collect();
    println!("basis path hops: {hops:?}");
    if let Some(path) = out {
        let file = basis.to_file();
        std::fs::write(path, serde_json::to_string_pretty(&file)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("basis written to {}", path.display());
    }
    Ok(())
}

fn parse_policy(name: &str) -> Result<PolicyKind> {
    name.parse::<PolicyKind>().map_err(|e| anyhow::anyhow!(e))
}
