//! Stochastic environment: instance generation, noisy end-to-end pulls,
//! the round loop, and pseudo-regret accounting.
//!
//! Everything is seeded and value-typed: one run owns its policy, its
//! instance reference, and its noise stream, so concurrent runs need no
//! coordination and identical inputs reproduce identical traces.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::graph::{Network, PathVector, Sense};
use crate::policy::{
    ssp, EcMode, EcPolicy, FixedPolicy, MttcPolicy, OfuPolicy, Policy, PolicyError, PolicyKind,
    RoundFeedback, TsPolicy, TtcPolicy, UniformRandomPolicy, DEFAULT_OFU_CAP,
};
use crate::scalar::Scalar;
use crate::spanner::Basis;

/// Uniqueness threshold of instance generation, relative to `mu_max`.
const UNIQUENESS_TOL: f64 = 1e-6;
const MAX_INSTANCE_ATTEMPTS: usize = 100;

// stream salts keeping instance, noise, and policy randomness independent
const INSTANCE_SALT: u64 = 0x5eed_1057_a61e_0001;
const NOISE_SALT: u64 = 0x0bad_caf3_0000_0001;
const POLICY_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("could not draw an instance with a unique optimum in {0} attempts")]
    DegenerateInstance(usize),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// One problem instance: a network, its hidden mean link delays, the noise
/// scale, and the derived optimum and gaps.
#[derive(Debug, Clone)]
pub struct Instance<F> {
    pub net: Arc<Network>,
    pub mu: Vec<F>,
    pub mu_max: F,
    /// Known sub-Gaussian noise scale `R`.
    pub noise_std: F,
    pub optimal: PathVector,
    pub optimal_value: F,
    pub gap_min: F,
    pub gap_max: F,
    pub seed: u64,
}

/// Draws mean link delays uniformly from `[0, mu_max]` until the optimal
/// path is unique (top-two gap above `1e-6 * mu_max`).
pub fn make_instance<F: Scalar>(
    net: Arc<Network>,
    mu_max: F,
    noise_std: F,
    seed: u64,
) -> Result<Instance<F>, SimError> {
    assert!(mu_max > F::zero());
    assert!(noise_std >= F::zero());
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ INSTANCE_SALT);
    for _ in 0..MAX_INSTANCE_ATTEMPTS {
        let mu: Vec<F> = (0..net.d())
            .map(|_| F::unit_uniform(&mut rng) * mu_max)
            .collect();
        let (optimal, optimal_value) = net.extremal_path(&mu, Sense::Min);
        let (_, worst_value) = net.extremal_path(&mu, Sense::Max);
        let gap_max = worst_value - optimal_value;
        let gap_min = match ssp(&net, &mu, &optimal) {
            Ok((_, second_value)) => second_value - optimal_value,
            // single-path network: trivially unique
            Err(PolicyError::NoSecondPath) => {
                return Ok(Instance {
                    net,
                    mu,
                    mu_max,
                    noise_std,
                    optimal,
                    optimal_value,
                    gap_min: F::zero(),
                    gap_max: F::zero(),
                    seed,
                });
            }
            Err(e) => return Err(e.into()),
        };
        if gap_min < F::of(UNIQUENESS_TOL) * mu_max {
            continue;
        }
        return Ok(Instance {
            net,
            mu,
            mu_max,
            noise_std,
            optimal,
            optimal_value,
            gap_min,
            gap_max,
            seed,
        });
    }
    Err(SimError::DegenerateInstance(MAX_INSTANCE_ATTEMPTS))
}

/// One noisy end-to-end observation: `<a, mu> + eta`, `eta ~ N(0, R^2)`.
pub fn pull<F: Scalar, R: rand::Rng + ?Sized>(
    instance: &Instance<F>,
    path: &PathVector,
    rng: &mut R,
) -> F {
    path.dot(&instance.mu) + instance.noise_std * F::std_normal(rng)
}

/// Round-loop configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub horizon: u64,
    /// Rounds between logged checkpoints.
    pub checkpoint_stride: u64,
    /// Wall-clock budget; exceeding it stops the run and marks the trace.
    pub budget: Option<Duration>,
}

impl RunConfig {
    pub fn new(horizon: u64) -> Self {
        RunConfig {
            horizon,
            checkpoint_stride: 100,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    TimedOut { at_round: u64 },
}

/// Snapshot of the accumulated regret at round `t`. The trajectory hash
/// folds every link index chosen so far, so equal hashes mean equal path
/// sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<F> {
    pub t: u64,
    pub cum_pseudo_regret: F,
    pub cum_realized_regret: F,
    pub traj_hash: u64,
}

/// Full record of one run. Everything except `runtime` is a deterministic
/// function of (policy, instance, seed); `data_fingerprint` hashes exactly
/// that deterministic part.
#[derive(Debug, Clone)]
pub struct RegretTrace<F> {
    pub checkpoints: Vec<Checkpoint<F>>,
    pub final_cum_pseudo_regret: F,
    pub final_cum_realized_regret: F,
    pub rounds_run: u64,
    pub commit_epoch: Option<usize>,
    pub fallback_epoch: Option<usize>,
    pub status: RunStatus,
    pub runtime: Duration,
}

impl<F: Scalar> RegretTrace<F> {
    pub fn time_average_pseudo_regret(&self) -> F {
        if self.rounds_run == 0 {
            return F::zero();
        }
        self.final_cum_pseudo_regret / F::of(self.rounds_run as f64)
    }

    /// Hash of the deterministic run data (wall clock excluded).
    pub fn data_fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        for c in &self.checkpoints {
            h.write_u64(c.t);
            h.write_u64(c.cum_pseudo_regret.to_f64_lossy().to_bits());
            h.write_u64(c.cum_realized_regret.to_f64_lossy().to_bits());
            h.write_u64(c.traj_hash);
        }
        h.write_u64(self.rounds_run);
        h.write_u64(self.commit_epoch.map(|m| m as u64 + 1).unwrap_or(0));
        h.write_u64(self.fallback_epoch.map(|m| m as u64 + 1).unwrap_or(0));
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    fn write_u64(&mut self, x: u64) {
        for b in x.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Header of the checkpoint-trace CSV export.
pub const TRACE_CSV_HEADER: &str =
    "seed,policy,p,d,T,R,t,cum_pseudo_regret,commit_epoch,runtime_ms";

/// Run metadata carried on every trace CSV row.
#[derive(Debug, Clone)]
pub struct TraceMeta<'a, F> {
    pub seed: u64,
    pub policy: &'a str,
    /// Grid side length, when the network is a generated grid.
    pub grid_p: Option<usize>,
    pub d: usize,
    pub horizon: u64,
    pub noise: F,
    /// Rounds per exploration epoch (the basis size), used to place the
    /// commit epoch on the round axis.
    pub epoch_len: usize,
}

/// Serializes a trace as one CSV row per checkpoint. The commit-epoch
/// column fills in from the round at which the commitment takes effect.
/// Every data column is a deterministic function of the run inputs;
/// wall-clock runtime is not, so its column is left empty and the measured
/// value stays on [`RegretTrace::runtime`].
pub fn trace_csv<F: Scalar>(trace: &RegretTrace<F>, meta: &TraceMeta<'_, F>) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "{TRACE_CSV_HEADER}");
    let p_col = meta.grid_p.map(|p| p.to_string()).unwrap_or_default();
    for c in &trace.checkpoints {
        let commit = trace
            .commit_epoch
            .filter(|m| (m * meta.epoch_len) as u64 <= c.t)
            .map(|m| m.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},",
            meta.seed,
            meta.policy,
            p_col,
            meta.d,
            meta.horizon,
            meta.noise,
            c.t,
            c.cum_pseudo_regret,
            commit,
        );
    }
    out
}

/// Drives one policy over one instance for `horizon` rounds, scoring
/// pseudo-regret against the instance optimum. The policy never sees the
/// hidden delays; oracle-assisted configurations receive their extra
/// knowledge explicitly at construction.
pub fn run<F: Scalar>(
    policy: &mut dyn Policy<F>,
    instance: &Instance<F>,
    config: &RunConfig,
    seed: u64,
) -> Result<RegretTrace<F>, SimError> {
    let start = Instant::now();
    let mut noise_rng = ChaCha12Rng::seed_from_u64(seed ^ NOISE_SALT);
    let stride = config.checkpoint_stride.max(1);
    let mut cum_pseudo = F::zero();
    let mut cum_realized = F::zero();
    let mut traj = Fnv::new();
    let mut checkpoints = Vec::new();
    let mut status = RunStatus::Completed;
    let mut rounds_run = 0u64;

    for t in 1..=config.horizon {
        let path = policy.next(t);
        let loss = pull(instance, &path, &mut noise_rng);
        policy.observe(&RoundFeedback {
            t,
            path: path.clone(),
            loss,
        })?;
        let inst_regret = path.dot(&instance.mu) - instance.optimal_value;
        debug_assert!(
            inst_regret >= -F::epsilon() * F::of(64.0) * (F::one() + instance.optimal_value.abs()),
            "negative pseudo-regret increment"
        );
        cum_pseudo = cum_pseudo + inst_regret;
        cum_realized = cum_realized + (loss - instance.optimal_value);
        for &j in path.links() {
            traj.write_u64(j as u64);
        }
        traj.write_u64(u64::MAX); // round separator
        rounds_run = t;
        if t % stride == 0 || t == config.horizon {
            checkpoints.push(Checkpoint {
                t,
                cum_pseudo_regret: cum_pseudo,
                cum_realized_regret: cum_realized,
                traj_hash: traj.finish(),
            });
        }
        if let Some(budget) = config.budget {
            if t % 256 == 0 && start.elapsed() > budget {
                status = RunStatus::TimedOut { at_round: t };
                if t % stride != 0 && t != config.horizon {
                    checkpoints.push(Checkpoint {
                        t,
                        cum_pseudo_regret: cum_pseudo,
                        cum_realized_regret: cum_realized,
                        traj_hash: traj.finish(),
                    });
                }
                break;
            }
        }
    }

    Ok(RegretTrace {
        checkpoints,
        final_cum_pseudo_regret: cum_pseudo,
        final_cum_realized_regret: cum_realized,
        rounds_run,
        commit_epoch: policy.commit_epoch(),
        fallback_epoch: policy.fallback_epoch(),
        status,
        runtime: start.elapsed(),
    })
}

/// Instantiates a policy by kind for the given instance. The gap-aware and
/// always-optimal configurations take their oracle knowledge from the
/// instance; everything else sees only the network, the basis, and `R`.
pub fn build_policy<F: Scalar>(
    kind: PolicyKind,
    instance: &Instance<F>,
    basis: &Basis<F>,
    horizon: u64,
    seed: u64,
) -> Result<Box<dyn Policy<F>>, PolicyError> {
    let net = Arc::clone(&instance.net);
    let r = instance.noise_std;
    let policy_seed = seed ^ POLICY_SALT ^ (kind.name().len() as u64).rotate_left(32);
    Ok(match kind {
        PolicyKind::EcGap => Box::new(EcPolicy::new(
            net,
            basis.clone(),
            EcMode::KnownGap(instance.gap_min),
            horizon,
            r,
        )),
        PolicyKind::EcWorstCase => Box::new(EcPolicy::new(
            net,
            basis.clone(),
            EcMode::WorstCase,
            horizon,
            r,
        )),
        PolicyKind::Ttc => Box::new(TtcPolicy::new(net, basis.clone(), horizon, r)),
        PolicyKind::Mttc => Box::new(MttcPolicy::new(net, basis.clone(), horizon, r, policy_seed)),
        PolicyKind::Ts => Box::new(TsPolicy::new(net, r, policy_seed)),
        PolicyKind::Ofu => Box::new(OfuPolicy::new(&net, r, horizon, DEFAULT_OFU_CAP)?),
        PolicyKind::UniformRandom => Box::new(UniformRandomPolicy::new(
            &net,
            crate::oracle::ORACLE_CAP,
            policy_seed,
        )?),
        PolicyKind::Optimal => Box::new(FixedPolicy::new(instance.optimal.clone())),
    })
}
