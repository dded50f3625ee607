//! Routing policies behind one contract: explore-then-commit, the top-two
//! comparison scheme with its second-shortest-path subroutine, the
//! horizon-capped variant with a Thompson-sampling fallback, and the TS /
//! optimism baselines.
//!
//! A policy issues one path per round through [`Policy::next`] and digests
//! the observed end-to-end delay through [`Policy::observe`]. Exploration
//! policies issue basis paths in fixed order, one full pass per epoch, and
//! only update state at epoch boundaries; a partial epoch cut off by the
//! horizon never triggers an update.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::estimate::{
    radius_general, radius_identifiable, ConfidenceParams, DesignState, EstimateError,
};
use crate::graph::{GraphError, Network, PathVector, Sense};
use crate::linalg::{cholesky_solve, cholesky_update, solve_lt, Matrix};
use crate::scalar::Scalar;
use crate::spanner::Basis;

/// Default enumeration cap of the optimism baseline; networks beyond it
/// report as not-run.
pub const DEFAULT_OFU_CAP: usize = 5_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("observed path differs from the issued path")]
    PathMismatch,
    #[error("network has no second path")]
    NoSecondPath,
    #[error("path count {count} exceeds policy cap {cap}")]
    CapExceeded { count: u64, cap: usize },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

/// One round of end-to-end feedback.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundFeedback<F> {
    pub t: u64,
    pub path: PathVector,
    pub loss: F,
}

/// The policy contract driven by the simulator round loop.
pub trait Policy<F: Scalar>: Send {
    fn name(&self) -> &'static str;

    /// Path to route in round `t`. Deterministic given the policy state
    /// and its own random stream.
    fn next(&mut self, t: u64) -> PathVector;

    /// Feedback for the round; the path must be the one issued.
    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError>;

    /// Epoch at which the policy committed to a single path, if it has.
    fn commit_epoch(&self) -> Option<usize> {
        None
    }

    /// Epoch at which the policy handed over to its fallback, if it has.
    fn fallback_epoch(&self) -> Option<usize> {
        None
    }

    /// Human-readable configuration warnings accumulated at construction.
    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Second shortest path with respect to `psi`, given the shortest.
///
/// For every link of the shortest path, the link's weight is pushed up by
/// more than the total weight range (`sum |psi| + 1`), the perturbed
/// shortest path is recomputed, and the candidate is scored under the
/// original `psi`. Candidates that still traverse the excluded link have
/// no way around it and are skipped. Ties break lexicographically.
pub fn ssp<F: Scalar>(
    net: &Network,
    psi: &[F],
    shortest: &PathVector,
) -> Result<(PathVector, F), PolicyError> {
    assert_eq!(psi.len(), net.d());
    let bump: F = psi.iter().map(|w| w.abs()).sum::<F>() + F::one();
    let mut perturbed = psi.to_vec();
    let mut best: Option<(PathVector, F)> = None;
    for &j in shortest.links() {
        perturbed[j as usize] = psi[j as usize] + bump;
        let (cand, _) = net.extremal_path(&perturbed, Sense::Min);
        perturbed[j as usize] = psi[j as usize];
        if cand.contains_link(j) {
            continue;
        }
        let val = cand.dot(psi);
        let take = match &best {
            None => true,
            Some((bp, bv)) => val < *bv || (val == *bv && cand < *bp),
        };
        if take {
            best = Some((cand, val));
        }
    }
    best.ok_or(PolicyError::NoSecondPath)
}

/// Issues basis paths in fixed order and folds completed epochs into the
/// design state.
struct EpochExplorer<F> {
    design: DesignState<F>,
    slot: usize,
    pending: Vec<F>,
    expected: Option<PathVector>,
}

impl<F: Scalar> EpochExplorer<F> {
    fn new(basis: Basis<F>) -> Self {
        EpochExplorer {
            design: DesignState::new(basis),
            slot: 0,
            pending: Vec::new(),
            expected: None,
        }
    }

    fn next_path(&mut self) -> PathVector {
        let p = self.design.basis().paths()[self.slot].clone();
        self.expected = Some(p.clone());
        p
    }

    fn check_expected(
        expected: &mut Option<PathVector>,
        fb_path: &PathVector,
    ) -> Result<(), PolicyError> {
        match expected.take() {
            Some(p) if p == *fb_path => Ok(()),
            _ => Err(PolicyError::PathMismatch),
        }
    }

    /// Returns the epoch index when this observation completes an epoch.
    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<Option<usize>, PolicyError> {
        Self::check_expected(&mut self.expected, &fb.path)?;
        self.pending.push(fb.loss);
        self.slot += 1;
        if self.slot == self.design.basis().d0() {
            self.design.record_epoch(&self.pending)?;
            self.pending.clear();
            self.slot = 0;
            Ok(Some(self.design.epochs()))
        } else {
            Ok(None)
        }
    }
}

/// Confidence-radius schedule: the identifiable rule at `delta = T^-2`
/// when the basis spans the link space, otherwise the general rule at
/// `delta = T^-3`.
#[derive(Debug, Clone, Copy)]
struct RadiusRule<F> {
    s: F,
    r: F,
    dim: usize,
    identifiable: bool,
    horizon: u64,
}

impl<F: Scalar> RadiusRule<F> {
    fn from_basis(basis: &Basis<F>, r: F, horizon: u64) -> Self {
        RadiusRule {
            s: basis.s(),
            r,
            dim: basis.d0(),
            identifiable: basis.d0() == basis.dim(),
            horizon,
        }
    }

    fn delta(&self, exponent: i32) -> F {
        let t = (self.horizon.max(2)) as f64;
        F::of(t.powi(-exponent).min(0.5))
    }

    fn radius(&self, m: usize) -> F {
        if self.identifiable {
            let p = ConfidenceParams::new(self.s, self.r, self.dim, self.delta(2));
            radius_identifiable(m, &p)
        } else {
            let p = ConfidenceParams::new(self.s, self.r, self.dim, self.delta(3));
            radius_general(m, &p)
        }
    }
}

/// Gap knowledge available to the explore-then-commit policy.
#[derive(Debug, Clone, Copy)]
pub enum EcMode<F> {
    /// Oracle-assisted: the instance's minimum gap is given.
    KnownGap(F),
    /// Horizon-tuned exploration length.
    WorstCase,
}

/// Explore-then-commit: a fixed number of exploration epochs, then commit
/// to the estimated shortest path forever.
pub struct EcPolicy<F> {
    net: Arc<Network>,
    explorer: EpochExplorer<F>,
    n: usize,
    clamped: bool,
    oracle_assisted: bool,
    committed: Option<PathVector>,
    commit_epoch: Option<usize>,
}

impl<F: Scalar> EcPolicy<F> {
    pub fn new(net: Arc<Network>, basis: Basis<F>, mode: EcMode<F>, horizon: u64, r: F) -> Self {
        let d = net.d() as f64;
        let t = horizon as f64;
        let s = basis.s().to_f64_lossy();
        let rr = r.to_f64_lossy();
        let s2r2 = s * s * rr * rr;
        let raw = match mode {
            EcMode::KnownGap(gap) => {
                let g = gap.to_f64_lossy();
                (16.0 * d * s2r2 * (d * t).ln() + 8.0 * std::f64::consts::LN_2 * d * d * s2r2)
                    / (g * g)
            }
            EcMode::WorstCase => d.powf(-2.0 / 3.0) * t.powf(2.0 / 3.0),
        };
        let mut n = if raw.is_finite() {
            raw.ceil().max(1.0) as usize
        } else {
            usize::MAX
        };
        let d0 = basis.d0();
        let mut clamped = false;
        if (n as u128) * (d0 as u128) > horizon as u128 {
            n = ((horizon as usize) / d0).max(1);
            clamped = true;
        }
        EcPolicy {
            net,
            explorer: EpochExplorer::new(basis),
            n,
            clamped,
            oracle_assisted: matches!(mode, EcMode::KnownGap(_)),
            committed: None,
            commit_epoch: None,
        }
    }

    pub fn exploration_epochs(&self) -> usize {
        self.n
    }

    pub fn was_clamped(&self) -> bool {
        self.clamped
    }
}

impl<F: Scalar> Policy<F> for EcPolicy<F> {
    fn name(&self) -> &'static str {
        "ec"
    }

    fn next(&mut self, _t: u64) -> PathVector {
        match &self.committed {
            Some(p) => {
                self.explorer.expected = Some(p.clone());
                p.clone()
            }
            None => self.explorer.next_path(),
        }
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        if self.committed.is_some() {
            return EpochExplorer::<F>::check_expected(&mut self.explorer.expected, &fb.path);
        }
        if let Some(m) = self.explorer.observe(fb)? {
            if m >= self.n {
                let (best, _) = self
                    .net
                    .extremal_path(self.explorer.design.mu_hat(), Sense::Min);
                self.committed = Some(best);
                self.commit_epoch = Some(m);
            }
        }
        Ok(())
    }

    fn commit_epoch(&self) -> Option<usize> {
        self.commit_epoch
    }

    fn warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.oracle_assisted {
            notes.push(
                "oracle-assisted: exploration length tuned with the instance's true minimum gap"
                    .to_string(),
            );
        }
        if self.clamped {
            notes.push(format!(
                "exploration length clamped to {} epochs to fit the horizon",
                self.n
            ));
        }
        notes
    }
}

/// Per-epoch decision record of the top-two comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochDiagnostic<F> {
    pub m: usize,
    pub estimated_gap: F,
    pub radius: F,
}

/// Top-two comparison: explore the basis in epochs; at each epoch end
/// compare the estimated shortest and second shortest paths, and commit to
/// the shortest once they separate by more than twice the confidence
/// radius. Committing is absorbing.
pub struct TtcPolicy<F> {
    net: Arc<Network>,
    explorer: EpochExplorer<F>,
    rule: RadiusRule<F>,
    committed: Option<PathVector>,
    commit_epoch: Option<usize>,
    diagnostics: Vec<EpochDiagnostic<F>>,
}

impl<F: Scalar> TtcPolicy<F> {
    pub fn new(net: Arc<Network>, basis: Basis<F>, horizon: u64, r: F) -> Self {
        let rule = RadiusRule::from_basis(&basis, r, horizon);
        TtcPolicy {
            net,
            explorer: EpochExplorer::new(basis),
            rule,
            committed: None,
            commit_epoch: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn diagnostics(&self) -> &[EpochDiagnostic<F>] {
        &self.diagnostics
    }

    pub fn committed_path(&self) -> Option<&PathVector> {
        self.committed.as_ref()
    }

    /// Diagnostic prediction of the elimination epoch: the first epoch at
    /// which the confidence radius falls to a quarter of the given gap,
    /// after which any sub-optimal path that far from the optimum is
    /// detected. Not used for control flow.
    pub fn predicted_elimination_epoch(&self, gap: F) -> usize {
        assert!(gap > F::zero());
        let one = self.rule.radius(1);
        // radius(m) = radius(1) / sqrt(m) <= gap / 4
        let m = (F::of(16.0) * one * one / (gap * gap))
            .ceil()
            .to_f64_lossy();
        (m.max(1.0)) as usize
    }

    fn epochs_done(&self) -> usize {
        self.explorer.design.epochs()
    }

    fn epoch_end(&mut self, m: usize) -> Result<(), PolicyError> {
        let mu_hat = self.explorer.design.mu_hat().to_vec();
        let (best, best_v) = self.net.extremal_path(&mu_hat, Sense::Min);
        match ssp(&self.net, &mu_hat, &best) {
            Ok((_, second_v)) => {
                let gap = second_v - best_v;
                let radius = self.rule.radius(m);
                self.diagnostics.push(EpochDiagnostic {
                    m,
                    estimated_gap: gap,
                    radius,
                });
                if gap > F::of(2.0) * radius {
                    self.committed = Some(best);
                    self.commit_epoch = Some(m);
                }
            }
            Err(PolicyError::NoSecondPath) => {
                // one-path network: nothing to compare against
                self.committed = Some(best);
                self.commit_epoch = Some(m);
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

impl<F: Scalar> Policy<F> for TtcPolicy<F> {
    fn name(&self) -> &'static str {
        "ttc"
    }

    fn next(&mut self, _t: u64) -> PathVector {
        match &self.committed {
            Some(p) => {
                self.explorer.expected = Some(p.clone());
                p.clone()
            }
            None => self.explorer.next_path(),
        }
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        if self.committed.is_some() {
            return EpochExplorer::<F>::check_expected(&mut self.explorer.expected, &fb.path);
        }
        if let Some(m) = self.explorer.observe(fb)? {
            self.epoch_end(m)?;
        }
        Ok(())
    }

    fn commit_epoch(&self) -> Option<usize> {
        self.commit_epoch
    }
}

/// Horizon-capped top-two comparison: identical to [`TtcPolicy`] through
/// epoch `n_bar`; if no commitment happened by then, hands every later
/// round to a fresh Thompson-sampling policy.
pub struct MttcPolicy<F> {
    inner: TtcPolicy<F>,
    n_bar: usize,
    fallback: Option<TsPolicy<F>>,
    fallback_epoch: Option<usize>,
    fallback_seed: u64,
    r: F,
}

impl<F: Scalar> MttcPolicy<F> {
    pub fn new(net: Arc<Network>, basis: Basis<F>, horizon: u64, r: F, seed: u64) -> Self {
        let n_bar = Self::exploration_cap(&basis, horizon, r);
        MttcPolicy {
            inner: TtcPolicy::new(net, basis, horizon, r),
            n_bar,
            fallback: None,
            fallback_epoch: None,
            fallback_seed: seed,
            r,
        }
    }

    /// Epoch cap before the fallback takes over.
    pub fn exploration_cap(basis: &Basis<F>, horizon: u64, r: F) -> usize {
        let t = horizon as f64;
        let s = basis.s().to_f64_lossy();
        let rr = r.to_f64_lossy();
        let s2r2 = s * s * rr * rr;
        let ln2 = std::f64::consts::LN_2;
        let raw = if basis.d0() == basis.dim() {
            let d = basis.dim() as f64;
            t.sqrt() * s2r2 * (2.0 * ln2 * d + 8.0 * t.ln()) / (d * d)
        } else {
            let d0 = basis.d0() as f64;
            t.sqrt() * s2r2 * (32.0 * ln2 * d0 + 96.0 * t.ln()) / (d0 * d0)
        };
        if raw.is_finite() {
            raw.ceil().max(1.0) as usize
        } else {
            usize::MAX
        }
    }

    pub fn n_bar(&self) -> usize {
        self.n_bar
    }
}

impl<F: Scalar> Policy<F> for MttcPolicy<F> {
    fn name(&self) -> &'static str {
        "mttc"
    }

    fn next(&mut self, t: u64) -> PathVector {
        match &mut self.fallback {
            Some(ts) => ts.next(t),
            None => self.inner.next(t),
        }
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        if let Some(ts) = &mut self.fallback {
            return ts.observe(fb);
        }
        self.inner.observe(fb)?;
        if self.inner.commit_epoch.is_none() && self.inner.epochs_done() >= self.n_bar {
            self.fallback = Some(TsPolicy::new(
                Arc::clone(&self.inner.net),
                self.r,
                self.fallback_seed,
            ));
            self.fallback_epoch = Some(self.n_bar + 1);
        }
        Ok(())
    }

    fn commit_epoch(&self) -> Option<usize> {
        self.inner.commit_epoch
    }

    fn fallback_epoch(&self) -> Option<usize> {
        self.fallback_epoch
    }
}

/// Thompson sampling with a Gaussian posterior over the link-delay vector:
/// unit-ridge prior, posterior mean from accumulated pulls, and one
/// posterior draw per round fed to the shortest-path oracle.
pub struct TsPolicy<F> {
    net: Arc<Network>,
    chol: Matrix<F>,
    b: Vec<F>,
    scale: F,
    rng: ChaCha12Rng,
    expected: Option<PathVector>,
}

impl<F: Scalar> TsPolicy<F> {
    pub fn new(net: Arc<Network>, r: F, seed: u64) -> Self {
        let scale = r.max(F::of(1e-3));
        Self::with_scale(net, scale, seed)
    }

    /// Explicit posterior sampling scale, for tuning experiments.
    pub fn with_scale(net: Arc<Network>, scale: F, seed: u64) -> Self {
        let d = net.d();
        TsPolicy {
            net,
            chol: Matrix::identity(d),
            b: vec![F::zero(); d],
            scale,
            rng: ChaCha12Rng::seed_from_u64(seed),
            expected: None,
        }
    }
}

impl<F: Scalar> Policy<F> for TsPolicy<F> {
    fn name(&self) -> &'static str {
        "ts"
    }

    fn next(&mut self, _t: u64) -> PathVector {
        let mean = cholesky_solve(&self.chol, &self.b);
        let z: Vec<F> = (0..self.net.d())
            .map(|_| F::std_normal(&mut self.rng))
            .collect();
        let pert = solve_lt(&self.chol, &z);
        let theta: Vec<F> = mean
            .iter()
            .zip(&pert)
            .map(|(&m, &p)| m + self.scale * p)
            .collect();
        let (path, _) = self.net.extremal_path(&theta, Sense::Min);
        self.expected = Some(path.clone());
        path
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        EpochExplorer::<F>::check_expected(&mut self.expected, &fb.path)?;
        let x: Vec<F> = fb.path.coords();
        cholesky_update(&mut self.chol, &x);
        for &j in fb.path.links() {
            self.b[j as usize] = self.b[j as usize] + fb.loss;
        }
        Ok(())
    }
}

/// Enumerative optimism baseline: scores every path by estimated delay
/// minus an exploration bonus and routes the minimizer. Restricted to
/// networks whose path count fits the cap.
pub struct OfuPolicy<F> {
    paths: Vec<PathVector>,
    vinv: Matrix<F>,
    b: Vec<F>,
    obs: u64,
    r: F,
    horizon: u64,
    d: usize,
    expected: Option<PathVector>,
}

impl<F: Scalar> OfuPolicy<F> {
    pub fn new(net: &Network, r: F, horizon: u64, cap: usize) -> Result<Self, PolicyError> {
        let paths = net.enumerate_paths(cap).map_err(|e| match e {
            GraphError::CapExceeded { count, cap } => PolicyError::CapExceeded { count, cap },
            other => panic!("unexpected enumeration failure: {other}"),
        })?;
        Ok(OfuPolicy {
            paths,
            vinv: Matrix::identity(net.d()),
            b: vec![F::zero(); net.d()],
            obs: 0,
            r,
            horizon,
            d: net.d(),
            expected: None,
        })
    }

    fn beta(&self) -> F {
        // R sqrt(d ln((1 + t d / lambda) / delta)) + sqrt(lambda * d),
        // lambda = 1, delta = 1 / T
        let d = self.d as f64;
        let t = self.obs as f64;
        let horizon = self.horizon.max(2) as f64;
        let log_term = ((1.0 + t * d) * horizon).ln();
        self.r * F::of((d * log_term).sqrt()) + F::of(d.sqrt())
    }

    fn weighted_norm(&self, path: &PathVector) -> F {
        // a^T Vinv a over the 0/1 coordinates
        let mut s = F::zero();
        for &i in path.links() {
            for &j in path.links() {
                s = s + self.vinv[(i as usize, j as usize)];
            }
        }
        s.max(F::zero()).sqrt()
    }
}

impl<F: Scalar> Policy<F> for OfuPolicy<F> {
    fn name(&self) -> &'static str {
        "ofu"
    }

    fn next(&mut self, _t: u64) -> PathVector {
        let mu = self.vinv.matvec(&self.b);
        let beta = self.beta();
        let mut best: Option<(usize, F)> = None;
        for (idx, a) in self.paths.iter().enumerate() {
            let score = a.dot(&mu) - beta * self.weighted_norm(a);
            let take = match best {
                None => true,
                Some((_, bs)) => score < bs,
            };
            if take {
                best = Some((idx, score));
            }
        }
        let path = self.paths[best.expect("nonempty path set").0].clone();
        self.expected = Some(path.clone());
        path
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        EpochExplorer::<F>::check_expected(&mut self.expected, &fb.path)?;
        let x: Vec<F> = fb.path.coords();
        // Sherman-Morrison update of Vinv
        let u = self.vinv.matvec(&x);
        let denom = F::one() + x.iter().zip(&u).map(|(&a, &b)| a * b).sum::<F>();
        for i in 0..self.d {
            for j in 0..self.d {
                let delta = u[i] * u[j] / denom;
                self.vinv[(i, j)] = self.vinv[(i, j)] - delta;
            }
        }
        for &j in fb.path.links() {
            self.b[j as usize] = self.b[j as usize] + fb.loss;
        }
        self.obs += 1;
        Ok(())
    }
}

/// Uniform-random baseline over the enumerated path set.
pub struct UniformRandomPolicy {
    paths: Vec<PathVector>,
    rng: ChaCha12Rng,
    expected: Option<PathVector>,
}

impl UniformRandomPolicy {
    pub fn new(net: &Network, cap: usize, seed: u64) -> Result<Self, PolicyError> {
        let paths = net.enumerate_paths(cap).map_err(|e| match e {
            GraphError::CapExceeded { count, cap } => PolicyError::CapExceeded { count, cap },
            other => panic!("unexpected enumeration failure: {other}"),
        })?;
        Ok(UniformRandomPolicy {
            paths,
            rng: ChaCha12Rng::seed_from_u64(seed),
            expected: None,
        })
    }
}

impl<F: Scalar> Policy<F> for UniformRandomPolicy {
    fn name(&self) -> &'static str {
        "uniform-random"
    }

    fn next(&mut self, _t: u64) -> PathVector {
        let idx = self.rng.random_range(0..self.paths.len());
        let path = self.paths[idx].clone();
        self.expected = Some(path.clone());
        path
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        EpochExplorer::<F>::check_expected(&mut self.expected, &fb.path)
    }
}

/// Debug policy that always routes one fixed path.
pub struct FixedPolicy {
    path: PathVector,
}

impl FixedPolicy {
    pub fn new(path: PathVector) -> Self {
        FixedPolicy { path }
    }
}

impl<F: Scalar> Policy<F> for FixedPolicy {
    fn name(&self) -> &'static str {
        "optimal"
    }

    fn next(&mut self, _t: u64) -> PathVector {
        self.path.clone()
    }

    fn observe(&mut self, fb: &RoundFeedback<F>) -> Result<(), PolicyError> {
        if fb.path == self.path {
            Ok(())
        } else {
            Err(PolicyError::PathMismatch)
        }
    }
}

/// Policy selection by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    EcGap,
    EcWorstCase,
    Ttc,
    Mttc,
    Ts,
    Ofu,
    UniformRandom,
    Optimal,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::EcGap,
        PolicyKind::EcWorstCase,
        PolicyKind::Ttc,
        PolicyKind::Mttc,
        PolicyKind::Ts,
        PolicyKind::Ofu,
        PolicyKind::UniformRandom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::EcGap => "ec-gap",
            PolicyKind::EcWorstCase => "ec-worstcase",
            PolicyKind::Ttc => "ttc",
            PolicyKind::Mttc => "mttc",
            PolicyKind::Ts => "ts",
            PolicyKind::Ofu => "ofu",
            PolicyKind::UniformRandom => "uniform-random",
            PolicyKind::Optimal => "optimal",
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ec-gap" => Ok(PolicyKind::EcGap),
            "ec-worstcase" => Ok(PolicyKind::EcWorstCase),
            "ttc" => Ok(PolicyKind::Ttc),
            "mttc" => Ok(PolicyKind::Mttc),
            "ts" => Ok(PolicyKind::Ts),
            "ofu" => Ok(PolicyKind::Ofu),
            "uniform-random" => Ok(PolicyKind::UniformRandom),
            "optimal" => Ok(PolicyKind::Optimal),
            other => Err(format!(
                "unknown policy '{other}' (expected one of ec-gap, ec-worstcase, ttc, mttc, ts, ofu, uniform-random, optimal)"
            )),
        }
    }
}
