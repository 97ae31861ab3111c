//! Simulated annealing over vertex permutations.
//!
//! The state is a permutation `π`; a move swaps the images of two vertices
//! and the energy change is evaluated incrementally. Proposals come either
//! uniformly at random or from the centrality-guided sampler. Acceptance is
//! Metropolis with a geometric cooling schedule.
//!
//! # Reproducibility
//!
//! Every restart draws from a ChaCha8 generator (`rand_chacha::ChaCha8Rng`)
//! seeded with `seed_from_u64(config.seed)` and switched to stream number
//! `restart`. ChaCha output is platform independent, so a given
//! `(graph, config)` pair always yields the same result.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{delta_unchecked, mismatched_edges, normalized_symmetry, Energy};
use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};
use crate::guidance::{build_similarity, uniform_pair, GuidanceParams, GuidedSampler, SimilarityMatrix};

pub const MAX_DEFAULT_STEPS: u64 = 5_000_000;
pub const DEFAULT_T_MIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MoveStrategy {
    Uniform,
    Guided(GuidanceParams),
}

impl MoveStrategy {
    pub fn guidance(&self) -> Option<&GuidanceParams> {
        match self {
            MoveStrategy::Uniform => None,
            MoveStrategy::Guided(params) => Some(params),
        }
    }
}

/// Annealing parameters. `None` fields are derived from the graph:
/// `steps = min(400 n², 5·10⁶)` and `t_max = max(2, m / 20)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnealConfig {
    pub steps: Option<u64>,
    pub t_max: Option<f64>,
    pub t_min: f64,
    pub move_strategy: MoveStrategy,
    pub restarts: u32,
    pub seed: u64,
    pub forbid_identity: bool,
    pub derangement_only: bool,
    /// Number of evenly spaced `(step, ε)` samples to keep; 0 disables.
    pub trace_points: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            steps: None,
            t_max: None,
            t_min: DEFAULT_T_MIN,
            move_strategy: MoveStrategy::Uniform,
            restarts: 1,
            seed: 0,
            forbid_identity: true,
            derangement_only: false,
            trace_points: 0,
        }
    }
}

/// Geometric cooling from `t_max` to `t_min` over `steps` moves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub steps: u64,
    pub t_max: f64,
    pub t_min: f64,
}

impl Schedule {
    /// `T(k) = t_max · (t_min / t_max)^(k / steps)`.
    pub fn temperature(&self, k: u64) -> f64 {
        self.t_max * (self.t_min / self.t_max).powf(k as f64 / self.steps as f64)
    }

    fn ratio_per_step(&self) -> f64 {
        (self.t_min / self.t_max).powf(1.0 / self.steps as f64)
    }
}

impl AnnealConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_strategy(mut self, strategy: MoveStrategy) -> Self {
        self.move_strategy = strategy;
        self
    }

    pub fn with_restarts(mut self, restarts: u32) -> Self {
        self.restarts = restarts;
        self
    }

    /// Resolves graph-dependent defaults and validates the result.
    pub fn schedule(&self, g: &Graph) -> Result<Schedule> {
        let n = g.n() as u64;
        let steps = self.steps.unwrap_or_else(|| (400 * n * n).min(MAX_DEFAULT_STEPS));
        let t_max = self.t_max.unwrap_or_else(|| (g.edge_count() as f64 / 20.0).max(2.0));
        let schedule = Schedule { steps, t_max, t_min: self.t_min };
        if steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if !(self.t_min > 0.0 && t_max >= self.t_min && t_max.is_finite()) {
            return Err(Error::invalid(format!(
                "temperatures must satisfy t_max >= t_min > 0, got t_max={t_max}, t_min={}",
                self.t_min
            )));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if let Some(params) = self.move_strategy.guidance() {
            params.validate()?;
        }
        Ok(schedule)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealResult {
    pub best_permutation: Permutation,
    pub best_epsilon: u64,
    pub best_s: f64,
    /// Best ε of each restart, in restart order.
    pub restart_bests: Vec<u64>,
    /// `(global step, current ε)` samples, empty unless requested.
    pub energy_trace: Vec<(u64, u64)>,
    pub accepted_moves: u64,
    pub proposed_moves: u64,
    pub wall_time: Duration,
}

impl AnnealResult {
    pub fn energy(&self) -> Energy {
        Energy::new(self.best_epsilon, self.best_permutation.len())
    }
}

/// What happened to a single proposal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepEvent {
    pub restart: u32,
    pub step: u64,
    pub a: usize,
    pub b: usize,
    /// Energy change the move would cause (0 when rejected by a constraint).
    pub delta: i64,
    pub temperature: f64,
    pub accepted: bool,
    /// Rejected because it would create the identity or a fixed point.
    pub forbidden: bool,
}

/// Hook for instrumenting runs.
pub trait StepObserver {
    fn on_step(&mut self, event: &StepEvent);
}

impl StepObserver for () {
    #[inline]
    fn on_step(&mut self, _: &StepEvent) {}
}

impl<F: FnMut(&StepEvent)> StepObserver for F {
    fn on_step(&mut self, event: &StepEvent) {
        self(event)
    }
}

/// Generator used by restart `restart` of a run seeded with `seed`.
pub fn restart_rng(seed: u64, restart: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Runs the annealer, building the similarity matrix for guided moves.
pub fn anneal(g: &Graph, cfg: &AnnealConfig) -> Result<AnnealResult> {
    let sim = match cfg.move_strategy.guidance() {
        Some(params) => Some(build_similarity(&params.centrality.compute(g)?, params.beta)?),
        None => None,
    };
    anneal_with(g, cfg, sim.as_ref(), &mut ())
}

/// Runs the annealer with a precomputed similarity matrix (required when the
/// strategy is guided, ignored otherwise) and a step observer.
pub fn anneal_with<O: StepObserver>(
    g: &Graph,
    cfg: &AnnealConfig,
    sim: Option<&SimilarityMatrix>,
    observer: &mut O,
) -> Result<AnnealResult> {
    let started = Instant::now();
    let n = g.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let schedule = cfg.schedule(g)?;
    let mut sampler = match (&cfg.move_strategy, sim) {
        (MoveStrategy::Uniform, _) => None,
        (MoveStrategy::Guided(params), Some(sim)) => {
            if sim.n() != n {
                return Err(Error::DimensionMismatch { graph: n, perm: sim.n() });
            }
            Some(GuidedSampler::new(sim, params.phi))
        }
        (MoveStrategy::Guided(_), None) => return Err(Error::invalid("guided strategy needs a similarity matrix")),
    };

    let trace_every = match cfg.trace_points {
        0 => u64::MAX,
        k => (schedule.steps / k as u64).max(1),
    };
    let ratio = schedule.ratio_per_step();
    let mut trace = Vec::new();
    let mut restart_bests = Vec::with_capacity(cfg.restarts as usize);
    let mut best: Option<(u64, Permutation)> = None;
    let mut accepted = 0u64;
    let mut proposed = 0u64;

    for restart in 0..cfg.restarts {
        let mut rng = restart_rng(cfg.seed, restart);
        let mut perm = initial_permutation(n, cfg, &mut rng);
        if let Some(s) = sampler.as_mut() {
            s.reset(perm.as_slice());
        }
        let mut eps = mismatched_edges(g, perm.as_slice());
        let mut fixed = perm.fixed_points();
        let mut run_best = eps;
        let mut run_best_perm = perm.clone();
        let mut temperature = schedule.t_max;

        for step in 0..schedule.steps {
            if run_best == 0 {
                break;
            }
            if step % trace_every == 0 {
                trace.push((restart as u64 * schedule.steps + step, eps));
            }
            proposed += 1;
            let (a, b) = match sampler.as_mut() {
                Some(s) => s.propose(perm.as_slice(), &mut rng),
                None => uniform_pair(n, &mut rng),
            };
            let (pa, pb) = (perm.image(a), perm.image(b));
            let fixed_after = (pb == a) as usize + (pa == b) as usize;
            let new_fixed = fixed - (pa == a) as usize - (pb == b) as usize + fixed_after;
            let forbidden = (cfg.forbid_identity && new_fixed == n) || (cfg.derangement_only && fixed_after > 0);

            let mut event = StepEvent { restart, step, a, b, delta: 0, temperature, accepted: false, forbidden };
            if !forbidden {
                let delta = delta_unchecked(g, perm.as_slice(), a, b);
                event.delta = delta;
                event.accepted = delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp();
                if event.accepted {
                    perm.transpose_unchecked(a, b);
                    if let Some(s) = sampler.as_mut() {
                        s.swapped(perm.as_slice(), a, b);
                    }
                    eps = (eps as i64 + delta) as u64;
                    fixed = new_fixed;
                    accepted += 1;
                    if eps < run_best {
                        run_best = eps;
                        run_best_perm.clone_from(&perm);
                    }
                }
            }
            observer.on_step(&event);
            temperature *= ratio;
        }

        restart_bests.push(run_best);
        let improves = best.as_ref().map_or(true, |(e, _)| run_best < *e);
        if improves {
            best = Some((run_best, run_best_perm));
        }
        if run_best == 0 {
            break;
        }
    }

    let (best_epsilon, best_permutation) = best.expect("at least one restart ran");
    debug_assert_eq!(mismatched_edges(g, best_permutation.as_slice()), best_epsilon);
    let best_s = normalized_symmetry(Energy::new(best_epsilon, n))?;
    Ok(AnnealResult {
        best_permutation,
        best_epsilon,
        best_s,
        restart_bests,
        energy_trace: trace,
        accepted_moves: accepted,
        proposed_moves: proposed,
        wall_time: started.elapsed(),
    })
}

/// Uniform random start: a derangement when required, otherwise anything
/// but the identity (unless the identity is allowed).
fn initial_permutation<R: Rng + ?Sized>(n: usize, cfg: &AnnealConfig, rng: &mut R) -> Permutation {
    let mut forward: Vec<usize> = (0..n).collect();
    loop {
        forward.shuffle(rng);
        let fixed = forward.iter().enumerate().filter(|&(i, &v)| i == v).count();
        let ok = if cfg.derangement_only { fixed == 0 } else { !(cfg.forbid_identity && fixed == n) };
        if ok {
            return Permutation::from_forward(forward).expect("shuffle yields a permutation");
        }
    }
}
