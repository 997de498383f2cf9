//! Seeded Monte Carlo simulation of ground-truth trajectories.
//!
//! The simulator tracks the true fading state of every channel every
//! mini-slot (the server never sees the unobserved ones) alongside the
//! server's belief state, which drives the policy. Each trajectory draws from
//! its own ChaCha stream derived from `(seed, trajectory index)`, so results
//! are bitwise reproducible regardless of execution order; the estimate
//! reduces trajectory rewards in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::fading::{Belief, FadingState};
use crate::occupancy::OccupancyState;
use crate::policy::{greedy_action, solve_optimal, PolicyKind, PolicySpec, ValueTable};
use crate::system::{
    action_set, check_initial, Action, ChannelState, ModelConfig, ObservationMode, SystemState,
};

/// A Monte Carlo run: how many trajectories of which instance under which policy.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub trajectories: u64,
    pub seed: u64,
    pub model: ModelConfig,
    pub initial: SystemState,
    pub policy: PolicySpec,
}

/// Aggregate event counters across simulated slots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimCounters {
    /// Slots in which a channel was scheduled.
    pub scheduled_slots: u64,
    /// Slots sat out because every channel was busy.
    pub noop_slots: u64,
    /// Scheduled slots cut short by a PU return.
    pub collision_slots: u64,
    /// Mini-slots in which the SU transmitted.
    pub transmitted_minislots: u64,
    /// Transmitted mini-slots with Good fading (one reward unit each).
    pub successful_minislots: u64,
}

impl SimCounters {
    fn absorb(&mut self, other: &SimCounters) {
        self.scheduled_slots += other.scheduled_slots;
        self.noop_slots += other.noop_slots;
        self.collision_slots += other.collision_slots;
        self.transmitted_minislots += other.transmitted_minislots;
        self.successful_minislots += other.successful_minislots;
    }
}

/// Sample mean and standard error of the discounted reward.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    /// Set when `n = 1`, where the standard error is reported as 0.
    pub degenerate_sample: bool,
    pub counters: SimCounters,
}

/// Ground truth consistent with the observable state: fading drawn from each
/// channel's belief, occupancy copied (it is fully observed at slot starts).
pub fn sample_initial_truth<R: Rng + ?Sized>(
    initial: &SystemState,
    cfg: &ModelConfig,
    rng: &mut R,
) -> Vec<(FadingState, OccupancyState)> {
    initial
        .channels
        .iter()
        .map(|c| {
            (
                FadingState::sample(c.belief.value(&cfg.fading), rng),
                c.occupancy,
            )
        })
        .collect()
}

/// Mean discounted reward with standard error over `trajectories` runs.
///
/// Bitwise reproducible for a fixed `(seed, trajectories)`: trajectory `i`
/// draws only from its own stream and the reduction is ordered by index.
pub fn estimate(sim: &SimConfig) -> Result<SimResult> {
    validate(sim)?;
    let table = optimal_table(sim)?;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut counters = SimCounters::default();
    for index in 0..sim.trajectories {
        let (reward, traj_counters) = simulate_trajectory(sim, table.as_ref(), index)?;
        counters.absorb(&traj_counters);
        // Welford, in index order
        let count = (index + 1) as f64;
        let delta = reward - mean;
        mean += delta / count;
        m2 += delta * (reward - mean);
    }
    let n = sim.trajectories;
    let (std_error, degenerate_sample) = if n > 1 {
        let variance = m2 / (n as f64 - 1.0);
        ((variance / n as f64).sqrt(), false)
    } else {
        (0.0, true)
    };
    Ok(SimResult {
        mean,
        std_error,
        n,
        degenerate_sample,
        counters,
    })
}

/// Discounted reward of one trajectory; fully determined by `(seed, index)`.
///
/// Convenience entry point that re-solves the optimal table on demand;
/// [`estimate`] solves it once for the whole run.
pub fn run_trajectory(sim: &SimConfig, index: u64) -> Result<f64> {
    validate(sim)?;
    let table = optimal_table(sim)?;
    simulate_trajectory(sim, table.as_ref(), index).map(|(reward, _)| reward)
}

fn validate(sim: &SimConfig) -> Result<()> {
    if sim.trajectories < 1 {
        return Err(Error::InvalidConfig(
            "need at least one trajectory".into(),
        ));
    }
    check_initial(&sim.model, &sim.initial)
}

fn optimal_table(sim: &SimConfig) -> Result<Option<ValueTable>> {
    match sim.policy.kind {
        PolicyKind::Optimal => {
            let (_, table) = solve_optimal(&sim.model, &sim.initial, sim.policy.mode)?;
            Ok(Some(table))
        }
        _ => Ok(None),
    }
}

fn trajectory_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn simulate_trajectory(
    sim: &SimConfig,
    table: Option<&ValueTable>,
    index: u64,
) -> Result<(f64, SimCounters)> {
    let cfg = &sim.model;
    let k = cfg.minislots;
    let mut rng = trajectory_rng(sim.seed, index);

    let truth = sample_initial_truth(&sim.initial, cfg, &mut rng);
    let mut fading: Vec<FadingState> = truth.iter().map(|&(f, _)| f).collect();
    let mut occupancy: Vec<OccupancyState> = truth.iter().map(|&(_, o)| o).collect();
    let mut beliefs: Vec<Belief> = sim.initial.channels.iter().map(|c| c.belief).collect();

    let mut counters = SimCounters::default();
    let mut total = 0.0;
    let mut feedback_snapshot: Vec<FadingState> = fading.clone();

    for slot in (1..=cfg.horizon).rev() {
        let observable = SystemState {
            channels: occupancy
                .iter()
                .zip(&beliefs)
                .map(|(&occ, &belief)| ChannelState {
                    occupancy: occ,
                    belief,
                })
                .collect(),
            slot,
        };
        let action = choose_action(sim.policy, cfg, &observable, table, &mut rng)?;

        let mut slot_reward = 0u64;
        let mut transmitting = matches!(action, Action::Schedule(_));
        let mut k0 = 0u32;
        for mini in 1..=k {
            if let Action::Schedule(a) = action {
                if transmitting {
                    // the SU transmits only while the channel has stayed idle
                    assert!(
                        occupancy[a].is_idle(),
                        "SU must never transmit on a busy channel"
                    );
                    counters.transmitted_minislots += 1;
                    if fading[a].is_good() {
                        slot_reward += 1;
                        counters.successful_minislots += 1;
                    }
                    k0 = mini;
                    feedback_snapshot.copy_from_slice(&fading);
                }
            }
            for n in 0..occupancy.len() {
                occupancy[n] = occupancy[n].step(&cfg.occupancy, &mut rng);
                fading[n] = fading[n].step(&cfg.fading, &mut rng);
            }
            if let Action::Schedule(a) = action {
                // once the PU returns, transmission stays suspended for the slot
                if transmitting && !occupancy[a].is_idle() {
                    transmitting = false;
                }
            }
        }

        match action {
            Action::NoOp => {
                counters.noop_slots += 1;
                for belief in &mut beliefs {
                    *belief = belief.propagate(k);
                }
            }
            Action::Schedule(a) => {
                counters.scheduled_slots += 1;
                assert!(k0 >= 1, "a scheduled channel is idle at mini-slot 1");
                if k0 < k {
                    counters.collision_slots += 1;
                }
                let steps_after = k - k0;
                for (n, belief) in beliefs.iter_mut().enumerate() {
                    let observed = match sim.policy.mode {
                        ObservationMode::Original => n == a,
                        ObservationMode::Genie => true,
                    };
                    *belief = if observed {
                        Belief::from_feedback(feedback_snapshot[n].is_good())
                            .propagate(steps_after)
                    } else {
                        belief.propagate(k)
                    };
                }
            }
        }

        total += cfg.beta.powi((cfg.horizon - slot) as i32) * slot_reward as f64;
    }
    Ok((total, counters))
}

fn choose_action<R: Rng + ?Sized>(
    policy: PolicySpec,
    cfg: &ModelConfig,
    observable: &SystemState,
    table: Option<&ValueTable>,
    rng: &mut R,
) -> Result<Action> {
    match policy.kind {
        PolicyKind::Greedy => greedy_action(observable, cfg),
        PolicyKind::Randomized => {
            let actions = action_set(observable);
            Ok(actions[rng.random_range(0..actions.len())])
        }
        PolicyKind::Optimal => table
            .expect("estimate solves the table for optimal runs")
            .best_action(observable)
            .ok_or_else(|| {
                Error::InvalidConfig(
                    "simulated state missing from the value table; initial state and model must \
                     match the solved instance"
                        .into(),
                )
            }),
    }
}
