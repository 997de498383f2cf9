//! The scheduling POMDP: system state, feasible actions, expected immediate
//! reward, and the exact one-control-slot transition kernel.
//!
//! A control slot spans `K` mini-slots. The server schedules at most one
//! idle channel per slot; the SU transmits on it until the PU returns, so the
//! last transmitted mini-slot is the return variable `k0` and the final
//! fading feedback is the channel's fading state at `k0`. Observation modes:
//!
//! - `Original`: feedback from the scheduled channel only; all other beliefs
//!   evolve `K` blind steps.
//! - `Genie`: feedback from every channel, collected at the scheduled
//!   channel's feedback times (a conceptual full-observation variant).
//!
//! When every channel is busy the only action is [`Action::NoOp`]: zero
//! reward, no feedback in either mode, occupancies and beliefs evolve freely.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fading::{Belief, FadingParams};
use crate::occupancy::{
    k0_distribution, k_step_distribution, post_return_distribution, OccupancyParams,
    OccupancyState, Phase,
};

/// What the spectrum server observes each slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservationMode {
    Original,
    Genie,
}

/// Model dimensions and dynamics parameters.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    /// Number of PU channels (N).
    pub n_channels: usize,
    /// Mini-slots per control slot (K).
    pub minislots: u32,
    /// Per-control-slot discount factor, in (0, 1).
    pub beta: f64,
    /// Horizon length in control slots (m); slots are indexed m down to 1.
    pub horizon: u32,
    pub fading: FadingParams,
    pub occupancy: OccupancyParams,
}

impl ModelConfig {
    pub fn new(
        n_channels: usize,
        minislots: u32,
        beta: f64,
        horizon: u32,
        fading: FadingParams,
        occupancy: OccupancyParams,
    ) -> Result<Self> {
        if n_channels < 1 {
            return Err(Error::InvalidConfig("need at least one channel".into()));
        }
        if minislots < 1 {
            return Err(Error::InvalidConfig(
                "need at least one mini-slot per control slot".into(),
            ));
        }
        if !(beta.is_finite() && 0.0 < beta && beta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "discount factor beta must lie in (0, 1), got {beta}"
            )));
        }
        if horizon < 1 {
            return Err(Error::InvalidConfig("horizon must be >= 1".into()));
        }
        Ok(Self {
            n_channels,
            minislots,
            beta,
            horizon,
            fading,
            occupancy,
        })
    }
}

/// Per-channel slot-start state: observed occupancy plus fading belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelState {
    pub occupancy: OccupancyState,
    pub belief: Belief,
}

/// Slot-start state of the whole system.
///
/// `slot` is the decreasing control-slot index: the process starts at the
/// horizon `m` and ends after slot 1. Kernel successors of a slot-1 state
/// carry `slot = 0` and are only meaningful as continuation arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemState {
    pub channels: Vec<ChannelState>,
    pub slot: u32,
}

impl SystemState {
    pub fn new(channels: Vec<ChannelState>, slot: u32) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidConfig("need at least one channel".into()));
        }
        if slot < 1 {
            return Err(Error::InvalidConfig("slot index must be >= 1".into()));
        }
        Ok(Self { channels, slot })
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }
}

/// A scheduling decision: transmit on one idle channel, or sit the slot out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Schedule(usize),
    NoOp,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Schedule(n) => write!(f, "schedule({n})"),
            Action::NoOp => write!(f, "noop"),
        }
    }
}

/// Feasible actions: one `Schedule` per idle channel in index order, or
/// `[NoOp]` when every channel is busy.
pub fn action_set(state: &SystemState) -> Vec<Action> {
    let schedulable: Vec<Action> = state
        .channels
        .iter()
        .enumerate()
        .filter(|(_, c)| c.occupancy.is_idle())
        .map(|(n, _)| Action::Schedule(n))
        .collect();
    if schedulable.is_empty() {
        vec![Action::NoOp]
    } else {
        schedulable
    }
}

fn validate_action(state: &SystemState, action: Action) -> Result<()> {
    match action {
        Action::NoOp => {
            if state.channels.iter().any(|c| c.occupancy.is_idle()) {
                return Err(Error::InvalidAction(
                    "noop while idle channels are available".into(),
                ));
            }
            Ok(())
        }
        Action::Schedule(n) => {
            let ch = state
                .channels
                .get(n)
                .ok_or_else(|| Error::InvalidAction(format!("channel {n} out of range")))?;
            if !ch.occupancy.is_idle() {
                return Err(Error::ChannelBusy(n));
            }
            Ok(())
        }
    }
}

pub(crate) fn check_initial(cfg: &ModelConfig, initial: &SystemState) -> Result<()> {
    if initial.n_channels() != cfg.n_channels {
        return Err(Error::InvalidConfig(format!(
            "state has {} channels but the model expects {}",
            initial.n_channels(),
            cfg.n_channels
        )));
    }
    if initial.slot != cfg.horizon {
        return Err(Error::InvalidConfig(format!(
            "initial slot index {} must equal the horizon {}",
            initial.slot, cfg.horizon
        )));
    }
    Ok(())
}

/// Expected number of successful SU mini-slots in the current slot.
///
/// For `Schedule(n)` with idle age `x` and slot-start belief `g`:
/// `R = sum_{k=1}^{K} Pr(idle through mini-slot k) * T^{k-1}(g)`,
/// where the survival factor is `prod_{j=1}^{k-1} P_I(x + j)`.
/// `NoOp` earns 0.
pub fn immediate_reward(state: &SystemState, action: Action, cfg: &ModelConfig) -> Result<f64> {
    validate_action(state, action)?;
    let n = match action {
        Action::NoOp => return Ok(0.0),
        Action::Schedule(n) => n,
    };
    let ch = &state.channels[n];
    let x = ch.occupancy.age;
    let mut reward = 0.0;
    let mut survival = 1.0;
    let mut belief = ch.belief;
    for k in 1..=cfg.minislots {
        if k > 1 {
            survival *= cfg
                .occupancy
                .persistence(Phase::Idle, x + u64::from(k - 1));
            belief = belief.one_step();
        }
        reward += survival * belief.value(&cfg.fading);
    }
    Ok(reward)
}

/// Exact distribution over successor slot-start states.
#[derive(Debug, Clone)]
pub struct SlotKernel {
    mode: ObservationMode,
    branches: Vec<(f64, SystemState)>,
}

impl SlotKernel {
    pub fn mode(&self) -> ObservationMode {
        self.mode
    }

    /// Branches sorted by successor state; probabilities are positive and sum to 1.
    pub fn branches(&self) -> &[(f64, SystemState)] {
        &self.branches
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|(p, _)| p).sum()
    }
}

/// Builds the exact one-slot transition kernel for `action` in `state`.
///
/// Scheduled channel: draw `k0`, then the final feedback (Good with
/// probability `T^{k0-1}` of the slot-start belief) fixes the next belief at
/// `T^{K-k0}` of the feedback posterior, while the occupancy follows the
/// post-return law. Unscheduled channels evolve `K` free occupancy steps; in
/// `Genie` mode they also receive a feedback branch at mini-slot `k0`,
/// otherwise their beliefs evolve `K` blind steps. Branches reaching the same
/// successor state are merged.
pub fn slot_kernel(
    state: &SystemState,
    action: Action,
    cfg: &ModelConfig,
    mode: ObservationMode,
) -> Result<SlotKernel> {
    validate_action(state, action)?;
    let k = cfg.minislots;
    let next_slot = state.slot - 1;
    let mut acc: HashMap<SystemState, f64> = HashMap::new();

    match action {
        Action::NoOp => {
            let dists: Vec<Vec<(OccupancyState, f64)>> = state
                .channels
                .iter()
                .map(|c| k_step_distribution(c.occupancy, k, &cfg.occupancy))
                .collect();
            for_each_product(&dists, &mut |occs, prob| {
                let channels = state
                    .channels
                    .iter()
                    .zip(occs)
                    .map(|(c, &occupancy)| ChannelState {
                        occupancy,
                        belief: c.belief.propagate(k),
                    })
                    .collect();
                *acc.entry(SystemState {
                    channels,
                    slot: next_slot,
                })
                .or_insert(0.0) += prob;
            });
        }
        Action::Schedule(a) => {
            let x = state.channels[a].occupancy.age;
            let k0d = k0_distribution(x, k, &cfg.occupancy);
            let unsched: Vec<Vec<(OccupancyState, f64)>> = state
                .channels
                .iter()
                .enumerate()
                .filter(|&(n, _)| n != a)
                .map(|(_, c)| k_step_distribution(c.occupancy, k, &cfg.occupancy))
                .collect();
            for k0 in 1..=k {
                let p_k0 = k0d.prob(k0);
                if p_k0 == 0.0 {
                    continue;
                }
                let sched_occ = post_return_distribution(x, k0, k, &cfg.occupancy);
                let feedback = feedback_branches(state, a, k0, k, cfg, mode);
                for (f_prob, beliefs) in &feedback {
                    for &(s_occ, s_prob) in &sched_occ {
                        for_each_product(&unsched, &mut |occs, u_prob| {
                            let mut others = occs.iter();
                            let channels = (0..state.channels.len())
                                .map(|n| ChannelState {
                                    occupancy: if n == a { s_occ } else { *others.next().unwrap() },
                                    belief: beliefs[n],
                                })
                                .collect();
                            *acc.entry(SystemState {
                                channels,
                                slot: next_slot,
                            })
                            .or_insert(0.0) += p_k0 * f_prob * s_prob * u_prob;
                        });
                    }
                }
            }
        }
    }

    let mut branches: Vec<(f64, SystemState)> =
        acc.into_iter().map(|(s, p)| (p, s)).collect();
    branches.sort_by(|a, b| a.1.cmp(&b.1));
    debug_assert!(
        (branches.iter().map(|(p, _)| p).sum::<f64>() - 1.0).abs() < 1e-9,
        "kernel mass must be 1"
    );
    Ok(SlotKernel { mode, branches })
}

/// All joint feedback outcomes at mini-slot `k0` with the resulting
/// next-slot beliefs for every channel.
fn feedback_branches(
    state: &SystemState,
    scheduled: usize,
    k0: u32,
    k: u32,
    cfg: &ModelConfig,
    mode: ObservationMode,
) -> Vec<(f64, Vec<Belief>)> {
    let steps_after = k - k0;
    match mode {
        ObservationMode::Original => {
            let p_good = state.channels[scheduled]
                .belief
                .propagate(k0 - 1)
                .value(&cfg.fading);
            [true, false]
                .iter()
                .filter_map(|&good| {
                    let prob = if good { p_good } else { 1.0 - p_good };
                    if prob == 0.0 {
                        return None;
                    }
                    let beliefs = state
                        .channels
                        .iter()
                        .enumerate()
                        .map(|(n, c)| {
                            if n == scheduled {
                                Belief::from_feedback(good).propagate(steps_after)
                            } else {
                                c.belief.propagate(k)
                            }
                        })
                        .collect();
                    Some((prob, beliefs))
                })
                .collect()
        }
        ObservationMode::Genie => {
            let per_channel: Vec<Vec<(bool, f64)>> = state
                .channels
                .iter()
                .map(|c| {
                    let p_good = c.belief.propagate(k0 - 1).value(&cfg.fading);
                    [(true, p_good), (false, 1.0 - p_good)]
                        .into_iter()
                        .filter(|&(_, p)| p > 0.0)
                        .collect()
                })
                .collect();
            let mut out = Vec::new();
            for_each_product(&per_channel, &mut |goods, prob| {
                let beliefs = goods
                    .iter()
                    .map(|&good| Belief::from_feedback(good).propagate(steps_after))
                    .collect();
                out.push((prob, beliefs));
            });
            out
        }
    }
}

/// One step of the discounted optimality recursion for a fixed action:
/// immediate reward plus `beta` times the kernel-expected continuation.
pub fn discounted_recursion(
    state: &SystemState,
    action: Action,
    cfg: &ModelConfig,
    mode: ObservationMode,
    continuation: impl Fn(&SystemState) -> f64,
) -> Result<f64> {
    let reward = immediate_reward(state, action, cfg)?;
    let kernel = slot_kernel(state, action, cfg, mode)?;
    let future: f64 = kernel
        .branches()
        .iter()
        .map(|(p, next)| p * continuation(next))
        .sum();
    Ok(reward + cfg.beta * future)
}

/// Calls `f` once per element of the cartesian product of `dists`, with the
/// picked items and their joint probability. An empty slice yields a single
/// call with probability 1.
fn for_each_product<T: Copy>(dists: &[Vec<(T, f64)>], f: &mut impl FnMut(&[T], f64)) {
    fn rec<T: Copy>(
        dists: &[Vec<(T, f64)>],
        i: usize,
        picks: &mut Vec<T>,
        prob: f64,
        f: &mut impl FnMut(&[T], f64),
    ) {
        if i == dists.len() {
            f(picks, prob);
            return;
        }
        for &(item, p) in &dists[i] {
            picks.push(item);
            rec(dists, i + 1, picks, prob * p, f);
            picks.pop();
        }
    }
    let mut picks = Vec::with_capacity(dists.len());
    rec(dists, 0, &mut picks, 1.0, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occupancy::k0_distribution;

    pub(crate) fn test_config(k: u32, horizon: u32) -> ModelConfig {
        ModelConfig::new(
            2,
            k,
            0.9,
            horizon,
            FadingParams::new(0.9, 0.1).unwrap(),
            OccupancyParams::new(1, 1.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    pub(crate) fn channel(occ: OccupancyState, belief: f64) -> ChannelState {
        ChannelState {
            occupancy: occ,
            belief: Belief::anchor(belief).unwrap(),
        }
    }

    #[test]
    fn action_sets() {
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(3), 0.4),
                channel(OccupancyState::busy(1), 0.7),
            ],
            2,
        )
        .unwrap();
        assert_eq!(action_set(&s), vec![Action::Schedule(0)]);

        let all_busy = SystemState::new(
            vec![
                channel(OccupancyState::busy(0), 0.4),
                channel(OccupancyState::busy(5), 0.7),
            ],
            2,
        )
        .unwrap();
        assert_eq!(action_set(&all_busy), vec![Action::NoOp]);

        let all_idle = SystemState::new(
            vec![
                channel(OccupancyState::idle(0), 0.4),
                channel(OccupancyState::idle(5), 0.7),
            ],
            2,
        )
        .unwrap();
        assert_eq!(
            action_set(&all_idle),
            vec![Action::Schedule(0), Action::Schedule(1)]
        );
    }

    #[test]
    fn reward_single_minislot_is_the_belief() {
        let cfg = test_config(1, 1);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(12), 0.7),
                channel(OccupancyState::busy(0), 0.5),
            ],
            1,
        )
        .unwrap();
        let r = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
        assert!((r - 0.7).abs() < 1e-15);
    }

    #[test]
    fn reward_two_minislots_example() {
        // x=5: P_I(6) = 1/7; T(0.7) = 0.66; R = 0.7 + 0.66/7
        let cfg = test_config(2, 1);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(5), 0.7),
                channel(OccupancyState::busy(0), 0.5),
            ],
            1,
        )
        .unwrap();
        let r = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
        let want = 0.7 + 0.66 / 7.0;
        assert!((r - want).abs() < 1e-12, "r={r} want={want}");
    }

    #[test]
    fn reward_forms_agree() {
        // weighted-sum form over k0 equals the survival-product form
        let cfg = test_config(4, 1);
        for x in [0u64, 3, 11] {
            for b in [0.15, 0.4, 0.7, 0.9] {
                let s = SystemState::new(
                    vec![
                        channel(OccupancyState::idle(x), b),
                        channel(OccupancyState::busy(0), 0.5),
                    ],
                    1,
                )
                .unwrap();
                let direct = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
                let k0d = k0_distribution(x, cfg.minislots, &cfg.occupancy);
                let mut weighted = 0.0;
                for z in 1..=cfg.minislots {
                    let mut partial = 0.0;
                    for k in 1..=z {
                        partial += cfg.fading.propagate_value(b, k - 1);
                    }
                    weighted += k0d.prob(z) * partial;
                }
                assert!(
                    (direct - weighted).abs() < 1e-12,
                    "x={x} b={b}: {direct} vs {weighted}"
                );
            }
        }
    }

    #[test]
    fn reward_rejects_busy_and_pays_zero_for_noop() {
        let cfg = test_config(2, 1);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::busy(2), 0.4),
                channel(OccupancyState::busy(0), 0.7),
            ],
            1,
        )
        .unwrap();
        assert!(matches!(
            immediate_reward(&s, Action::Schedule(0), &cfg),
            Err(Error::ChannelBusy(0))
        ));
        assert_eq!(immediate_reward(&s, Action::NoOp, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn reward_monotone_in_age_and_belief() {
        for k in 2u32..=4 {
            let cfg = test_config(k, 1);
            let mut last = f64::INFINITY;
            for x in 0u64..=30 {
                let s = SystemState::new(
                    vec![
                        channel(OccupancyState::idle(x), 0.6),
                        channel(OccupancyState::busy(0), 0.5),
                    ],
                    1,
                )
                .unwrap();
                let r = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
                assert!(r < last, "K={k} x={x}");
                last = r;
            }
        }
        let cfg = test_config(3, 1);
        let mut last = f64::NEG_INFINITY;
        for b in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            let s = SystemState::new(
                vec![
                    channel(OccupancyState::idle(4), b),
                    channel(OccupancyState::busy(0), 0.5),
                ],
                1,
            )
            .unwrap();
            let r = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
            assert!(r > last, "belief={b}");
            last = r;
        }
    }

    #[test]
    fn lowest_age_wins_under_equal_beliefs() {
        let cfg = test_config(3, 1);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(10), 0.6),
                channel(OccupancyState::idle(5), 0.6),
            ],
            1,
        )
        .unwrap();
        let r0 = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
        let r1 = immediate_reward(&s, Action::Schedule(1), &cfg).unwrap();
        assert!(r1 > r0);
    }

    #[test]
    fn single_channel_single_minislot_kernel() {
        let mut cfg = test_config(1, 2);
        cfg.n_channels = 1;
        let x = 4u64;
        let pi = 0.7;
        let s = SystemState::new(vec![channel(OccupancyState::idle(x), pi)], 2).unwrap();
        let kernel = slot_kernel(&s, Action::Schedule(0), &cfg, ObservationMode::Original).unwrap();
        assert_eq!(kernel.branches().len(), 4);
        let p_stay = cfg.occupancy.persistence(Phase::Idle, x + 1);
        let mut seen = 0;
        for (prob, next) in kernel.branches() {
            let ch = next.channels[0];
            assert_eq!(next.slot, 1);
            let feedback_prob = match ch.belief {
                b if b == Belief::from_feedback(true) => pi,
                b if b == Belief::from_feedback(false) => 1.0 - pi,
                other => panic!("unexpected belief {other:?}"),
            };
            let occ_prob = match ch.occupancy {
                o if o == OccupancyState::idle(x + 1) => p_stay,
                o if o == OccupancyState::busy(0) => 1.0 - p_stay,
                other => panic!("unexpected occupancy {other:?}"),
            };
            assert!((prob - feedback_prob * occ_prob).abs() < 1e-12);
            seen += 1;
        }
        assert_eq!(seen, 4);
    }

    #[test]
    fn unscheduled_belief_propagates_blind_in_original_mode() {
        let cfg = test_config(2, 3);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(2), 0.4),
                channel(OccupancyState::idle(7), 0.7),
            ],
            3,
        )
        .unwrap();
        let kernel = slot_kernel(&s, Action::Schedule(0), &cfg, ObservationMode::Original).unwrap();
        let want = Belief::anchor(0.7).unwrap().propagate(cfg.minislots);
        for (_, next) in kernel.branches() {
            assert_eq!(next.channels[1].belief, want);
        }
    }

    #[test]
    fn kernel_mass_and_merging() {
        let cfg = test_config(2, 5);
        for mode in [ObservationMode::Original, ObservationMode::Genie] {
            let s = SystemState::new(
                vec![
                    channel(OccupancyState::idle(3), 0.4),
                    channel(OccupancyState::busy(1), 0.7),
                ],
                5,
            )
            .unwrap();
            let kernel = slot_kernel(&s, Action::Schedule(0), &cfg, mode).unwrap();
            assert!((kernel.total_probability() - 1.0).abs() < 1e-12);
            // branches are unique after merging
            for w in kernel.branches().windows(2) {
                assert!(w[0].1 != w[1].1);
            }
        }
    }

    #[test]
    fn noop_kernel_propagates_everything() {
        let cfg = test_config(2, 4);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::busy(2), 0.4),
                channel(OccupancyState::busy(0), 0.7),
            ],
            4,
        )
        .unwrap();
        for mode in [ObservationMode::Original, ObservationMode::Genie] {
            let kernel = slot_kernel(&s, Action::NoOp, &cfg, mode).unwrap();
            assert!((kernel.total_probability() - 1.0).abs() < 1e-12);
            for (_, next) in kernel.branches() {
                assert_eq!(next.slot, 3);
                assert_eq!(
                    next.channels[0].belief,
                    Belief::anchor(0.4).unwrap().propagate(2)
                );
                assert_eq!(
                    next.channels[1].belief,
                    Belief::anchor(0.7).unwrap().propagate(2)
                );
            }
        }
    }

    #[test]
    fn genie_and_original_share_occupancy_marginals() {
        let cfg = test_config(2, 3);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(6), 0.35),
                channel(OccupancyState::idle(1), 0.8),
            ],
            3,
        )
        .unwrap();
        let mut marginals = Vec::new();
        for mode in [ObservationMode::Original, ObservationMode::Genie] {
            let kernel = slot_kernel(&s, Action::Schedule(1), &cfg, mode).unwrap();
            let mut occ: std::collections::BTreeMap<Vec<OccupancyState>, f64> =
                std::collections::BTreeMap::new();
            let mut sched_belief: std::collections::BTreeMap<Belief, f64> =
                std::collections::BTreeMap::new();
            for (p, next) in kernel.branches() {
                let key: Vec<OccupancyState> =
                    next.channels.iter().map(|c| c.occupancy).collect();
                *occ.entry(key).or_insert(0.0) += p;
                *sched_belief.entry(next.channels[1].belief).or_insert(0.0) += p;
            }
            marginals.push((occ, sched_belief));
        }
        let (occ_a, bel_a) = &marginals[0];
        let (occ_b, bel_b) = &marginals[1];
        assert_eq!(occ_a.len(), occ_b.len());
        for (k, v) in occ_a {
            assert!((v - occ_b[k]).abs() < 1e-12);
        }
        assert_eq!(bel_a.len(), bel_b.len());
        for (k, v) in bel_a {
            assert!((v - bel_b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn recursion_reduces_to_reward_at_the_horizon() {
        let cfg = test_config(2, 1);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(5), 0.7),
                channel(OccupancyState::idle(2), 0.3),
            ],
            1,
        )
        .unwrap();
        let r = immediate_reward(&s, Action::Schedule(0), &cfg).unwrap();
        let v = discounted_recursion(&s, Action::Schedule(0), &cfg, ObservationMode::Original, |_| {
            0.0
        })
        .unwrap();
        assert!((v - r).abs() < 1e-15);

        // beta scales an arbitrary constant continuation by exactly beta
        let v1 =
            discounted_recursion(&s, Action::Schedule(0), &cfg, ObservationMode::Original, |_| {
                1.0
            })
            .unwrap();
        assert!((v1 - (r + cfg.beta)).abs() < 1e-12);

        // beta = 0 collapses the recursion to the immediate reward
        let mut myopic = cfg.clone();
        myopic.beta = 0.0;
        let v0 = discounted_recursion(
            &s,
            Action::Schedule(0),
            &myopic,
            ObservationMode::Original,
            |_| 123.0,
        )
        .unwrap();
        assert!((v0 - r).abs() < 1e-15);
    }

    #[test]
    fn kernel_rejects_invalid_actions() {
        let cfg = test_config(2, 2);
        let s = SystemState::new(
            vec![
                channel(OccupancyState::idle(1), 0.4),
                channel(OccupancyState::busy(0), 0.7),
            ],
            2,
        )
        .unwrap();
        assert!(slot_kernel(&s, Action::Schedule(1), &cfg, ObservationMode::Original).is_err());
        assert!(slot_kernel(&s, Action::NoOp, &cfg, ObservationMode::Original).is_err());
        assert!(slot_kernel(&s, Action::Schedule(5), &cfg, ObservationMode::Original).is_err());
    }
}
