//! Exact finite-horizon solvers and policy evaluation.
//!
//! Backward induction is memoized over the reachable state graph. States
//! memoize exactly because beliefs are `(origin, steps)` keys and ages are
//! integers; no discretization or rounding is ever applied, so the dynamic
//! program is exact over the finite reachable set. Equal-value action ties
//! break toward the lowest channel index everywhere.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::system::{
    action_set, check_initial, immediate_reward, slot_kernel, Action, ModelConfig,
    ObservationMode, SystemState,
};

/// Which scheduling rule to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Optimal,
    Greedy,
    Randomized,
}

/// Policy plus the observation mode it runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub mode: ObservationMode,
}

/// Memoized value and maximizing action for every reachable state.
#[derive(Debug, Default)]
pub struct ValueTable {
    entries: HashMap<SystemState, (f64, Action)>,
}

impl ValueTable {
    pub fn value(&self, state: &SystemState) -> Option<f64> {
        self.entries.get(state).map(|&(v, _)| v)
    }

    pub fn best_action(&self, state: &SystemState) -> Option<Action> {
        self.entries.get(state).map(|&(_, a)| a)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Cap on memoized states; beyond this the instance is rejected rather than
/// ground through.
pub const STATE_GUARD: usize = 2_000_000;

/// Cap on the branch count of a single kernel expansion.
const KERNEL_BRANCH_GUARD: f64 = 1e7;

/// Cheap a-priori rejection of instances whose single-slot kernels already
/// explode; exact sizes are still enforced dynamically by [`STATE_GUARD`].
fn guard_kernel_bound(cfg: &ModelConfig, mode: ObservationMode) -> Result<()> {
    let n = cfg.n_channels as f64;
    let k = f64::from(cfg.minislots);
    let feedback = match mode {
        ObservationMode::Original => 2.0,
        ObservationMode::Genie => 2f64.powf(n),
    };
    // k0 choices x feedback combinations x scheduled occupancy x unscheduled products
    let bound = k * feedback * (k + 1.0) * (2.0 * k + 2.0).powf(n - 1.0);
    if !bound.is_finite() || bound > KERNEL_BRANCH_GUARD {
        return Err(Error::InstanceTooLarge(format!(
            "single-slot kernel bound {bound:.3e} exceeds {KERNEL_BRANCH_GUARD:.0e} \
             (N={}, K={})",
            cfg.n_channels, cfg.minislots
        )));
    }
    Ok(())
}

fn guard_states(count: usize) -> Result<()> {
    if count >= STATE_GUARD {
        return Err(Error::InstanceTooLarge(format!(
            "reachable state count exceeded {STATE_GUARD}"
        )));
    }
    Ok(())
}

/// Optimal value and the full value table, by memoized backward induction
/// over the states reachable from `initial` (which must sit at the horizon).
pub fn solve_optimal(
    cfg: &ModelConfig,
    initial: &SystemState,
    mode: ObservationMode,
) -> Result<(f64, ValueTable)> {
    check_initial(cfg, initial)?;
    guard_kernel_bound(cfg, mode)?;
    let mut table = ValueTable::default();
    let value = solve_state(cfg, initial, mode, &mut table)?;
    Ok((value, table))
}

fn solve_state(
    cfg: &ModelConfig,
    state: &SystemState,
    mode: ObservationMode,
    table: &mut ValueTable,
) -> Result<f64> {
    if let Some(&(v, _)) = table.entries.get(state) {
        return Ok(v);
    }
    let mut best: Option<(f64, Action)> = None;
    for action in action_set(state) {
        let mut q = immediate_reward(state, action, cfg)?;
        if state.slot > 1 {
            let kernel = slot_kernel(state, action, cfg, mode)?;
            let mut future = 0.0;
            for (p, next) in kernel.branches() {
                future += p * solve_state(cfg, next, mode, table)?;
            }
            q += cfg.beta * future;
        }
        best = match best {
            Some((v, _)) if q <= v => best,
            _ => Some((q, action)),
        };
    }
    let (value, action) = best.expect("action_set is never empty");
    guard_states(table.entries.len())?;
    table.entries.insert(state.clone(), (value, action));
    Ok(value)
}

/// One-slot lookahead maximizer of the expected immediate reward.
pub fn greedy_action(state: &SystemState, cfg: &ModelConfig) -> Result<Action> {
    let mut best: Option<(f64, Action)> = None;
    for action in action_set(state) {
        let r = immediate_reward(state, action, cfg)?;
        best = match best {
            Some((v, _)) if r <= v => best,
            _ => Some((r, action)),
        };
    }
    Ok(best.expect("action_set is never empty").1)
}

/// Uniform distribution over the idle channels, or `NoOp` with certainty.
pub fn random_policy_distribution(state: &SystemState) -> Vec<(Action, f64)> {
    let actions = action_set(state);
    let p = 1.0 / actions.len() as f64;
    actions.into_iter().map(|a| (a, p)).collect()
}

/// Exact expected discounted reward of a policy from `initial`.
///
/// `Optimal` delegates to [`solve_optimal`]; `Greedy` follows the
/// immediate-reward argmax; `Randomized` takes the exact expectation over the
/// uniform idle-channel choice rather than sampling.
pub fn evaluate_policy(spec: PolicySpec, cfg: &ModelConfig, initial: &SystemState) -> Result<f64> {
    evaluate_policy_with_states(spec, cfg, initial).map(|(v, _)| v)
}

/// Like [`evaluate_policy`], also reporting how many distinct states the
/// evaluation touched.
pub fn evaluate_policy_with_states(
    spec: PolicySpec,
    cfg: &ModelConfig,
    initial: &SystemState,
) -> Result<(f64, usize)> {
    check_initial(cfg, initial)?;
    match spec.kind {
        PolicyKind::Optimal => {
            solve_optimal(cfg, initial, spec.mode).map(|(v, table)| (v, table.len()))
        }
        PolicyKind::Greedy | PolicyKind::Randomized => {
            guard_kernel_bound(cfg, spec.mode)?;
            let mut memo: HashMap<SystemState, f64> = HashMap::new();
            let value = eval_state(spec, cfg, initial, &mut memo)?;
            Ok((value, memo.len()))
        }
    }
}

fn eval_state(
    spec: PolicySpec,
    cfg: &ModelConfig,
    state: &SystemState,
    memo: &mut HashMap<SystemState, f64>,
) -> Result<f64> {
    if let Some(&v) = memo.get(state) {
        return Ok(v);
    }
    let value = match spec.kind {
        PolicyKind::Greedy => {
            let action = greedy_action(state, cfg)?;
            eval_q(spec, cfg, state, action, memo)?
        }
        PolicyKind::Randomized => {
            let mut value = 0.0;
            for (action, prob) in random_policy_distribution(state) {
                value += prob * eval_q(spec, cfg, state, action, memo)?;
            }
            value
        }
        PolicyKind::Optimal => unreachable!("optimal evaluation goes through solve_optimal"),
    };
    guard_states(memo.len())?;
    memo.insert(state.clone(), value);
    Ok(value)
}

fn eval_q(
    spec: PolicySpec,
    cfg: &ModelConfig,
    state: &SystemState,
    action: Action,
    memo: &mut HashMap<SystemState, f64>,
) -> Result<f64> {
    let mut q = immediate_reward(state, action, cfg)?;
    if state.slot > 1 {
        let kernel = slot_kernel(state, action, cfg, spec.mode)?;
        let mut future = 0.0;
        for (p, next) in kernel.branches() {
            future += p * eval_state(spec, cfg, next, memo)?;
        }
        q += cfg.beta * future;
    }
    Ok(q)
}
