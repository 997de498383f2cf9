//! Finite-horizon POMDP scheduling of one secondary user over N primary-user
//! channels whose fading and occupancy are both temporally correlated.
//!
//! The server picks one idle channel per control slot (K mini-slots); the SU
//! transmits there until the PU returns, earning one unit per mini-slot with
//! Good fading, and the resulting feedback drives the belief state for the
//! next decision. The crate provides:
//!
//! - [`fading`]: the two-state fading chain and its exact-key belief algebra;
//! - [`occupancy`]: age-dependent idle/busy persistence and return-time laws;
//! - [`system`]: states, actions, expected reward, and the exact slot kernel
//!   under both observation modes (scheduled-channel-only and genie-aided);
//! - [`policy`]: memoized backward induction, greedy, and randomized
//!   policies with exact evaluation;
//! - [`oracle`]: an independent brute-force enumerator for tiny instances;
//! - [`sim`]: seeded, reproducible Monte Carlo rollouts.

pub mod error;
pub mod fading;
pub mod occupancy;
pub mod oracle;
pub mod policy;
pub mod sim;
pub mod system;

pub use error::{Error, Result};
pub use fading::{Belief, BeliefOrigin, FadingParams, FadingState};
pub use occupancy::{
    conditional_idle_curve, k0_distribution, k_step_distribution, post_return_distribution,
    K0Distribution, OccupancyParams, OccupancyState, Phase,
};
pub use oracle::oracle_value;
pub use policy::{
    evaluate_policy, evaluate_policy_with_states, greedy_action, random_policy_distribution,
    solve_optimal, PolicyKind, PolicySpec, ValueTable,
};
pub use sim::{estimate, run_trajectory, sample_initial_truth, SimConfig, SimCounters, SimResult};
pub use system::{
    action_set, discounted_recursion, immediate_reward, slot_kernel, Action, ChannelState,
    ModelConfig, ObservationMode, SlotKernel, SystemState,
};
