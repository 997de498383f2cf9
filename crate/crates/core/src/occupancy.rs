//! Age-dependent primary-user occupancy process.
//!
//! A channel is Idle or Busy; its age counts the consecutive mini-slots
//! immediately preceding the current one spent in the same phase. The
//! probability of persisting one more mini-slot decays polynomially in the
//! age:
//!
//! ```text
//! P_I(x) = 1 / (x^u + C_I),    P_B(x) = 1 / (x^u + C_B),    x >= 1
//! ```
//!
//! so occupancy memory is long but weakens with age. A channel that has just
//! switched phase has age 0 and its first persistence draw uses age 1. The
//! one-mini-slot semi-Markov step defined here is the unique process whose
//! survival products reproduce the within-slot return-time distribution
//! [`k0_distribution`] exactly.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};

/// Parameters of the occupancy persistence laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancyParams {
    exponent: u32,
    c_idle: f64,
    c_busy: f64,
}

impl OccupancyParams {
    /// Requires `u >= 1` and positive normalizing constants.
    pub fn new(exponent: u32, c_idle: f64, c_busy: f64) -> Result<Self> {
        if exponent < 1 {
            return Err(Error::InvalidOccupancyParams(format!(
                "exponent u must be >= 1 (got {exponent})"
            )));
        }
        if !(c_idle.is_finite() && c_idle > 0.0) {
            return Err(Error::InvalidOccupancyParams(format!(
                "C_I must be a positive real (got {c_idle})"
            )));
        }
        if !(c_busy.is_finite() && c_busy > 0.0) {
            return Err(Error::InvalidOccupancyParams(format!(
                "C_B must be a positive real (got {c_busy})"
            )));
        }
        Ok(Self {
            exponent,
            c_idle,
            c_busy,
        })
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn c_idle(&self) -> f64 {
        self.c_idle
    }

    pub fn c_busy(&self) -> f64 {
        self.c_busy
    }

    /// `P_I(x) = 1 / (x^u + C_I)`, defined for `x >= 1`.
    pub fn idle_persistence(&self, x: u64) -> Result<f64> {
        self.check_age(x)?;
        Ok(self.persistence(Phase::Idle, x))
    }

    /// `P_B(x) = 1 / (x^u + C_B)`, defined for `x >= 1`.
    pub fn busy_persistence(&self, x: u64) -> Result<f64> {
        self.check_age(x)?;
        Ok(self.persistence(Phase::Busy, x))
    }

    fn check_age(&self, x: u64) -> Result<()> {
        if x < 1 {
            return Err(Error::AgeOutOfDomain(x));
        }
        Ok(())
    }

    /// Persistence probability for the given phase; callers guarantee `x >= 1`.
    pub(crate) fn persistence(&self, phase: Phase, x: u64) -> f64 {
        debug_assert!(x >= 1, "persistence argument must be >= 1");
        let c = match phase {
            Phase::Idle => self.c_idle,
            Phase::Busy => self.c_busy,
        };
        1.0 / ((x as f64).powi(self.exponent as i32) + c)
    }
}

/// Idle/Busy phase of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Idle,
    Busy,
}

impl Phase {
    pub fn other(self) -> Phase {
        match self {
            Phase::Idle => Phase::Busy,
            Phase::Busy => Phase::Idle,
        }
    }
}

/// Phase plus the age counting preceding same-phase mini-slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupancyState {
    pub phase: Phase,
    pub age: u64,
}

impl OccupancyState {
    pub fn idle(age: u64) -> Self {
        Self {
            phase: Phase::Idle,
            age,
        }
    }

    pub fn busy(age: u64) -> Self {
        Self {
            phase: Phase::Busy,
            age,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.phase == Phase::Idle
    }

    /// One mini-slot transition: persist with probability `P(age + 1)` and
    /// grow one mini-slot older, otherwise flip phase with the age reset to 0.
    pub fn step<R: Rng + ?Sized>(self, params: &OccupancyParams, rng: &mut R) -> Self {
        let stay = params.persistence(self.phase, self.age + 1);
        if rng.random_bool(stay) {
            Self {
                phase: self.phase,
                age: self.age + 1,
            }
        } else {
            Self {
                phase: self.phase.other(),
                age: 0,
            }
        }
    }
}

/// Distribution of the last continuously idle mini-slot within a control slot.
#[derive(Debug, Clone, PartialEq)]
pub struct K0Distribution {
    probs: Vec<f64>,
}

impl K0Distribution {
    /// `Pr(k0 = z)` for `z` in `1..=K`.
    pub fn prob(&self, z: u32) -> f64 {
        self.probs[(z - 1) as usize]
    }

    pub fn minislots(&self) -> u32 {
        self.probs.len() as u32
    }

    /// Probabilities indexed by `z - 1`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Distribution of k0, the latest mini-slot of the current slot before the PU
/// returns on a channel that starts the slot idle with idle age `idle_age`.
///
/// `Pr(k0 = z)` is the probability of surviving idle through mini-slot `z`
/// and (for `z < K`) going busy at `z + 1`; `k0 = K` means the channel stayed
/// idle for the whole slot. For `K = 1` the distribution is degenerate at 1.
pub fn k0_distribution(idle_age: u64, minislots: u32, params: &OccupancyParams) -> K0Distribution {
    assert!(minislots >= 1, "a control slot has at least one mini-slot");
    let mut probs = Vec::with_capacity(minislots as usize);
    let mut survival = 1.0; // Pr(idle through mini-slot z)
    for z in 1..=minislots {
        if z == minislots {
            probs.push(survival);
        } else {
            let stay = params.persistence(Phase::Idle, idle_age + u64::from(z));
            probs.push(survival * (1.0 - stay));
            survival *= stay;
        }
    }
    K0Distribution { probs }
}

/// Exact occupancy distribution after `steps` mini-slot transitions.
pub fn k_step_distribution(
    occ: OccupancyState,
    steps: u32,
    params: &OccupancyParams,
) -> Vec<(OccupancyState, f64)> {
    let mut dist: BTreeMap<OccupancyState, f64> = BTreeMap::new();
    dist.insert(occ, 1.0);
    for _ in 0..steps {
        let mut next: BTreeMap<OccupancyState, f64> = BTreeMap::new();
        for (state, prob) in dist {
            let stay = params.persistence(state.phase, state.age + 1);
            *next
                .entry(OccupancyState {
                    phase: state.phase,
                    age: state.age + 1,
                })
                .or_insert(0.0) += prob * stay;
            *next
                .entry(OccupancyState {
                    phase: state.phase.other(),
                    age: 0,
                })
                .or_insert(0.0) += prob * (1.0 - stay);
        }
        dist = next;
    }
    dist.into_iter().collect()
}

/// Slot-boundary occupancy of the scheduled channel, conditional on the PU
/// return time `k0` within a slot of `minislots` mini-slots.
///
/// `k0 = K` means the channel survived the whole slot idle, so the next
/// slot start is one more persistence draw away; otherwise the channel is
/// Busy with age 0 at mini-slot `k0 + 1` and evolves the remaining
/// `K - k0` mini-slots freely.
pub fn post_return_distribution(
    idle_age: u64,
    k0: u32,
    minislots: u32,
    params: &OccupancyParams,
) -> Vec<(OccupancyState, f64)> {
    assert!(
        (1..=minislots).contains(&k0),
        "k0 must lie in 1..=K (got {k0} with K={minislots})"
    );
    if k0 == minislots {
        let survived_age = idle_age + u64::from(minislots);
        let stay = params.persistence(Phase::Idle, survived_age);
        vec![
            (OccupancyState::idle(survived_age), stay),
            (OccupancyState::busy(0), 1.0 - stay),
        ]
    } else {
        k_step_distribution(OccupancyState::busy(0), minislots - k0, params)
    }
}

/// Conditional idle probability after a history of `x` same-phase mini-slots:
/// `P_I(x)` for idle histories, `1 - P_B(x)` for busy histories, `x = 1..=x_max`.
pub fn conditional_idle_curve(
    params: &OccupancyParams,
    phase: Phase,
    x_max: u64,
) -> Vec<(u64, f64)> {
    assert!(x_max >= 1);
    (1..=x_max)
        .map(|x| {
            let prob = match phase {
                Phase::Idle => params.persistence(Phase::Idle, x),
                Phase::Busy => 1.0 - params.persistence(Phase::Busy, x),
            };
            (x, prob)
        })
        .collect()
}
