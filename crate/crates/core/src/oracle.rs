//! Brute-force ground truth for tiny instances.
//!
//! Every mini-slot-level trajectory is enumerated directly from the primitive
//! chain parameters: occupancy paths branch on the persistence probabilities,
//! fading paths branch on `p`/`r`, and feedback outcomes are read off the
//! realized fading states. The recursion runs over the server's information
//! sets (occupancy is observed at slot starts, fading only through feedback),
//! so the optimal variant maximizes over what the server could know, never
//! over hindsight trajectories. Trajectory branches whose observable outcome
//! and conditional fading distribution coincide share one continuation.
//!
//! Nothing here goes through [`crate::system::slot_kernel`] or the solvers in
//! [`crate::policy`]; agreement with them is evidence, not construction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::occupancy::{OccupancyState, Phase};
use crate::policy::PolicyKind;
use crate::system::{check_initial, ModelConfig, ObservationMode, SystemState};

/// Enumeration budget: paths walked plus outcome groups produced.
pub const ORACLE_BUDGET: u64 = 10_000_000;

/// Exact expected discounted reward of a policy by full enumeration.
///
/// Initial true fading states are integrated over the initial beliefs;
/// occupancy is taken as observed. Instances whose enumeration exceeds
/// [`ORACLE_BUDGET`] work units are rejected.
pub fn oracle_value(
    cfg: &ModelConfig,
    initial: &SystemState,
    mode: ObservationMode,
    policy: PolicyKind,
) -> Result<f64> {
    check_initial(cfg, initial)?;
    let channels: Vec<InfoChannel> = initial
        .channels
        .iter()
        .map(|c| InfoChannel {
            occ: c.occupancy,
            good_prob: c.belief.value(&cfg.fading),
        })
        .collect();
    let mut oracle = Oracle {
        cfg,
        mode,
        policy,
        work: 0,
    };
    oracle.value(&channels, cfg.horizon)
}

/// One channel of an information state: observed occupancy plus the
/// conditional probability (given the observable history) that its fading is
/// Good in the first mini-slot of the current slot.
#[derive(Clone, Copy)]
struct InfoChannel {
    occ: OccupancyState,
    good_prob: f64,
}

/// Observable outcome key of one slot: per channel, the occupancy at the next
/// slot start and the exact bits of the conditional Good probability derived
/// from the (merged) feedback outcome.
type OutcomeKey = Vec<(OccupancyState, u64)>;

struct FadingEntry {
    prob: f64,
    reward_weighted: f64,
    next_good_prob: f64,
}

struct Oracle<'a> {
    cfg: &'a ModelConfig,
    mode: ObservationMode,
    policy: PolicyKind,
    work: u64,
}

impl Oracle<'_> {
    fn charge(&mut self, units: u64) -> Result<()> {
        self.work += units;
        if self.work > ORACLE_BUDGET {
            return Err(Error::InstanceTooLarge(format!(
                "oracle enumeration exceeded {ORACLE_BUDGET} work units"
            )));
        }
        Ok(())
    }

    fn value(&mut self, channels: &[InfoChannel], slot: u32) -> Result<f64> {
        self.charge(1)?;
        let idle: Vec<usize> = channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.occ.is_idle())
            .map(|(n, _)| n)
            .collect();
        let actions: Vec<Option<usize>> = if idle.is_empty() {
            vec![None]
        } else {
            idle.into_iter().map(Some).collect()
        };

        match self.policy {
            PolicyKind::Optimal => {
                let mut best = f64::NEG_INFINITY;
                for &action in &actions {
                    let q = self.action_value(channels, slot, action)?;
                    if q > best {
                        best = q;
                    }
                }
                Ok(best)
            }
            PolicyKind::Greedy => {
                let mut chosen = (f64::NEG_INFINITY, actions[0]);
                for &action in &actions {
                    let r = self.expand(channels, action, false)?.0;
                    if r > chosen.0 {
                        chosen = (r, action);
                    }
                }
                self.action_value(channels, slot, chosen.1)
            }
            PolicyKind::Randomized => {
                let mut total = 0.0;
                for &action in &actions {
                    total += self.action_value(channels, slot, action)?;
                }
                Ok(total / actions.len() as f64)
            }
        }
    }

    fn action_value(
        &mut self,
        channels: &[InfoChannel],
        slot: u32,
        action: Option<usize>,
    ) -> Result<f64> {
        let (reward, children) = self.expand(channels, action, slot > 1)?;
        let mut value = reward;
        for (prob, child) in children {
            value += self.cfg.beta * prob * self.value(&child, slot - 1)?;
        }
        Ok(value)
    }

    /// Expected slot reward for `action`, plus (when requested) the exact
    /// distribution over successor information states.
    fn expand(
        &mut self,
        channels: &[InfoChannel],
        action: Option<usize>,
        build_children: bool,
    ) -> Result<(f64, Vec<(f64, Vec<InfoChannel>)>)> {
        let k = self.cfg.minislots;

        let Some(a) = action else {
            // idle slot: no reward, no feedback; everything evolves freely
            if !build_children {
                return Ok((0.0, Vec::new()));
            }
            let options: Vec<Vec<(OccupancyState, f64, u64)>> = channels
                .iter()
                .map(|c| {
                    let q_next = self.blind_next_good(c.good_prob);
                    self.occupancy_outcomes(c.occ, k)
                        .map(|outs| {
                            outs.into_iter()
                                .map(|(occ, p)| (occ, p, q_next.to_bits()))
                                .collect()
                        })
                })
                .collect::<Result<_>>()?;
            let mut merged: BTreeMap<OutcomeKey, f64> = BTreeMap::new();
            self.combine_into(1.0, &options, &mut merged)?;
            return Ok((0.0, into_children(merged)));
        };

        debug_assert!(channels[a].occ.is_idle(), "scheduled channel must be idle");

        // scheduled channel's occupancy paths, grouped by (k0, end state)
        let sched_groups = self.scheduled_occupancy_groups(channels[a].occ.age, k)?;
        let mut pr_k0 = vec![0.0; k as usize];
        for (&(k0, _), &p) in &sched_groups {
            pr_k0[(k0 - 1) as usize] += p;
        }

        // fading tables for the scheduled channel, per k0
        let mut reward = 0.0;
        let mut sched_fading: Vec<Vec<FadingEntry>> = Vec::with_capacity(k as usize);
        for k0 in 1..=k {
            let entries = self.fading_outcomes(channels[a].good_prob, k, k0, true)?;
            let conditional_reward: f64 = entries.iter().map(|e| e.reward_weighted).sum();
            reward += pr_k0[(k0 - 1) as usize] * conditional_reward;
            sched_fading.push(entries);
        }
        if !build_children {
            return Ok((reward, Vec::new()));
        }

        // unscheduled occupancy distributions and, in genie mode, per-k0
        // fading tables for every channel
        let mut unsched_occ: Vec<Option<Vec<(OccupancyState, f64)>>> = Vec::new();
        for (n, c) in channels.iter().enumerate() {
            unsched_occ.push(if n == a {
                None
            } else {
                Some(self.occupancy_outcomes(c.occ, k)?)
            });
        }
        let genie_fading: Vec<Option<Vec<Vec<FadingEntry>>>> = match self.mode {
            ObservationMode::Original => channels.iter().map(|_| None).collect(),
            ObservationMode::Genie => channels
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    if n == a {
                        Ok(None)
                    } else {
                        let mut per_k0 = Vec::with_capacity(k as usize);
                        for k0 in 1..=k {
                            per_k0.push(self.fading_outcomes(c.good_prob, k, k0, false)?);
                        }
                        Ok(Some(per_k0))
                    }
                })
                .collect::<Result<_>>()?,
        };

        let mut merged: BTreeMap<OutcomeKey, f64> = BTreeMap::new();
        for (&(k0, sched_end), &group_prob) in &sched_groups {
            let options: Vec<Vec<(OccupancyState, f64, u64)>> = channels
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    if n == a {
                        sched_fading[(k0 - 1) as usize]
                            .iter()
                            .map(|e| (sched_end, e.prob, e.next_good_prob.to_bits()))
                            .collect()
                    } else {
                        let occs = unsched_occ[n].as_ref().unwrap();
                        match &genie_fading[n] {
                            Some(per_k0) => {
                                let entries = &per_k0[(k0 - 1) as usize];
                                let mut opts = Vec::with_capacity(occs.len() * entries.len());
                                for &(occ, op) in occs {
                                    for e in entries {
                                        opts.push((occ, op * e.prob, e.next_good_prob.to_bits()));
                                    }
                                }
                                opts
                            }
                            None => {
                                let q_next = self.blind_next_good(c.good_prob).to_bits();
                                occs.iter().map(|&(occ, op)| (occ, op, q_next)).collect()
                            }
                        }
                    }
                })
                .collect();
            self.combine_into(group_prob, &options, &mut merged)?;
        }

        Ok((reward, into_children(merged)))
    }

    /// Cartesian product of per-channel outcome options, merged by key.
    fn combine_into(
        &mut self,
        base_prob: f64,
        options: &[Vec<(OccupancyState, f64, u64)>],
        merged: &mut BTreeMap<OutcomeKey, f64>,
    ) -> Result<()> {
        let mut key: OutcomeKey = Vec::with_capacity(options.len());
        self.combine_rec(base_prob, options, 0, &mut key, merged)
    }

    fn combine_rec(
        &mut self,
        prob: f64,
        options: &[Vec<(OccupancyState, f64, u64)>],
        depth: usize,
        key: &mut OutcomeKey,
        merged: &mut BTreeMap<OutcomeKey, f64>,
    ) -> Result<()> {
        if prob == 0.0 {
            return Ok(());
        }
        if depth == options.len() {
            self.charge(1)?;
            *merged.entry(key.clone()).or_insert(0.0) += prob;
            return Ok(());
        }
        for &(occ, p, bits) in &options[depth] {
            key.push((occ, bits));
            self.combine_rec(prob * p, options, depth + 1, key, merged)?;
            key.pop();
        }
        Ok(())
    }

    /// Occupancy distribution after `steps` transitions, by walking every path.
    fn occupancy_outcomes(
        &mut self,
        start: OccupancyState,
        steps: u32,
    ) -> Result<Vec<(OccupancyState, f64)>> {
        let mut out: BTreeMap<OccupancyState, f64> = BTreeMap::new();
        let mut stack = vec![(start, steps, 1.0f64)];
        while let Some((occ, left, prob)) = stack.pop() {
            self.charge(1)?;
            if left == 0 {
                *out.entry(occ).or_insert(0.0) += prob;
                continue;
            }
            let stay = self.cfg.occupancy.persistence(occ.phase, occ.age + 1);
            stack.push((
                OccupancyState {
                    phase: occ.phase,
                    age: occ.age + 1,
                },
                left - 1,
                prob * stay,
            ));
            stack.push((
                OccupancyState {
                    phase: occ.phase.other(),
                    age: 0,
                },
                left - 1,
                prob * (1.0 - stay),
            ));
        }
        Ok(out.into_iter().collect())
    }

    /// Scheduled-channel occupancy paths over one slot, grouped by the last
    /// continuously idle mini-slot k0 and the occupancy at the next slot start.
    fn scheduled_occupancy_groups(
        &mut self,
        idle_age: u64,
        k: u32,
    ) -> Result<BTreeMap<(u32, OccupancyState), f64>> {
        let mut out: BTreeMap<(u32, OccupancyState), f64> = BTreeMap::new();
        // (occupancy at mini-slot pos, pos, idle prefix length, probability)
        let mut stack = vec![(OccupancyState::idle(idle_age), 1u32, 1u32, 1.0f64)];
        while let Some((occ, pos, prefix, prob)) = stack.pop() {
            self.charge(1)?;
            if pos == k + 1 {
                *out.entry((prefix, occ)).or_insert(0.0) += prob;
                continue;
            }
            let stay = self.cfg.occupancy.persistence(occ.phase, occ.age + 1);
            let persist = OccupancyState {
                phase: occ.phase,
                age: occ.age + 1,
            };
            let flip = OccupancyState {
                phase: occ.phase.other(),
                age: 0,
            };
            for (next, p) in [(persist, prob * stay), (flip, prob * (1.0 - stay))] {
                let next_prefix = if prefix == pos && pos + 1 <= k && next.phase == Phase::Idle {
                    pos + 1
                } else {
                    prefix
                };
                stack.push((next, pos + 1, next_prefix, p));
            }
        }
        Ok(out)
    }

    /// Fading-path outcomes of one channel over one slot, grouped by the
    /// feedback observed at mini-slot `k0` (the channel's true state there).
    /// `rewarded` additionally accumulates the Good count over mini-slots
    /// `1..=k0`, weighted by path probability.
    fn fading_outcomes(
        &mut self,
        good_prob: f64,
        k: u32,
        k0: u32,
        rewarded: bool,
    ) -> Result<Vec<FadingEntry>> {
        let fading = &self.cfg.fading;
        // accumulators indexed by the feedback bit
        let mut acc = [(0.0f64, 0.0f64, 0.0f64); 2];
        // (pos, good at pos, reward so far, feedback, prob)
        let mut stack: Vec<(u32, bool, u32, bool, f64)> = Vec::new();
        for (good, p) in [(true, good_prob), (false, 1.0 - good_prob)] {
            if p > 0.0 {
                stack.push((1, good, 0, false, p));
            }
        }
        while let Some((pos, good, mut reward, mut feedback, prob)) = stack.pop() {
            self.charge(1)?;
            if pos <= k0 && good {
                reward += 1;
            }
            if pos == k0 {
                feedback = good;
            }
            if pos == k + 1 {
                let slot = &mut acc[usize::from(feedback)];
                slot.0 += prob;
                slot.1 += f64::from(reward) * prob;
                if good {
                    slot.2 += prob;
                }
                continue;
            }
            let to_good = if good { fading.p() } else { fading.r() };
            stack.push((pos + 1, true, reward, feedback, prob * to_good));
            stack.push((pos + 1, false, reward, feedback, prob * (1.0 - to_good)));
        }
        Ok(acc
            .into_iter()
            .filter(|&(prob, _, _)| prob > 0.0)
            .map(|(prob, reward_weighted, good_weighted)| FadingEntry {
                prob,
                reward_weighted: if rewarded { reward_weighted } else { 0.0 },
                next_good_prob: good_weighted / prob,
            })
            .collect())
    }

    /// Marginal probability of Good after `K` blind mini-slots.
    fn blind_next_good(&self, good_prob: f64) -> f64 {
        let mut g = good_prob;
        for _ in 0..self.cfg.minislots {
            g = self.cfg.fading.one_step_value(g);
        }
        g
    }
}

fn into_children(merged: BTreeMap<OutcomeKey, f64>) -> Vec<(f64, Vec<InfoChannel>)> {
    merged
        .into_iter()
        .map(|(key, prob)| {
            let chans = key
                .into_iter()
                .map(|(occ, bits)| InfoChannel {
                    occ,
                    good_prob: f64::from_bits(bits),
                })
                .collect();
            (prob, chans)
        })
        .collect()
}
