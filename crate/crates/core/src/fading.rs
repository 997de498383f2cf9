//! Two-state, positively correlated Markov fading chain and its belief algebra.
//!
//! The chain has states Good/Bad. `p` is the probability of staying Good and
//! `r` the probability of recovering from Bad, both per mini-slot. Beliefs
//! (probability that fading is Good) evolve through the one-step operator
//! `T(g) = g*p + (1-g)*r`, whose L-fold composition has the closed form
//!
//! ```text
//! T^L(g) = (p-r)^L * g + r * (1 - (p-r)^L) / (1 - (p-r))
//! ```
//!
//! contracting geometrically toward the steady state `r / (1 - p + r)`.
//!
//! A [`Belief`] is stored as `(origin, steps)` rather than a raw float so that
//! dynamic-programming memoization keys compare exactly; the numeric value is
//! recovered on demand through the closed form. Beliefs reachable within a
//! finite horizon therefore form a finite set of exact keys and no
//! floating-point values are ever used for equality.

use rand::Rng;

use crate::error::{Error, Result};

/// Transition parameters of the fading chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    p: f64,
    r: f64,
}

impl FadingParams {
    /// Requires `0 < r <= p < 1`; `r == p` is the memoryless degenerate case.
    pub fn new(p: f64, r: f64) -> Result<Self> {
        let ok = p.is_finite() && r.is_finite() && r > 0.0 && r <= p && p < 1.0;
        if !ok {
            return Err(Error::InvalidFadingParams { p, r });
        }
        Ok(Self { p, r })
    }

    /// Symmetric expansion of the memory parameter `delta = p - r` into
    /// `p = (1 + delta) / 2`, `r = (1 - delta) / 2`.
    pub fn from_delta(delta: f64) -> Result<Self> {
        Self::new((1.0 + delta) / 2.0, (1.0 - delta) / 2.0)
    }

    /// Probability Good stays Good.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Probability Bad becomes Good.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Fading memory `p - r`.
    pub fn delta(&self) -> f64 {
        self.p - self.r
    }

    /// One application of the belief evolution operator T.
    pub fn one_step_value(&self, gamma: f64) -> f64 {
        gamma * self.p + (1.0 - gamma) * self.r
    }

    /// `steps` applications of T, via the closed form.
    pub fn propagate_value(&self, gamma: f64, steps: u32) -> f64 {
        let d = self.delta();
        let dl = d.powi(steps as i32);
        dl * gamma + self.r * (1.0 - dl) / (1.0 - d)
    }

    /// Fixed point of T: the steady-state probability of Good fading.
    pub fn steady_state(&self) -> f64 {
        self.r / (1.0 - self.p + self.r)
    }
}

/// Where a belief's numeric value is anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BeliefOrigin {
    /// One mini-slot after a Good feedback; base value `p`.
    PosteriorGood,
    /// One mini-slot after a Bad feedback; base value `r`.
    PosteriorBad,
    /// An arbitrary initial belief (stored as exact f64 bits) that is not a
    /// feedback posterior.
    Anchor(u64),
}

impl BeliefOrigin {
    fn base_value(&self, fading: &FadingParams) -> f64 {
        match *self {
            BeliefOrigin::PosteriorGood => fading.p(),
            BeliefOrigin::PosteriorBad => fading.r(),
            BeliefOrigin::Anchor(bits) => f64::from_bits(bits),
        }
    }
}

/// Exact-key fading state belief: numeric value `T^steps(origin)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Belief {
    origin: BeliefOrigin,
    steps: u32,
}

impl Belief {
    /// Belief anchored at an explicit probability in `[0, 1]`.
    pub fn anchor(value: f64) -> Result<Self> {
        if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
            return Err(Error::BeliefOutOfRange(value));
        }
        // normalize -0.0 so equal values share one key
        let value = if value == 0.0 { 0.0 } else { value };
        Ok(Self {
            origin: BeliefOrigin::Anchor(value.to_bits()),
            steps: 0,
        })
    }

    /// Posterior one mini-slot after a fading feedback: Good maps to `p`,
    /// Bad maps to `r`.
    pub fn from_feedback(good: bool) -> Self {
        let origin = if good {
            BeliefOrigin::PosteriorGood
        } else {
            BeliefOrigin::PosteriorBad
        };
        Self { origin, steps: 0 }
    }

    /// One blind mini-slot of evolution.
    pub fn one_step(self) -> Self {
        Self {
            steps: self.steps + 1,
            ..self
        }
    }

    /// `steps` blind mini-slots of evolution.
    pub fn propagate(self, steps: u32) -> Self {
        Self {
            steps: self.steps + steps,
            ..self
        }
    }

    pub fn origin(&self) -> BeliefOrigin {
        self.origin
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// Numeric probability of Good fading under `fading`.
    pub fn value(&self, fading: &FadingParams) -> f64 {
        fading.propagate_value(self.origin.base_value(fading), self.steps)
    }
}

/// Realized fading state of one channel in one mini-slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FadingState {
    Good,
    Bad,
}

impl FadingState {
    pub fn is_good(self) -> bool {
        matches!(self, FadingState::Good)
    }

    /// Draw an initial state with the given probability of Good.
    pub fn sample<R: Rng + ?Sized>(prob_good: f64, rng: &mut R) -> Self {
        if rng.random_bool(prob_good.clamp(0.0, 1.0)) {
            FadingState::Good
        } else {
            FadingState::Bad
        }
    }

    /// One mini-slot transition: Good stays Good w.p. `p`, Bad recovers w.p. `r`.
    pub fn step<R: Rng + ?Sized>(self, fading: &FadingParams, rng: &mut R) -> Self {
        let to_good = match self {
            FadingState::Good => fading.p(),
            FadingState::Bad => fading.r(),
        };
        if rng.random_bool(to_good) {
            FadingState::Good
        } else {
            FadingState::Bad
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn params(p: f64, r: f64) -> FadingParams {
        FadingParams::new(p, r).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FadingParams::new(0.5, 0.6).is_err()); // r > p
        assert!(FadingParams::new(1.0, 0.5).is_err()); // p = 1
        assert!(FadingParams::new(0.5, 0.0).is_err()); // r = 0
        assert!(FadingParams::new(f64::NAN, 0.5).is_err());
        assert!(FadingParams::new(0.5, 0.5).is_ok()); // memoryless allowed
    }

    #[test]
    fn one_step_values() {
        let f = params(0.9, 0.1);
        assert!((f.one_step_value(0.4) - 0.42).abs() < 1e-15);
        assert!((f.one_step_value(0.5) - 0.5).abs() < 1e-15);
        assert!((f.one_step_value(0.7) - 0.66).abs() < 1e-15);
    }

    #[test]
    fn propagate_values() {
        let f = params(0.9, 0.1);
        assert_eq!(f.propagate_value(0.4, 0), 0.4);
        assert!((f.propagate_value(0.4, 2) - 0.436).abs() < 1e-12);
        // converges to the steady state
        assert!((f.propagate_value(0.9, 200) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn steady_states() {
        assert!((params(0.9, 0.1).steady_state() - 0.5).abs() < 1e-15);
        assert!((params(0.3, 0.3).steady_state() - 0.3).abs() < 1e-15);
        assert!((params(0.8, 0.2).steady_state() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn feedback_posteriors() {
        let f = params(0.9, 0.1);
        assert_eq!(Belief::from_feedback(true).value(&f), 0.9);
        assert_eq!(Belief::from_feedback(false).value(&f), 0.1);
        let memoryless = params(0.5, 0.5);
        assert_eq!(Belief::from_feedback(true).value(&memoryless), 0.5);
    }

    #[test]
    fn closed_form_matches_iteration() {
        for &p in &[0.2, 0.5, 0.9, 0.99] {
            for &r in &[0.05, 0.2, 0.5] {
                if r > p {
                    continue;
                }
                let f = params(p, r);
                for &g0 in &[0.001, 0.3, 0.5, 0.7, 0.999] {
                    let mut g = g0;
                    for l in 0..=64u32 {
                        assert!(
                            (f.propagate_value(g0, l) - g).abs() < 1e-12,
                            "p={p} r={r} g0={g0} L={l}"
                        );
                        g = f.one_step_value(g);
                    }
                }
            }
        }
    }

    #[test]
    fn belief_keys_are_exact() {
        let a = Belief::anchor(0.4).unwrap().propagate(3);
        let b = Belief::anchor(0.4).unwrap().one_step().one_step().one_step();
        assert_eq!(a, b);
        assert_ne!(a, Belief::anchor(0.4).unwrap().propagate(2));
        assert_ne!(
            Belief::from_feedback(true),
            Belief::from_feedback(false)
        );
        // -0.0 and 0.0 anchors collapse to the same key
        assert_eq!(Belief::anchor(0.0).unwrap(), Belief::anchor(-0.0).unwrap());
    }

    #[test]
    fn anchor_range_checked() {
        assert!(Belief::anchor(-0.1).is_err());
        assert!(Belief::anchor(1.1).is_err());
        assert!(Belief::anchor(f64::NAN).is_err());
        assert!(Belief::anchor(0.0).is_ok());
        assert!(Belief::anchor(1.0).is_ok());
    }

    #[test]
    fn absorbing_row_limits() {
        // exact p=1 / r=0 are outside the parameter domain; the limits are
        // checked with the closest representable parameters and a fixed seed
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let sticky_good = params(1.0 - f64::EPSILON, 1e-300);
        for _ in 0..1000 {
            assert_eq!(
                FadingState::Good.step(&sticky_good, &mut rng),
                FadingState::Good
            );
            assert_eq!(
                FadingState::Bad.step(&sticky_good, &mut rng),
                FadingState::Bad
            );
        }
    }

    #[test]
    fn empirical_transition_frequency() {
        let f = params(0.9, 0.1);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 100_000u32;
        let mut good = 0u32;
        for _ in 0..n {
            if FadingState::Good.step(&f, &mut rng).is_good() {
                good += 1;
            }
        }
        let freq = f64::from(good) / f64::from(n);
        let sigma = (0.9 * 0.1 / f64::from(n)).sqrt();
        assert!(
            (freq - 0.9).abs() < 3.0 * sigma,
            "freq={freq} outside 0.9 +/- {}",
            3.0 * sigma
        );
    }
}
