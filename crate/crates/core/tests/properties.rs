//! Property tests for the chain algebra, the return-time laws, and the slot
//! kernel.

use proptest::prelude::*;
use specsched::{
    immediate_reward, k0_distribution, k_step_distribution, post_return_distribution, slot_kernel,
    Action, Belief, ChannelState, FadingParams, ModelConfig, ObservationMode, OccupancyParams,
    OccupancyState, SystemState,
};

fn fading_params() -> impl Strategy<Value = FadingParams> {
    (0.05f64..0.95, 0.05f64..0.95).prop_map(|(a, b)| {
        let (p, r) = if a >= b { (a, b) } else { (b, a) };
        FadingParams::new(p, r).unwrap()
    })
}

fn occupancy_params() -> impl Strategy<Value = OccupancyParams> {
    (1u32..=5, 0.1f64..5.0, 0.1f64..5.0)
        .prop_map(|(u, c_i, c_b)| OccupancyParams::new(u, c_i, c_b).unwrap())
}

fn occupancy_state() -> impl Strategy<Value = OccupancyState> {
    (any::<bool>(), 0u64..=30).prop_map(|(idle, age)| {
        if idle {
            OccupancyState::idle(age)
        } else {
            OccupancyState::busy(age)
        }
    })
}

proptest! {
    #[test]
    fn belief_propagation_is_monotone_and_contracts(
        fading in fading_params(),
        g1 in 0.001f64..0.999,
        g2 in 0.001f64..0.999,
        steps in 0u32..=40,
    ) {
        // monotone in the starting belief; strict whenever the contracted gap
        // delta^L * |g1 - g2| is still resolvable in f64
        let v1 = fading.propagate_value(g1, steps);
        let v2 = fading.propagate_value(g2, steps);
        let gap = fading.delta().powi(steps as i32) * (g1 - g2).abs();
        if fading.delta() > 1e-9 && gap > 1e-12 {
            prop_assert_eq!(v1 > v2, g1 > g2, "p={} r={}", fading.p(), fading.r());
        } else {
            prop_assert!((v1 - v2).abs() <= 1e-12);
        }
        // contraction at exactly the memory rate
        let pinned = fading.steady_state();
        let lhs = (v1 - pinned).abs();
        let rhs = fading.delta().powi(steps as i32) * (g1 - pinned).abs();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn closed_form_equals_iterated_one_step(
        fading in fading_params(),
        g in 0.001f64..0.999,
        steps in 0u32..=64,
    ) {
        let mut iterated = g;
        for _ in 0..steps {
            iterated = fading.one_step_value(iterated);
        }
        prop_assert!((fading.propagate_value(g, steps) - iterated).abs() < 1e-12);
    }

    #[test]
    fn belief_values_stay_bracketed(
        fading in fading_params(),
        g in 0.001f64..0.999,
        steps in 0u32..=64,
    ) {
        let v = Belief::anchor(g).unwrap().propagate(steps).value(&fading);
        let lo = fading.r().min(g);
        let hi = fading.p().max(g);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn return_time_distribution_normalizes(
        params in occupancy_params(),
        idle_age in 0u64..=50,
        minislots in 1u32..=6,
    ) {
        let dist = k0_distribution(idle_age, minislots, &params);
        let total: f64 = dist.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(dist.probs().iter().all(|&p| p >= 0.0));
        // tail mass equals the survival product
        for z in 1..=minislots {
            let tail: f64 = (z..=minislots).map(|w| dist.prob(w)).sum();
            let survival: f64 = (1..z)
                .map(|j| params.idle_persistence(idle_age + u64::from(j)).unwrap())
                .product();
            prop_assert!((tail - survival).abs() < 1e-12);
        }
    }

    #[test]
    fn occupancy_distributions_normalize(
        params in occupancy_params(),
        occ in occupancy_state(),
        steps in 0u32..=6,
        k0_index in 0u32..6,
    ) {
        let stepped = k_step_distribution(occ, steps, &params);
        let total: f64 = stepped.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);

        let minislots = steps.max(1);
        let k0 = (k0_index % minislots) + 1;
        let post = post_return_distribution(occ.age, k0, minislots, &params);
        let total: f64 = post.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reward_is_bounded_and_forms_agree(
        fading in fading_params(),
        params in occupancy_params(),
        idle_age in 0u64..=30,
        belief in 0.01f64..0.99,
        minislots in 1u32..=5,
    ) {
        let cfg = ModelConfig::new(1, minislots, 0.9, 1, fading, params).unwrap();
        let state = SystemState::new(
            vec![ChannelState {
                occupancy: OccupancyState::idle(idle_age),
                belief: Belief::anchor(belief).unwrap(),
            }],
            1,
        )
        .unwrap();
        let reward = immediate_reward(&state, Action::Schedule(0), &cfg).unwrap();
        prop_assert!((0.0..=f64::from(minislots)).contains(&reward));

        // weighted-sum form over the return time
        let dist = k0_distribution(idle_age, minislots, &params);
        let mut weighted = 0.0;
        for z in 1..=minislots {
            let mut partial = 0.0;
            for k in 1..=z {
                partial += fading.propagate_value(belief, k - 1);
            }
            weighted += dist.prob(z) * partial;
        }
        prop_assert!((reward - weighted).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slot_kernels_are_stochastic_in_both_modes(
        fading in fading_params(),
        params in occupancy_params(),
        occ0 in occupancy_state(),
        occ1 in occupancy_state(),
        b0 in 0.01f64..0.99,
        b1 in 0.01f64..0.99,
        minislots in 1u32..=3,
    ) {
        let cfg = ModelConfig::new(2, minislots, 0.9, 3, fading, params).unwrap();
        let state = SystemState::new(
            vec![
                ChannelState { occupancy: occ0, belief: Belief::anchor(b0).unwrap() },
                ChannelState { occupancy: occ1, belief: Belief::anchor(b1).unwrap() },
            ],
            3,
        )
        .unwrap();
        let action = if occ0.is_idle() {
            Action::Schedule(0)
        } else if occ1.is_idle() {
            Action::Schedule(1)
        } else {
            Action::NoOp
        };
        for mode in [ObservationMode::Original, ObservationMode::Genie] {
            let kernel = slot_kernel(&state, action, &cfg, mode).unwrap();
            prop_assert!((kernel.total_probability() - 1.0).abs() < 1e-12);
            prop_assert!(kernel.branches().iter().all(|(p, _)| *p > 0.0));
            for (_, next) in kernel.branches() {
                prop_assert_eq!(next.slot, 2);
            }
        }
    }
}
