//! Randomized invariant checks across the whole solver pipeline.

use airs_core::model::{CostFunction, Instance};
use airs_core::schemes::{best_response, evaluate_scheme, solve_linear};
use airs_core::solver::{
    actions_for_lambda, compute_segments, gamma_chain, solve_airs, total_spend, SolveOptions,
};
use proptest::prelude::*;

/// Power exponents stay clear of 1 from above: the spend curve's
/// sensitivity to lambda blows up like 1/(a - 1) and double-precision
/// bisection cannot meet the budget tolerance inside that sliver. a = 1
/// itself is fine (handled as a flat marginal).
fn arb_cost() -> impl Strategy<Value = CostFunction> {
    let power = (prop_oneof![Just(1.0f64), 1.05..3.0f64], 0.2..2.0f64)
        .prop_map(|(a, s)| CostFunction::power(a, s).unwrap());
    let pwl = (
        prop::collection::vec(0.1..2.0f64, 1..=4),
        prop::collection::vec(0.1..2.0f64, 3),
    )
        .prop_map(|(slope_steps, knot_steps)| {
            let mut slopes = Vec::with_capacity(slope_steps.len());
            let mut acc = 0.0;
            for s in slope_steps {
                acc += s;
                slopes.push(acc);
            }
            let mut knots = Vec::with_capacity(slopes.len() - 1);
            let mut k = 0.0;
            for step in knot_steps.iter().take(slopes.len() - 1) {
                k += step;
                knots.push(k);
            }
            CostFunction::piecewise_linear(slopes, knots).unwrap()
        });
    prop_oneof![power, pwl]
}

fn arb_instance(max_m: usize) -> impl Strategy<Value = Instance> {
    (1..=max_m).prop_flat_map(move |m| {
        (
            prop::collection::vec(0.05..2.0f64, m),
            prop::collection::vec(0.1..5.0f64, m),
            prop::collection::vec(0.05..1.5f64, m),
            arb_cost(),
            0.1..20.0f64,
        )
            .prop_map(|(type_steps, weights, h_steps, cost, budget)| {
                let mut types = Vec::with_capacity(type_steps.len());
                let mut t = 0.0;
                for s in &type_steps {
                    t += s;
                    types.push(t);
                }
                // Suffix sums make h strictly decreasing and positive.
                let mut h = vec![0.0; h_steps.len()];
                let mut acc = 0.0;
                for k in (0..h_steps.len()).rev() {
                    acc += h_steps[k];
                    h[k] = acc;
                }
                Instance::new(types, weights, h, cost, budget).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn alphas_are_positive_and_telescope(inst in arb_instance(12)) {
        let alphas = inst.alphas();
        let total: f64 = alphas.iter().sum();
        let expect = inst.h()[0] * inst.total_weight();
        prop_assert!(alphas.iter().all(|a| *a > 0.0));
        prop_assert!((total - expect).abs() <= 1e-9 * expect.abs());
        let m = inst.m();
        let floor_last = inst.h()[m - 1] * inst.weights()[m - 1];
        prop_assert!((alphas[m - 1] - floor_last).abs() <= 1e-12 * floor_last);
        for k in 0..m - 1 {
            prop_assert!(alphas[k] > inst.h()[k] * inst.weights()[k]);
        }
    }

    #[test]
    fn stack_segments_match_gamma_chain(
        weights in prop::collection::vec(0.05..5.0f64, 1..40),
        alphas_raw in prop::collection::vec(0.05..5.0f64, 40),
    ) {
        let alphas = &alphas_raw[..weights.len()];
        let seg = compute_segments(&weights, alphas);
        prop_assert_eq!(&seg.boundaries, &gamma_chain(&weights, alphas));
        for w in seg.segment_avgs.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12, "averages decreased: {} > {}", w[0], w[1]);
        }
    }

    #[test]
    fn profile_monotone_and_spend_decreasing(inst in arb_instance(10), lam0 in 0.01..5.0f64) {
        let alphas = inst.alphas();
        let seg = compute_segments(inst.weights(), &alphas);
        let mut prev_spend = f64::INFINITY;
        for mult in [1.0, 2.0, 4.0, 8.0] {
            let x = actions_for_lambda(&inst, &seg, lam0 * mult).unwrap();
            for w in x.windows(2) {
                prop_assert!(w[0] <= w[1] * (1.0 + 1e-12) + 1e-300);
            }
            let spend = total_spend(&alphas, inst.cost(), &x);
            prop_assert!(spend <= prev_spend * (1.0 + 1e-9) + 1e-300);
            prev_spend = spend;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn solve_meets_budget_and_kkt(inst in arb_instance(10)) {
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        let b = inst.budget();
        prop_assert!((sol.spend - b).abs() <= 1e-10 * b, "spend {} vs {}", sol.spend, b);
        for w in sol.actions.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-12) + 1e-300);
        }
        for (k, x) in sol.actions.iter().enumerate() {
            if k + 1 < sol.q {
                prop_assert_eq!(*x, 0.0, "type {} below q={} must idle", k + 1, sol.q);
            } else {
                prop_assert!(*x > 0.0, "type {} at/above q={} must work", k + 1, sol.q);
            }
        }
        prop_assert!(sol.kkt.max_violation() <= 1e-6, "kkt {:?}", sol.kkt);
        let gross: f64 = inst.weights().iter().zip(&sol.actions).map(|(w, x)| w * x).sum();
        prop_assert!((sol.gross - gross).abs() <= 1e-9 * (1.0 + gross.abs()));
    }

    #[test]
    fn scheme_spend_identity_and_fixed_point(inst in arb_instance(8)) {
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        let out = evaluate_scheme(&inst, &sol.scheme);
        // The ladder's population cost equals the alpha-weighted spend.
        let tol = 1e-7 * (1.0 + inst.budget());
        prop_assert!(
            (out.spend - sol.spend).abs() <= tol,
            "scheme pays {} but solver spent {}",
            out.spend,
            sol.spend
        );
        prop_assert!((out.gross - sol.gross).abs() <= 1e-7 * (1.0 + sol.gross));
        for (k, planned) in sol.actions.iter().enumerate() {
            let br = best_response(&sol.scheme, inst.h()[k], inst.cost());
            let own = sol.scheme.reward_at(*planned) - inst.cost().eval(*planned) * inst.h()[k];
            prop_assert!(
                own >= br.utility - 1e-7 * (1.0 + br.utility.abs()),
                "type {} would deviate from {} to {}",
                k + 1,
                planned,
                br.action
            );
        }
    }

    #[test]
    fn linear_scheme_never_below_half_nor_above_optimal(inst in arb_instance(8)) {
        let airs = solve_airs(&inst, &SolveOptions::default()).unwrap();
        let linear = solve_linear(&inst, &SolveOptions::default()).unwrap();
        let ratio = linear.gross / airs.gross;
        prop_assert!(ratio >= 0.5 - 1e-9, "ratio {} below half", ratio);
        prop_assert!(ratio <= 1.0 + 1e-9, "linear beat the optimum: {}", ratio);
        prop_assert!(linear.spend <= inst.budget() * (1.0 + 1e-9));
    }
}
