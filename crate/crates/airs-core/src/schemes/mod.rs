//! Alternative reward schemes and producer best responses.
//!
//! The optimal step scheme is compared against two simpler families: a
//! linear price per unit of quality ([`linear`]) and splitting the budget
//! in proportion to produced quality ([`proportional`]). Producers facing
//! any step scheme only ever play zero or a breakpoint, which makes exact
//! best responses a finite scan.

mod linear;
mod marginal;
mod proportional;

pub use linear::{linear_best_response, solve_linear, LinearSolution};
pub use marginal::{marginalize_scheme, MarginalError, MarginalizedTable};
pub use proportional::{
    airs_from_proportional, prop_equilibrium_closed_form, prop_equilibrium_numeric,
    PropEquilibrium, PropError,
};

use crate::model::{CostFunction, Instance, StepRewardScheme};

/// A producer's optimal play against a step scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub action: f64,
    pub utility: f64,
}

/// Relative slack for recognizing indifference. Reward ladders make a
/// producer exactly indifferent between adjacent rungs, so rounding alone
/// decides a strict comparison; anything this close to the maximum counts
/// as tied.
const TIE_TOL: f64 = 1e-9;

/// Best response of a producer with cost `c(x) * h_t` to a step scheme.
/// Only zero and the breakpoints can be optimal because cost is strictly
/// increasing between rungs; producers tied within `TIE_TOL` of the best
/// utility take the largest such action.
pub fn best_response(scheme: &StepRewardScheme, h_t: f64, cost: &CostFunction) -> BestResponse {
    let utility_at = |b: f64, r: f64| r - cost.eval(b) * h_t;
    let u0 = scheme.reward_at(0.0);
    let mut max_u = u0;
    for (b, r) in scheme.breakpoints().iter().zip(scheme.rewards()) {
        max_u = max_u.max(utility_at(*b, *r));
    }
    let floor = max_u - TIE_TOL * (1.0 + max_u.abs());
    for (b, r) in scheme.breakpoints().iter().zip(scheme.rewards()).rev() {
        let u = utility_at(*b, *r);
        if u >= floor {
            return BestResponse { action: *b, utility: u };
        }
    }
    BestResponse { action: 0.0, utility: u0 }
}

/// Population outcome when every type plays its best response.
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub actions: Vec<f64>,
    pub gross: f64,
    pub spend: f64,
}

pub fn evaluate_scheme(inst: &Instance, scheme: &StepRewardScheme) -> SchemeOutcome {
    let cost = inst.cost();
    let mut actions = Vec::with_capacity(inst.m());
    let mut gross = 0.0;
    let mut spend = 0.0;
    for k in 0..inst.m() {
        let br = best_response(scheme, inst.h()[k], cost);
        gross += inst.weights()[k] * br.action;
        spend += inst.weights()[k] * scheme.reward_at(br.action);
        actions.push(br.action);
    }
    SchemeOutcome { actions, gross, spend }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFunction, Instance};
    use crate::solver::{solve_airs, SolveOptions};

    #[test]
    fn best_response_scans_breakpoints() {
        let cost = CostFunction::power(2.0, 1.0).unwrap();
        let scheme = StepRewardScheme::new(vec![1.0, 2.0], vec![1.5, 3.0]).unwrap();
        // Utilities at h = 1: 0, 0.5, -1; the middle rung wins.
        let br = best_response(&scheme, 1.0, &cost);
        assert_eq!(br.action, 1.0);
        assert!((br.utility - 0.5).abs() < 1e-12);
        // An able producer (h = 0.5) prefers the top rung: 3 - 4 * 0.5 = 1.
        let br = best_response(&scheme, 0.5, &cost);
        assert_eq!(br.action, 2.0);
        assert!((br.utility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indifferent_producer_takes_larger_action() {
        let cost = CostFunction::linear(1.0).unwrap();
        // Both rungs give utility 0 at h = 1; ties go up.
        let scheme = StepRewardScheme::new(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
        let br = best_response(&scheme, 1.0, &cost);
        assert_eq!(br.action, 2.0);
        assert!(br.utility.abs() < 1e-12);
    }

    #[test]
    fn optimal_scheme_is_a_best_response_fixed_point() {
        let inst = Instance::new(
            vec![1.0, 2.0],
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            CostFunction::power(2.0, 1.0).unwrap(),
            5.0,
        )
        .unwrap();
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        let out = evaluate_scheme(&inst, &sol.scheme);
        for (played, planned) in out.actions.iter().zip(&sol.actions) {
            assert!(
                (played - planned).abs() <= 1e-9 * (1.0 + planned.abs()),
                "best response {} drifted from plan {}",
                played,
                planned
            );
        }
        assert!((out.gross - sol.gross).abs() <= 1e-9 * (1.0 + sol.gross));
        assert!((out.spend - sol.spend).abs() <= 1e-9 * (1.0 + sol.spend));
    }
}
