//! Budget-optimal step scheme solver.
//!
//! The designer's problem reduces to choosing one nondecreasing action per
//! type to maximize total weighted quality subject to the alpha-weighted
//! cost staying inside the budget. The optimizer is characterized by a
//! dual price `lambda`: within each segment of [`compute_segments`] every
//! type takes the action whose marginal cost equals `segment average /
//! lambda`, segments whose average falls at or below `lambda * c'(0)` stay
//! at zero, and the budget binds. [`solve_airs`] bisects `lambda` on the
//! monotone spend curve inside provable bounds.
//!
//! Costs with flat marginal stretches (piecewise-linear families) make the
//! spend curve jump: no single canonical action profile lands on the
//! budget. The solver then pins `lambda` to the critical ratio, keeps
//! lower types at the stretch floor, and spreads the flat segment's action
//! upward until the budget is spent, which preserves every first-order
//! condition because any action inside the stretch is optimal at the
//! critical price.

mod kkt;
mod segments;

pub use kkt::{kkt_residuals, KktReport};
pub use segments::{
    compute_segments, gamma_bruteforce, gamma_chain, PrefixSums, SegmentStructure,
};

use crate::model::{
    scheme_from_actions, CostFunction, FlatStretch, Instance, StepRewardScheme,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("lambda must be finite and strictly positive")]
    InvalidLambda,
    #[error("epsilon must lie strictly between 0 and 1")]
    InvalidEpsilon,
    #[error(
        "bisection did not meet the budget after {iterations} iterations \
         (spend {spend}, budget {budget})"
    )]
    NoConvergence { iterations: usize, spend: f64, budget: f64 },
}

/// Solver knobs. `epsilon` is the relative budget tolerance and also the
/// relative dual-bracket width at which a jump is declared.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { epsilon: 1e-10, max_iter: 200 }
    }
}

/// Optimal solution bundle.
#[derive(Debug, Clone)]
pub struct AirsSolution {
    /// Nondecreasing optimal action per type.
    pub actions: Vec<f64>,
    /// Dual price of the budget constraint.
    pub lambda: f64,
    /// Smallest active 1-based type index; every type below q sits at zero.
    pub q: usize,
    /// Designer spend, equal to the budget within `epsilon` relative.
    pub spend: f64,
    /// Total weighted quality.
    pub gross: f64,
    pub iterations: usize,
    pub kkt: KktReport,
    /// Step scheme implementing the actions.
    pub scheme: StepRewardScheme,
}

struct Profile {
    actions: Vec<f64>,
    marginals: Vec<f64>,
}

/// Canonical action profile at a dual price: lower endpoints of the
/// marginal-inverse sets, with `forced` segments pinned to a flat stretch.
fn profile_for(
    cost: &CostFunction,
    seg: &SegmentStructure,
    lambda: f64,
    forced: &[(usize, FlatStretch)],
) -> Profile {
    let m = seg.boundaries.last().unwrap() - 1;
    let mut actions = vec![0.0; m];
    let mut marginals = vec![0.0; m];
    let zero_marginal = cost.marginal_at_zero();
    for i in 0..seg.num_segments() {
        let avg = seg.segment_avgs[i];
        let (x, g) = if let Some((_, fs)) = forced.iter().find(|(j, _)| *j == i) {
            (fs.lo, fs.slope)
        } else if avg <= lambda * zero_marginal {
            (0.0, avg / lambda)
        } else {
            let g = avg / lambda;
            match cost.marginal_inverse(g) {
                Ok(iv) => (iv.lo, g),
                // Above the terminal slope: unbounded response. Only seen
                // transiently below the admissible bracket; the infinite
                // spend steers the bisection back up.
                Err(_) => (f64::INFINITY, g),
            }
        };
        for k in seg.type_range(i) {
            actions[k] = x;
            marginals[k] = g;
        }
    }
    Profile { actions, marginals }
}

/// Canonical actions at dual price `lambda` (lower endpoints, zeros below
/// the active range).
pub fn actions_for_lambda(
    inst: &Instance,
    seg: &SegmentStructure,
    lambda: f64,
) -> Result<Vec<f64>, SolverError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(SolverError::InvalidLambda);
    }
    Ok(profile_for(inst.cost(), seg, lambda, &[]).actions)
}

/// Designer spend `sum_k alpha_k * c(x_k)` for an action profile.
pub fn total_spend(alphas: &[f64], cost: &CostFunction, actions: &[f64]) -> f64 {
    alphas.iter().zip(actions).map(|(a, x)| a * cost.eval(*x)).sum()
}

/// Step scheme implementing the given nondecreasing actions for this
/// instance's ability profile.
pub fn build_scheme(inst: &Instance, actions: &[f64]) -> StepRewardScheme {
    scheme_from_actions(inst.cost(), inst.h(), actions)
}

pub fn solve_airs(inst: &Instance, opts: &SolveOptions) -> Result<AirsSolution, SolverError> {
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(SolverError::InvalidEpsilon);
    }
    let cost = inst.cost();
    let budget = inst.budget();
    let alphas = inst.alphas();
    let seg = compute_segments(inst.weights(), &alphas);
    let avg_last = *seg.segment_avgs.last().unwrap();

    // Dual bracket. Spending the whole budget at one uniform action y1
    // bounds the optimal top action from below, so its marginal price
    // bounds lambda from above; concentrating the budget on the top
    // coefficient alone bounds it from the other side.
    let total_alpha: f64 = alphas.iter().sum();
    let y1 = cost.inverse(budget / total_alpha);
    let y2 = cost.inverse(budget / alphas[inst.m() - 1]);
    let lam_hi0 = avg_last / cost.subderiv(y1).lo;
    let lam_lo0 = (avg_last / cost.subderiv(y2).hi).min(lam_hi0);

    let spread = lam_hi0 - lam_lo0;
    let has_flats = cost.has_flat_marginals();
    let mut lam_lo = lam_lo0;
    let mut lam_hi = lam_hi0;
    let mut iterations = 0usize;
    let mut last_spend = f64::NAN;
    let mut result: Option<(f64, Profile, f64)> = None;

    while iterations < opts.max_iter {
        iterations += 1;
        let lam = 0.5 * (lam_lo + lam_hi);
        let prof = profile_for(cost, &seg, lam, &[]);
        let spend = total_spend(&alphas, cost, &prof.actions);
        last_spend = spend;
        if (spend - budget).abs() <= opts.epsilon * budget {
            result = Some((lam, prof, spend));
            break;
        }
        if spend > budget {
            lam_lo = lam;
        } else {
            lam_hi = lam;
        }
        let width = lam_hi - lam_lo;
        if width <= opts.epsilon * spread && has_flats {
            result = land_on_jump(cost, &alphas, &seg, lam_lo, lam_hi, budget, opts.epsilon);
            break;
        }
        // Smooth costs keep refining toward the spend target; stop only
        // when lambda cannot be split further.
        if width <= f64::EPSILON * lam_hi {
            break;
        }
    }

    let (lambda, prof, spend) = result.ok_or(SolverError::NoConvergence {
        iterations,
        spend: last_spend,
        budget,
    })?;

    let gross = inst.weights().iter().zip(&prof.actions).map(|(w, x)| w * x).sum();
    let scheme = build_scheme(inst, &prof.actions);
    let kkt = kkt_residuals(inst, lambda, &prof.actions, Some(&prof.marginals));
    let q = prof
        .actions
        .iter()
        .position(|x| *x > 0.0)
        .map_or(inst.m() + 1, |i| i + 1);
    Ok(AirsSolution {
        actions: prof.actions,
        lambda,
        q,
        spend,
        gross,
        iterations,
        kkt,
        scheme,
    })
}

/// Resolve a spend jump: find the critical ratio `segment avg / flat slope`
/// inside the final bracket, pin that segment to its stretch, and raise it
/// until the budget is exhausted.
fn land_on_jump(
    cost: &CostFunction,
    alphas: &[f64],
    seg: &SegmentStructure,
    lam_lo: f64,
    lam_hi: f64,
    budget: f64,
    epsilon: f64,
) -> Option<(f64, Profile, f64)> {
    let stretches = cost.flat_stretches();
    let lo_bound = lam_lo * (1.0 - 1e-9);
    let hi_bound = lam_hi * (1.0 + 1e-9);
    let mut cands: Vec<(f64, usize, FlatStretch)> = Vec::new();
    for (i, avg) in seg.segment_avgs.iter().enumerate() {
        for fs in &stretches {
            let lam = avg / fs.slope;
            if lam >= lo_bound && lam <= hi_bound {
                cands.push((lam, i, *fs));
            }
        }
    }
    // Larger lambda first: its base spend is smaller, so actions only move up.
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite candidates"));

    let mut idx = 0;
    while idx < cands.len() {
        let lam = cands[idx].0;
        let mut forced = vec![(cands[idx].1, cands[idx].2)];
        let mut j = idx + 1;
        // Exact ratio ties put several segments on the same critical price.
        while j < cands.len() && (lam - cands[j].0).abs() <= 1e-12 * lam {
            forced.push((cands[j].1, cands[j].2));
            j += 1;
        }
        idx = j;
        if let Some(hit) = exhaust_at(cost, alphas, seg, lam, &forced, budget, epsilon) {
            return Some(hit);
        }
    }
    None
}

fn exhaust_at(
    cost: &CostFunction,
    alphas: &[f64],
    seg: &SegmentStructure,
    lam: f64,
    forced: &[(usize, FlatStretch)],
    budget: f64,
    epsilon: f64,
) -> Option<(f64, Profile, f64)> {
    let mut prof = profile_for(cost, seg, lam, forced);
    let base = total_spend(alphas, cost, &prof.actions);
    if !(base <= budget * (1.0 + 1e-9)) {
        return None;
    }
    let mut deficit = budget - base;
    let mut order: Vec<&(usize, FlatStretch)> = forced.iter().collect();
    order.sort_by(|a, b| b.0.cmp(&a.0));
    for (si, fs) in order {
        if deficit <= 0.0 {
            break;
        }
        let w = seg.segment_weights[*si];
        let floor_cost = cost.eval(fs.lo);
        let room = w * (cost.eval(fs.hi) - floor_cost);
        let target = if room <= deficit {
            fs.hi
        } else {
            cost.inverse(floor_cost + deficit / w).clamp(fs.lo, fs.hi)
        };
        for k in seg.type_range(*si) {
            prof.actions[k] = target;
        }
        deficit -= w * (cost.eval(target) - floor_cost);
    }
    let spend = total_spend(alphas, cost, &prof.actions);
    if (spend - budget).abs() <= epsilon * budget {
        Some((lam, prof, spend))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFunction, Instance};

    const EPS: f64 = 1e-9;

    fn two_type_quadratic() -> Instance {
        Instance::new(
            vec![1.0, 2.0],
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            CostFunction::power(2.0, 1.0).unwrap(),
            5.0,
        )
        .unwrap()
    }

    #[test]
    fn single_type_quadratic_closed_form() {
        let inst = Instance::new(
            vec![1.0],
            vec![1.0],
            vec![1.0],
            CostFunction::power(2.0, 1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        assert!((sol.actions[0] - 1.0).abs() < EPS);
        assert!((sol.lambda - 0.5).abs() < EPS);
        assert!((sol.spend - 1.0).abs() < EPS);
        assert!((sol.gross - 1.0).abs() < EPS);
        assert_eq!(sol.q, 1);
    }

    #[test]
    fn two_type_quadratic_closed_form() {
        // Segments (1/3, 1); actions 1/(6 lambda) and 1/(2 lambda); budget 5
        // forces lambda = 1/sqrt(15).
        let inst = two_type_quadratic();
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        let lam = 1.0 / 15.0_f64.sqrt();
        assert!((sol.lambda - lam).abs() < 1e-8, "lambda {}", sol.lambda);
        assert!((sol.actions[0] - 15.0_f64.sqrt() / 6.0).abs() < 1e-8);
        assert!((sol.actions[1] - 15.0_f64.sqrt() / 2.0).abs() < 1e-8);
        assert!((sol.gross - 2.0 * 15.0_f64.sqrt() / 3.0).abs() < 1e-8);
        assert!((sol.spend - 5.0).abs() < 1e-9 * 5.0);
        assert_eq!(sol.q, 1);
        assert!(sol.kkt.max_violation() < 1e-9, "{:?}", sol.kkt);
        assert_eq!(sol.scheme.breakpoints().len(), 2);
        assert!((sol.scheme.rewards()[0] - 5.0 / 6.0).abs() < 1e-8);
        assert!((sol.scheme.rewards()[1] - 25.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn actions_for_lambda_matches_hand_values() {
        let inst = two_type_quadratic();
        let seg = compute_segments(inst.weights(), &inst.alphas());
        let lam = 1.0 / 15.0_f64.sqrt();
        let x = actions_for_lambda(&inst, &seg, lam).unwrap();
        assert!((x[0] - 1.0 / (6.0 * lam)).abs() < 1e-12);
        assert!((x[1] - 1.0 / (2.0 * lam)).abs() < 1e-12);
        assert!(actions_for_lambda(&inst, &seg, 0.0).is_err());
        assert!(actions_for_lambda(&inst, &seg, -1.0).is_err());
    }

    #[test]
    fn spend_decreases_in_lambda() {
        let inst = two_type_quadratic();
        let alphas = inst.alphas();
        let seg = compute_segments(inst.weights(), &alphas);
        let mut prev = f64::INFINITY;
        for lam in [0.1, 0.2, 0.4, 0.8, 1.6] {
            let x = actions_for_lambda(&inst, &seg, lam).unwrap();
            let s = total_spend(&alphas, inst.cost(), &x);
            assert!(s <= prev + 1e-12, "spend not monotone at lambda {}", lam);
            prev = s;
        }
    }

    #[test]
    fn flat_cost_spreads_top_segment_to_exhaust_budget() {
        // One type, kinked cost with slopes (e, 1+e) around 1: the optimum
        // sits on the second stretch at 2/(1+e).
        let e = 0.01;
        let inst = Instance::new(
            vec![1.0],
            vec![1.0],
            vec![1.0],
            CostFunction::piecewise_linear(vec![e, 1.0 + e], vec![1.0]).unwrap(),
            1.0,
        )
        .unwrap();
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        assert!((sol.actions[0] - 2.0 / (1.0 + e)).abs() < 1e-10, "action {}", sol.actions[0]);
        assert!((sol.spend - 1.0).abs() < 1e-10);
        assert!((sol.lambda - 1.0 / (1.0 + e)).abs() < 1e-10);
        assert!(sol.kkt.max_violation() < 1e-9, "{:?}", sol.kkt);
    }

    #[test]
    fn linear_cost_concentrates_on_top_type() {
        // h = 1/t, c(x) = x: everything goes to the most able type.
        let inst = Instance::new(
            vec![0.1, 10.0],
            vec![1.0, 1.0],
            vec![10.0, 0.1],
            CostFunction::linear(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.q, 2);
        assert_eq!(sol.actions[0], 0.0);
        assert!((sol.actions[1] - 10.0).abs() < 1e-9, "action {}", sol.actions[1]);
        assert!((sol.spend - 1.0).abs() < 1e-10);
        assert!((sol.gross - 10.0).abs() < 1e-9);
    }

    #[test]
    fn vanishing_budget_vanishing_actions() {
        let inst = Instance::new(
            vec![1.0, 2.0],
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            CostFunction::power(2.0, 1.0).unwrap(),
            1e-12,
        )
        .unwrap();
        let sol = solve_airs(&inst, &SolveOptions::default()).unwrap();
        assert!(sol.gross < 1e-5);
        assert!((sol.spend - 1e-12).abs() <= 1e-10 * 1e-12 + 1e-30);
    }

    #[test]
    fn iteration_starvation_is_reported() {
        let inst = two_type_quadratic();
        let err = solve_airs(&inst, &SolveOptions { epsilon: 1e-10, max_iter: 1 }).unwrap_err();
        assert!(matches!(err, SolverError::NoConvergence { iterations: 1, .. }));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let inst = two_type_quadratic();
        for eps in [0.0, -1.0, 1.0, f64::NAN] {
            assert!(matches!(
                solve_airs(&inst, &SolveOptions { epsilon: eps, max_iter: 10 }),
                Err(SolverError::InvalidEpsilon)
            ));
        }
    }
}
