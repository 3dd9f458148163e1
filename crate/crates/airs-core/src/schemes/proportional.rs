//! Proportional-to-output reward splitting and its step-scheme dominator.
//!
//! Under proportional splitting each of n agents receives
//! `B * x_i / sum_j x_j`, a contest whose equilibrium wastes budget on
//! rent: every agent is paid its full share although the same actions are
//! supportable by a reward ladder that only covers incremental costs.
//! [`airs_from_proportional`] builds that ladder, certifying that a step
//! scheme weakly beats proportional splitting within the same budget.

use crate::model::{reward_ladder, CostFunction, StepRewardScheme};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropError {
    #[error("proportional splitting needs at least two agents")]
    TooFewAgents,
    #[error("invalid input: {0}")]
    BadInput(&'static str),
    #[error("best-response iteration did not settle after {rounds} rounds")]
    NotConverged { rounds: usize },
    #[error("action profile violates first-order conditions by {residual}")]
    NotAnEquilibrium { residual: f64 },
}

/// Pure-strategy equilibrium of the proportional-splitting contest.
#[derive(Debug, Clone)]
pub struct PropEquilibrium {
    pub types: Vec<f64>,
    pub actions: Vec<f64>,
    /// Total output.
    pub gross: f64,
    /// Designer outlay: the whole budget whenever anyone produces.
    pub spend: f64,
    /// Per-agent distance from the first-order conditions.
    pub foc_residuals: Vec<f64>,
    pub rounds: usize,
}

/// Two-agent equilibrium for ability `h = 1/t` and cost `c(x) = x`:
/// shares solve `B * x_j / total^2 = 1 / t_i`, giving
/// `x_1 = B t1^2 t2 / (t1+t2)^2`, `x_2 = B t1 t2^2 / (t1+t2)^2` and total
/// output `B t1 t2 / (t1+t2)`.
pub fn prop_equilibrium_closed_form(t1: f64, t2: f64, budget: f64) -> PropEquilibrium {
    assert!(t1 > 0.0 && t2 > 0.0 && budget > 0.0, "positive types and budget");
    let s = t1 + t2;
    let x1 = budget * t1 * t1 * t2 / (s * s);
    let x2 = budget * t1 * t2 * t2 / (s * s);
    PropEquilibrium {
        types: vec![t1, t2],
        actions: vec![x1, x2],
        gross: budget * t1 * t2 / s,
        spend: budget,
        foc_residuals: vec![0.0, 0.0],
        rounds: 0,
    }
}

/// Marginal prize for raising one's output when the others produce `s`.
fn pool_gain(budget: f64, s: f64, x: f64) -> f64 {
    budget * s / ((x + s) * (x + s))
}

/// Agent's exact best response to opponents producing `s` in total.
fn best_response_to_pool(budget: f64, s: f64, h: f64, cost: &CostFunction) -> f64 {
    if s <= 0.0 {
        // An empty pool has no maximizer (any positive output grabs the
        // whole budget, smaller is better); stay out.
        return 0.0;
    }
    if pool_gain(budget, s, 0.0) <= h * cost.marginal_at_zero() {
        return 0.0;
    }
    let mut hi = s;
    for _ in 0..1100 {
        if pool_gain(budget, s, hi) < h * cost.subderiv(hi).lo {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let x = 0.5 * (lo + hi);
        let gain = pool_gain(budget, s, x);
        let sd = cost.subderiv(x);
        if gain > h * sd.hi {
            lo = x;
        } else if gain < h * sd.lo {
            hi = x;
        } else {
            return x;
        }
        if hi - lo <= 1e-15 * (1.0 + hi) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn foc_residuals(budget: f64, h: &[f64], cost: &CostFunction, actions: &[f64]) -> Vec<f64> {
    let total: f64 = actions.iter().sum();
    actions
        .iter()
        .zip(h)
        .map(|(&x, &hi)| {
            let s = total - x;
            if s <= 0.0 {
                // Alone in the pool any positive output grabs the whole
                // budget, so shrinking (or entering) always pays.
                return f64::INFINITY;
            }
            let gain = pool_gain(budget, s, x);
            let sd = cost.subderiv(x);
            // Raising output must not pay; marginal cost may only exceed
            // the prize where (nearly) nothing is produced.
            let up = (gain - hi * sd.hi).max(0.0);
            let down = x.min(1.0) * (hi * sd.lo - gain).max(0.0);
            up.max(down)
        })
        .collect()
}

/// Damped simultaneous best-response iteration for the splitting contest.
/// Converges for moderate ability spreads; extreme spreads oscillate and
/// are reported as [`PropError::NotConverged`].
pub fn prop_equilibrium_numeric(
    types: &[f64],
    h: &[f64],
    cost: &CostFunction,
    budget: f64,
    tol: f64,
    max_rounds: usize,
) -> Result<PropEquilibrium, PropError> {
    if h.len() < 2 {
        return Err(PropError::TooFewAgents);
    }
    if types.len() != h.len() {
        return Err(PropError::BadInput("one type per agent"));
    }
    if !h.iter().all(|v| v.is_finite() && *v > 0.0) {
        return Err(PropError::BadInput("abilities must be finite and positive"));
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(PropError::BadInput("budget must be finite and positive"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(PropError::BadInput("tolerance must lie in (0, 1)"));
    }

    let n = h.len();
    let mut x: Vec<f64> = h.iter().map(|hi| cost.inverse(budget / (n as f64 * hi))).collect();
    for round in 1..=max_rounds {
        let total: f64 = x.iter().sum();
        let mut shift = 0.0f64;
        let scale = 1.0 + x.iter().cloned().fold(0.0, f64::max);
        let next: Vec<f64> = x
            .iter()
            .zip(h)
            .map(|(&xi, &hi)| {
                let br = best_response_to_pool(budget, total - xi, hi, cost);
                let nx = 0.5 * xi + 0.5 * br;
                shift = shift.max((nx - xi).abs());
                nx
            })
            .collect();
        x = next;
        if shift <= tol * scale {
            // The damped map only asymptotes to zero; agents whose best
            // response is to stay out exit exactly.
            let total: f64 = x.iter().sum();
            for i in 0..n {
                if x[i] > 0.0
                    && x[i] <= 4.0 * tol * scale
                    && best_response_to_pool(budget, total - x[i], h[i], cost) == 0.0
                {
                    x[i] = 0.0;
                }
            }
            let residuals = foc_residuals(budget, h, cost, &x);
            let total: f64 = x.iter().sum();
            return Ok(PropEquilibrium {
                types: types.to_vec(),
                actions: x,
                gross: total,
                spend: if total > 0.0 { budget } else { 0.0 },
                foc_residuals: residuals,
                rounds: round,
            });
        }
    }
    Err(PropError::NotConverged { rounds: max_rounds })
}

/// Step scheme paying each equilibrium action of the splitting contest as
/// a best response while spending no more than the contest does. Refuses
/// profiles whose first-order residuals exceed `tol`.
pub fn airs_from_proportional(
    h: &[f64],
    cost: &CostFunction,
    budget: f64,
    eq: &PropEquilibrium,
    tol: f64,
) -> Result<StepRewardScheme, PropError> {
    if eq.actions.len() != h.len() {
        return Err(PropError::BadInput("one action per agent"));
    }
    let residuals = foc_residuals(budget, h, cost, &eq.actions);
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst <= tol) {
        return Err(PropError::NotAnEquilibrium { residual: worst });
    }

    // Ladder order: actions ascending; equal actions carry zero-cost steps
    // so their relative order is immaterial.
    let mut idx: Vec<usize> = (0..h.len()).collect();
    idx.sort_by(|&a, &b| {
        eq.actions[a]
            .partial_cmp(&eq.actions[b])
            .expect("finite actions")
            .then(h[b].partial_cmp(&h[a]).expect("finite abilities"))
    });
    let actions: Vec<f64> = idx.iter().map(|&i| eq.actions[i]).collect();
    let hs: Vec<f64> = idx.iter().map(|&i| h[i]).collect();
    let rungs = reward_ladder(cost, &hs, &actions);
    let scheme =
        StepRewardScheme::new(actions.clone(), rungs).expect("ladder rewards are monotone");

    let spend: f64 = actions.iter().map(|&x| scheme.reward_at(x)).sum();
    debug_assert!(
        spend <= budget * (1.0 + 1e-9),
        "ladder spend {} exceeds contest budget {}",
        spend,
        budget
    );
    Ok(scheme)
}
