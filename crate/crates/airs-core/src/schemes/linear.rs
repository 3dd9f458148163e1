//! Budget-optimal linear scheme `R(x) = p * x`.
//!
//! Per-type responses and the spend both increase with the price, so the
//! best affordable price is found by bisection. Piecewise-linear costs
//! make the spend jump at prices of the form `slope * h_k`; the solver
//! lands on the jump and raises the indifferent types until the budget is
//! spent, starting from the top type, which keeps actions nondecreasing.

use crate::model::{CostFunction, FlatStretch, Instance, Interval, ModelError};
use crate::solver::SolverError;

/// Outcome of the best linear scheme.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub price: f64,
    /// Chosen best response per type (nondecreasing).
    pub actions: Vec<f64>,
    pub gross: f64,
    pub spend: f64,
    pub iterations: usize,
}

/// Set of optimal actions against price `p` for a producer with cost
/// `c(x) * h_t`: all points whose marginal cost brackets `p / h_t`. The
/// error marks an unbounded response (price above every marginal cost).
pub fn linear_best_response(
    price: f64,
    h_t: f64,
    cost: &CostFunction,
) -> Result<Interval, ModelError> {
    cost.marginal_inverse(price / h_t)
}

fn spend_floor(inst: &Instance, price: f64) -> (Vec<f64>, f64) {
    let mut actions = Vec::with_capacity(inst.m());
    let mut spend = 0.0;
    for k in 0..inst.m() {
        let x = match linear_best_response(price, inst.h()[k], inst.cost()) {
            Ok(iv) => iv.lo,
            Err(_) => f64::INFINITY,
        };
        spend += inst.weights()[k] * price * x;
        actions.push(x);
    }
    (actions, spend)
}

pub fn solve_linear(
    inst: &Instance,
    opts: &crate::solver::SolveOptions,
) -> Result<LinearSolution, SolverError> {
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(SolverError::InvalidEpsilon);
    }
    let budget = inst.budget();
    let mut iterations = 0usize;

    let mut p_lo = 0.0f64;
    let mut p_hi = 1.0f64;
    while iterations < opts.max_iter {
        iterations += 1;
        let (_, s) = spend_floor(inst, p_hi);
        if s > budget {
            break;
        }
        p_lo = p_hi;
        p_hi *= 2.0;
    }

    let spread = p_hi - p_lo;
    let has_flats = inst.cost().has_flat_marginals();
    let mut last_spend = f64::NAN;
    let mut result: Option<(f64, Vec<f64>, f64)> = None;

    while iterations < opts.max_iter {
        iterations += 1;
        let p = 0.5 * (p_lo + p_hi);
        let (actions, spend) = spend_floor(inst, p);
        last_spend = spend;
        if (spend - budget).abs() <= opts.epsilon * budget {
            result = Some((p, actions, spend));
            break;
        }
        if spend > budget {
            p_hi = p;
        } else {
            p_lo = p;
        }
        let width = p_hi - p_lo;
        if width <= opts.epsilon * spread && has_flats {
            // Spend only jumps at critical prices `slope * h_k`; between
            // them it still grows linearly in `p`, so a failed landing
            // means the crossing is continuous and bisection resumes.
            if let Some(landed) = land_on_jump(inst, p_lo, p_hi, budget, opts.epsilon) {
                result = Some(landed);
                break;
            }
        }
        if width <= f64::EPSILON * p_hi {
            break;
        }
    }

    let (price, actions, spend) = result.ok_or(SolverError::NoConvergence {
        iterations,
        spend: last_spend,
        budget,
    })?;
    let gross = inst.weights().iter().zip(&actions).map(|(w, x)| w * x).sum();
    Ok(LinearSolution { price, actions, gross, spend, iterations })
}

/// Critical prices `slope * h_k` inside the final bracket, largest first;
/// at each, the tied types are free anywhere on their stretch, so raise
/// them top type down until the budget is gone.
fn land_on_jump(
    inst: &Instance,
    p_lo: f64,
    p_hi: f64,
    budget: f64,
    epsilon: f64,
) -> Option<(f64, Vec<f64>, f64)> {
    let stretches = inst.cost().flat_stretches();
    let lo_bound = p_lo * (1.0 - 1e-9);
    let hi_bound = p_hi * (1.0 + 1e-9);
    let mut cands: Vec<(f64, usize, FlatStretch)> = Vec::new();
    for (k, h) in inst.h().iter().enumerate() {
        for fs in &stretches {
            let p = fs.slope * h;
            if p >= lo_bound && p <= hi_bound {
                cands.push((p, k, *fs));
            }
        }
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite candidates"));

    let mut idx = 0;
    while idx < cands.len() {
        let price = cands[idx].0;
        let mut tied = vec![(cands[idx].1, cands[idx].2)];
        let mut j = idx + 1;
        while j < cands.len() && (price - cands[j].0).abs() <= 1e-12 * price {
            tied.push((cands[j].1, cands[j].2));
            j += 1;
        }
        idx = j;

        let (mut actions, _) = spend_floor(inst, price);
        for (k, fs) in &tied {
            actions[*k] = fs.lo;
        }
        let mut spend: f64 = inst
            .weights()
            .iter()
            .zip(&actions)
            .map(|(w, x)| w * price * x)
            .sum();
        if !(spend <= budget * (1.0 + 1e-9)) {
            continue;
        }
        let mut deficit = budget - spend;
        tied.sort_by(|a, b| b.0.cmp(&a.0));
        for (k, fs) in &tied {
            if deficit <= 0.0 {
                break;
            }
            let rate = inst.weights()[*k] * price;
            let target = (fs.lo + deficit / rate).clamp(fs.lo, fs.hi);
            deficit -= rate * (target - actions[*k]);
            actions[*k] = target;
        }
        spend = inst
            .weights()
            .iter()
            .zip(&actions)
            .map(|(w, x)| w * price * x)
            .sum();
        if (spend - budget).abs() <= epsilon * budget {
            return Some((price, actions, spend));
        }
    }
    None
}
