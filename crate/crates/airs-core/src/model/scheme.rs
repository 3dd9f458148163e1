//! Step reward schemes.
//!
//! An anonymous independent scheme pays every producer the same function of
//! her own quality. The optimal such scheme is a right-continuous step
//! function: zero below the first breakpoint, then a nondecreasing reward
//! ladder. Given nondecreasing target actions, [`reward_ladder`] builds the
//! cheapest ladder for which each type weakly prefers its own rung: the
//! reward increment between consecutive rungs exactly compensates the
//! *higher* type's marginal effort, leaving it indifferent to the rung
//! below and leaving lower types strictly unwilling to climb.

use super::{CostFunction, ModelError};

/// Step reward function: pays `rewards[i]` on `[breakpoints[i], breakpoints[i+1])`
/// and zero below the first breakpoint.
///
/// Stored canonically: breakpoints strictly increasing, rewards nondecreasing,
/// no leading zero-reward rungs.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRewardScheme {
    breakpoints: Vec<f64>,
    rewards: Vec<f64>,
}

impl StepRewardScheme {
    /// Scheme paying zero everywhere.
    pub fn empty() -> Self {
        StepRewardScheme { breakpoints: Vec::new(), rewards: Vec::new() }
    }

    /// Validate and canonicalize: repeated breakpoints collapse to their last
    /// (largest) reward, and leading zero rewards are dropped.
    pub fn new(breakpoints: Vec<f64>, rewards: Vec<f64>) -> Result<Self, ModelError> {
        if breakpoints.len() != rewards.len() {
            return Err(ModelError::BadScheme);
        }
        let finite = breakpoints.iter().chain(&rewards).all(|v| v.is_finite());
        let nonneg = breakpoints.iter().chain(&rewards).all(|v| *v >= 0.0);
        let sorted = breakpoints.windows(2).all(|w| w[0] <= w[1])
            && rewards.windows(2).all(|w| w[0] <= w[1]);
        if !finite || !nonneg || !sorted {
            return Err(ModelError::BadScheme);
        }
        let mut bp: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut rw: Vec<f64> = Vec::with_capacity(rewards.len());
        for (b, r) in breakpoints.into_iter().zip(rewards) {
            if bp.last() == Some(&b) {
                *rw.last_mut().expect("parallel vectors") = r;
            } else {
                bp.push(b);
                rw.push(r);
            }
        }
        let lead = rw.iter().take_while(|r| **r == 0.0).count();
        bp.drain(..lead);
        rw.drain(..lead);
        Ok(StepRewardScheme { breakpoints: bp, rewards: rw })
    }

    /// Reward at quality `x`: the rung of the largest breakpoint at or below `x`.
    pub fn reward_at(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        if i == 0 {
            0.0
        } else {
            self.rewards[i - 1]
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }
}

/// Per-type rewards for nondecreasing `actions` under ability factors `h`:
/// `R_1 = c(x_1) h_1`, then `R_k = R_{k-1} + (c(x_k) - c(x_{k-1})) h_k`.
///
/// Each step is clamped at zero so that 1-ulp inversions in the cost
/// evaluation cannot produce a decreasing ladder.
pub fn reward_ladder(cost: &CostFunction, h: &[f64], actions: &[f64]) -> Vec<f64> {
    debug_assert_eq!(h.len(), actions.len());
    debug_assert!(actions.windows(2).all(|w| w[0] <= w[1]), "actions must be sorted");
    let mut out = Vec::with_capacity(actions.len());
    let mut prev_cost = 0.0;
    let mut prev_reward = 0.0;
    for (x, hv) in actions.iter().zip(h) {
        let c = cost.eval(*x);
        let reward = prev_reward + ((c - prev_cost) * hv).max(0.0);
        out.push(reward);
        prev_cost = c;
        prev_reward = reward;
    }
    out
}

/// Step scheme whose rungs sit at the given nondecreasing actions with
/// [`reward_ladder`] rewards. Repeated actions share a rung.
pub fn scheme_from_actions(cost: &CostFunction, h: &[f64], actions: &[f64]) -> StepRewardScheme {
    let rewards = reward_ladder(cost, h, actions);
    StepRewardScheme::new(actions.to_vec(), rewards)
        .expect("ladder rewards are nondecreasing by construction")
}
