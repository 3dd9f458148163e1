//! Hardness of reward design under per-type cost functions.
//!
//! When every type may carry an arbitrary (non-separable) cost curve,
//! deciding whether a budget can buy a target output encodes subset sum:
//! producer i can make quality 1 for free or stretch to `1 + w_i` at cost
//! `w_i`, so hitting output `n + W` within budget `W` means paying some
//! producers exactly their stretch costs summing to `W`. The catch is
//! anonymity: producers sharing a type face the same rewards and act
//! alike, so only type-closed subsets are available, and the encoding is
//! faithful precisely when the weights are distinct.

use crate::model::StepRewardScheme;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HardnessError {
    #[error("weights must be positive")]
    ZeroWeight,
    #[error("{classes} distinct types exceed the exhaustive-search cap of 20")]
    TooManyClasses { classes: usize },
}

/// Reward-design instance with one free unit of quality per producer and a
/// per-type stretch of `w` extra quality at cost `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralCostInstance {
    pub types: Vec<u64>,
    pub budget: u64,
    pub target_gross: u64,
}

/// Decision outcome of the exhaustive designer.
#[derive(Debug, Clone)]
pub struct GeneralCostAnswer {
    pub achievable: bool,
    pub best_gross: u64,
    /// Scheme meeting the target: one rung `1 + w` paying `w` per chosen
    /// type. Present only when achievable.
    pub witness: Option<StepRewardScheme>,
}

/// Encode `exists S: sum of weights[S] == target` as a reward-design
/// instance: budget `target`, output target `target + n`.
pub fn reduce_subset_sum(weights: &[u64], target: u64) -> GeneralCostInstance {
    GeneralCostInstance {
        types: weights.to_vec(),
        budget: target,
        target_gross: target + weights.len() as u64,
    }
}

/// Exhaustive designer over type-closed producer subsets. Every producer
/// ships the free unit; bumping a whole type class of value `w` and
/// multiplicity `m` adds `m * w` output and costs `m * w` reward, so the
/// target is reached exactly when a class subset spends the whole budget.
pub fn brute_force_general_cost(
    inst: &GeneralCostInstance,
) -> Result<GeneralCostAnswer, HardnessError> {
    if inst.types.iter().any(|w| *w == 0) {
        return Err(HardnessError::ZeroWeight);
    }
    let mut classes: Vec<(u64, u64)> = Vec::new();
    let mut sorted = inst.types.clone();
    sorted.sort_unstable();
    for w in sorted {
        match classes.last_mut() {
            Some((v, m)) if *v == w => *m += 1,
            _ => classes.push((w, 1)),
        }
    }
    if classes.len() > 20 {
        return Err(HardnessError::TooManyClasses { classes: classes.len() });
    }

    let n = inst.types.len() as u64;
    let mut best_gross = n;
    let mut best_mask = 0u32;
    for mask in 0..(1u32 << classes.len()) {
        let spend: u64 = classes
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, (v, m))| v * m)
            .sum();
        if spend <= inst.budget && n + spend > best_gross {
            best_gross = n + spend;
            best_mask = mask;
        }
    }

    let achievable = best_gross >= inst.target_gross;
    let witness = achievable.then(|| {
        let chosen: Vec<u64> = classes
            .iter()
            .enumerate()
            .filter(|(j, _)| best_mask >> j & 1 == 1)
            .map(|(_, (v, _))| *v)
            .collect();
        let breakpoints: Vec<f64> = chosen.iter().map(|v| 1.0 + *v as f64).collect();
        let rewards: Vec<f64> = chosen.iter().map(|v| *v as f64).collect();
        StepRewardScheme::new(breakpoints, rewards).expect("sorted positive rungs")
    });
    Ok(GeneralCostAnswer { achievable, best_gross, witness })
}

/// Exact subset-sum decision by bitset dynamic programming.
pub fn subset_sum_exact(weights: &[u64], target: u64) -> bool {
    let words = (target / 64 + 1) as usize;
    let mut reach = vec![0u64; words];
    reach[0] = 1;
    for &w in weights {
        if w > target {
            continue;
        }
        let (skip, bits) = ((w / 64) as usize, (w % 64) as u32);
        for i in (skip..words).rev() {
            let mut shifted = reach[i - skip] << bits;
            if bits > 0 && i > skip {
                shifted |= reach[i - skip - 1] >> (64 - bits);
            }
            reach[i] |= shifted;
        }
    }
    reach[(target / 64) as usize] >> (target % 64) & 1 == 1
}

/// Both sides of the reduction on one input. The answers provably agree
/// when the weights are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCheck {
    pub subset_sum: bool,
    pub general_cost: bool,
}

pub fn check_reduction(weights: &[u64], target: u64) -> Result<ReductionCheck, HardnessError> {
    let answer = brute_force_general_cost(&reduce_subset_sum(weights, target))?;
    Ok(ReductionCheck {
        subset_sum: subset_sum_exact(weights, target),
        general_cost: answer.achievable,
    })
}
