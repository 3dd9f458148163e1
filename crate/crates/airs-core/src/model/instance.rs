//! Validated instances and the alpha weight transform.

use serde::{Deserialize, Serialize};

use super::{CostFunction, CostSpec, ModelError};

/// Serialization-facing instance shape, as written in input files.
///
/// `h` is either an explicit per-type array or a named family;
/// `agents` optionally lists individual producer types for the
/// full-information proportional game and is ignored by the aggregated
/// solvers. Unknown fields are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub types: Vec<f64>,
    pub weights: Vec<f64>,
    pub h: HSpec,
    pub cost: CostSpec,
    pub budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HSpec {
    Values(Vec<f64>),
    Family { family: HFamily },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HFamily {
    /// `h(t) = 1 / t`; requires strictly positive types.
    Reciprocal,
}

impl HSpec {
    /// Resolve to per-type values aligned with `types`.
    pub fn resolve(&self, types: &[f64]) -> Result<Vec<f64>, ModelError> {
        match self {
            HSpec::Values(v) => Ok(v.clone()),
            HSpec::Family { family: HFamily::Reciprocal } => {
                if types.iter().any(|t| *t <= 0.0) {
                    return Err(ModelError::ReciprocalNeedsPositiveTypes);
                }
                Ok(types.iter().map(|t| 1.0 / t).collect())
            }
        }
    }
}

/// Validated, immutable problem instance.
///
/// Types are sorted ascending with duplicates merged (weights summed), all
/// weights and h values strictly positive, h strictly decreasing, and the
/// budget strictly positive.
#[derive(Debug, Clone)]
pub struct Instance {
    types: Vec<f64>,
    weights: Vec<f64>,
    h: Vec<f64>,
    cost: CostFunction,
    budget: f64,
}

impl Instance {
    pub fn new(
        types: Vec<f64>,
        weights: Vec<f64>,
        h: Vec<f64>,
        cost: CostFunction,
        budget: f64,
    ) -> Result<Self, ModelError> {
        if types.is_empty() {
            return Err(ModelError::Empty);
        }
        if types.len() != weights.len() || types.len() != h.len() {
            return Err(ModelError::LengthMismatch);
        }
        if types.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("types"));
        }
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("weights"));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("h"));
        }
        if !budget.is_finite() {
            return Err(ModelError::NonFinite("budget"));
        }
        if let Some(i) = weights.iter().position(|w| *w <= 0.0) {
            return Err(ModelError::NonPositiveWeight(i));
        }
        if let Some(i) = h.iter().position(|v| *v <= 0.0) {
            return Err(ModelError::NonPositiveH(i));
        }
        if budget <= 0.0 {
            return Err(ModelError::NonPositiveBudget);
        }

        let mut rows: Vec<(f64, f64, f64)> = types
            .into_iter()
            .zip(weights)
            .zip(h)
            .map(|((t, w), hv)| (t, w, hv))
            .collect();
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite types"));

        // Merge duplicate types; their h values must agree exactly.
        let mut merged: Vec<(f64, f64, f64)> = Vec::with_capacity(rows.len());
        for (t, w, hv) in rows {
            match merged.last_mut() {
                Some(last) if last.0 == t => {
                    if last.2 != hv {
                        return Err(ModelError::DuplicateHMismatch(t));
                    }
                    last.1 += w;
                }
                _ => merged.push((t, w, hv)),
            }
        }
        for i in 1..merged.len() {
            if merged[i].2 >= merged[i - 1].2 {
                return Err(ModelError::HNotDecreasing(i - 1, i));
            }
        }

        Ok(Instance {
            types: merged.iter().map(|r| r.0).collect(),
            weights: merged.iter().map(|r| r.1).collect(),
            h: merged.iter().map(|r| r.2).collect(),
            cost,
            budget,
        })
    }

    pub fn from_spec(spec: &InstanceSpec) -> Result<Self, ModelError> {
        let h = spec.h.resolve(&spec.types)?;
        let cost = CostFunction::from_spec(&spec.cost)?;
        Instance::new(spec.types.clone(), spec.weights.clone(), h, cost, spec.budget)
    }

    /// Number of distinct types.
    pub fn m(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[f64] {
        &self.types
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Per-type budget coefficients; see [`alpha_weights`].
    pub fn alphas(&self) -> Vec<f64> {
        alpha_weights(&self.weights, &self.h)
    }
}

/// Budget coefficients `alpha_k = h_k * F_k - h_{k+1} * F_{k+1}`, where
/// `F_k` is the weight mass at type `k` and above (and `h_{m+1} = 0`).
///
/// With `h` strictly decreasing and weights positive, every `alpha_k` is
/// strictly positive, `alpha_k` strictly exceeds `h_k * w_k` below the top
/// type, equals it at the top, and the total telescopes to `h_1 * sum(w)`.
pub fn alpha_weights(weights: &[f64], h: &[f64]) -> Vec<f64> {
    let m = weights.len();
    debug_assert_eq!(m, h.len());
    let mut alpha = vec![0.0; m];
    let mut suffix = 0.0;
    for k in (0..m).rev() {
        let incl = suffix + weights[k];
        alpha[k] = h[k] * incl - if k + 1 < m { h[k + 1] * suffix } else { 0.0 };
        suffix = incl;
    }
    alpha
}
