//! Problem data: producer types, effort costs, and step reward schemes.
//!
//! An [`Instance`] aggregates producers into types: a sorted list of type
//! values, a positive expected count per type, and a strictly decreasing
//! positive ability factor `h` (abler producers pay less for the same
//! quality). Effort cost is separable, `cost(x, t) = c(x) * h(t)`, with `c`
//! a convex strictly increasing [`CostFunction`] fixed across types.
//!
//! The derived per-type weights [`alpha_weights`] fold the incentive
//! externality between adjacent types into a single budget coefficient, so
//! that a reward schedule paying each type `k` for quality `x_k` costs the
//! designer exactly `sum_k alpha_k * c(x_k)`.

mod cost;
mod instance;
mod scheme;

pub use cost::{CostFunction, CostSpec, FlatStretch, Interval};
pub use instance::{alpha_weights, HFamily, HSpec, Instance, InstanceSpec};
pub use scheme::{reward_ladder, scheme_from_actions, StepRewardScheme};

/// Rejection reasons for instance data, cost parameters, and schemes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("instance has no types")]
    Empty,
    #[error("types, weights, and h must have equal lengths")]
    LengthMismatch,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("weight at position {0} is not strictly positive")]
    NonPositiveWeight(usize),
    #[error("h value at position {0} is not strictly positive")]
    NonPositiveH(usize),
    #[error("h not decreasing: types {0} and {1} (sorted order) violate strict decrease")]
    HNotDecreasing(usize, usize),
    #[error("duplicate type {0} carries conflicting h values")]
    DuplicateHMismatch(f64),
    #[error("budget is not strictly positive")]
    NonPositiveBudget,
    #[error("reciprocal h requires strictly positive types")]
    ReciprocalNeedsPositiveTypes,
    #[error("power cost exponent must be finite and at least 1")]
    ExponentBelowOne,
    #[error("cost scale must be finite and strictly positive")]
    NonPositiveScale,
    #[error("piecewise-linear cost needs at least one slope")]
    NoSlopes,
    #[error("piecewise-linear slopes must be finite, positive, and nondecreasing")]
    BadSlopes,
    #[error("knots must be finite, positive, strictly increasing, and one fewer than slopes")]
    BadKnots,
    #[error("marginal value {marginal} exceeds the terminal marginal cost {sup}")]
    MarginalAboveRange { marginal: f64, sup: f64 },
    #[error("scheme breakpoints and rewards must be finite, nonnegative, and nondecreasing")]
    BadScheme,
}
