//! Effort cost functions.
//!
//! A cost function maps quality `x >= 0` to a producer's base effort
//! `c(x)`, with `c(0) = 0`, `c` convex and strictly increasing. Two
//! families are supported:
//!
//! * power: `c(x) = scale * x^exponent`, `exponent >= 1`;
//! * piecewise linear: a convex polyline through the origin, given by
//!   nondecreasing positive slopes plus the knots where the slope changes.
//!
//! A convex polyline is not differentiable at its knots, so marginal cost
//! is interval-valued. [`CostFunction::subderiv`] returns the closed
//! interval of sub-derivatives at a point; [`CostFunction::marginal_inverse`]
//! returns the closed set of points whose sub-derivative interval contains
//! a given marginal value. Solvers take the lower endpoint of that set as
//! the canonical action and spread actions across a flat stretch only when
//! exhausting a budget.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Closed numeric interval. `hi` may be infinite (unbounded flat stretch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Distance from `v` to the interval, zero when contained.
    pub fn gap_to(&self, v: f64) -> f64 {
        (self.lo - v).max(v - self.hi).max(0.0)
    }
}

/// Maximal stretch of qualities sharing one marginal cost `slope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatStretch {
    pub slope: f64,
    pub lo: f64,
    /// Upper end of the stretch; infinite on the terminal slope.
    pub hi: f64,
}

/// Serialization-facing cost description, as written in instance files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    Power {
        exponent: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    PiecewiseLinear { slopes: Vec<f64>, knots: Vec<f64> },
}

fn default_scale() -> f64 {
    1.0
}

/// Validated convex cost function.
#[derive(Debug, Clone)]
pub enum CostFunction {
    Power { exponent: f64, scale: f64 },
    PiecewiseLinear(Polyline),
}

/// Convex polyline through the origin with precomputed knot costs.
#[derive(Debug, Clone)]
pub struct Polyline {
    slopes: Vec<f64>,
    knots: Vec<f64>,
    knot_costs: Vec<f64>,
}

impl Polyline {
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k < x);
        let (x0, c0) = self.base(i);
        c0 + self.slopes[i] * (x - x0)
    }

    /// Left endpoint and cost of segment `i` (segment 0 starts at the origin).
    fn base(&self, i: usize) -> (f64, f64) {
        if i == 0 {
            (0.0, 0.0)
        } else {
            (self.knots[i - 1], self.knot_costs[i - 1])
        }
    }
}

impl CostFunction {
    pub fn power(exponent: f64, scale: f64) -> Result<Self, ModelError> {
        if !exponent.is_finite() || exponent < 1.0 {
            return Err(ModelError::ExponentBelowOne);
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(ModelError::NonPositiveScale);
        }
        Ok(CostFunction::Power { exponent, scale })
    }

    /// Linear effort `c(x) = scale * x`, the degenerate power family.
    pub fn linear(scale: f64) -> Result<Self, ModelError> {
        CostFunction::power(1.0, scale)
    }

    pub fn piecewise_linear(slopes: Vec<f64>, knots: Vec<f64>) -> Result<Self, ModelError> {
        if slopes.is_empty() {
            return Err(ModelError::NoSlopes);
        }
        let ok_slopes = slopes.iter().all(|s| s.is_finite() && *s > 0.0)
            && slopes.windows(2).all(|w| w[0] <= w[1]);
        if !ok_slopes {
            return Err(ModelError::BadSlopes);
        }
        let ok_knots = knots.len() + 1 == slopes.len()
            && knots.iter().all(|k| k.is_finite() && *k > 0.0)
            && knots.windows(2).all(|w| w[0] < w[1]);
        if !ok_knots {
            return Err(ModelError::BadKnots);
        }
        let mut knot_costs = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (k, s) in knots.iter().zip(&slopes) {
            acc += s * (k - prev);
            prev = *k;
            knot_costs.push(acc);
        }
        Ok(CostFunction::PiecewiseLinear(Polyline { slopes, knots, knot_costs }))
    }

    pub fn from_spec(spec: &CostSpec) -> Result<Self, ModelError> {
        match spec {
            CostSpec::Power { exponent, scale } => CostFunction::power(*exponent, *scale),
            CostSpec::PiecewiseLinear { slopes, knots } => {
                CostFunction::piecewise_linear(slopes.clone(), knots.clone())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CostFunction::Power { exponent, scale } => {
                if *exponent == 1.0 {
                    scale * x
                } else {
                    scale * x.powf(*exponent)
                }
            }
            CostFunction::PiecewiseLinear(p) => p.eval(x),
        }
    }

    /// Closed sub-derivative interval at `x`, degenerate wherever `c` is
    /// differentiable. At `x = 0` the forward derivative is used for both
    /// endpoints.
    pub fn subderiv(&self, x: f64) -> Interval {
        match self {
            CostFunction::Power { exponent, scale } => {
                let d = if *exponent == 1.0 {
                    *scale
                } else {
                    scale * exponent * x.powf(exponent - 1.0)
                };
                Interval::point(d)
            }
            CostFunction::PiecewiseLinear(p) => {
                let i = p.knots.partition_point(|&k| k < x);
                if i < p.knots.len() && p.knots[i] == x {
                    Interval { lo: p.slopes[i], hi: p.slopes[i + 1] }
                } else {
                    Interval::point(p.slopes[i])
                }
            }
        }
    }

    /// Inverse of `c`; values at or below zero map to zero.
    pub fn inverse(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        match self {
            CostFunction::Power { exponent, scale } => {
                if *exponent == 1.0 {
                    v / scale
                } else {
                    (v / scale).powf(1.0 / exponent)
                }
            }
            CostFunction::PiecewiseLinear(p) => {
                let i = p.knot_costs.partition_point(|&c| c < v);
                let (x0, c0) = p.base(i);
                x0 + (v - c0) / p.slopes[i]
            }
        }
    }

    /// Forward marginal cost at zero quality.
    pub fn marginal_at_zero(&self) -> f64 {
        match self {
            CostFunction::Power { exponent, scale } => {
                if *exponent == 1.0 {
                    *scale
                } else {
                    0.0
                }
            }
            CostFunction::PiecewiseLinear(p) => p.slopes[0],
        }
    }

    /// Supremum of marginal cost; infinite for strictly convex powers.
    pub fn sup_slope(&self) -> f64 {
        match self {
            CostFunction::Power { exponent, scale } => {
                if *exponent == 1.0 {
                    *scale
                } else {
                    f64::INFINITY
                }
            }
            CostFunction::PiecewiseLinear(p) => *p.slopes.last().expect("nonempty slopes"),
        }
    }

    /// Set `{ x : g in subderiv(x) }` as a closed interval.
    ///
    /// Marginals strictly below the marginal cost at zero yield the point
    /// `{0}` (quality cannot go negative); at equality the interval runs to
    /// the end of the initial slope stretch. Marginals strictly above
    /// [`CostFunction::sup_slope`] have an empty preimage and are rejected,
    /// which can only happen for bounded-slope families.
    pub fn marginal_inverse(&self, g: f64) -> Result<Interval, ModelError> {
        if g < self.marginal_at_zero() {
            return Ok(Interval::point(0.0));
        }
        match self {
            CostFunction::Power { exponent, scale } => {
                if *exponent == 1.0 {
                    if g == *scale {
                        Ok(Interval { lo: 0.0, hi: f64::INFINITY })
                    } else {
                        Err(ModelError::MarginalAboveRange { marginal: g, sup: *scale })
                    }
                } else {
                    let y = (g / (scale * exponent)).powf(1.0 / (exponent - 1.0));
                    Ok(Interval::point(y))
                }
            }
            CostFunction::PiecewiseLinear(p) => {
                let n = p.slopes.len();
                let sup = p.slopes[n - 1];
                if g > sup {
                    return Err(ModelError::MarginalAboveRange { marginal: g, sup });
                }
                let i = p.slopes.partition_point(|&s| s < g);
                if p.slopes[i] == g {
                    // Full run of segments sharing this slope.
                    let mut j = i;
                    while j + 1 < n && p.slopes[j + 1] == g {
                        j += 1;
                    }
                    let lo = if i == 0 { 0.0 } else { p.knots[i - 1] };
                    let hi = if j == n - 1 { f64::INFINITY } else { p.knots[j] };
                    Ok(Interval { lo, hi })
                } else {
                    // Strictly between adjacent slopes: the knot separating them.
                    Ok(Interval::point(p.knots[i - 1]))
                }
            }
        }
    }

    /// Maximal flat marginal-cost stretches, low to high. Empty exactly when
    /// the marginal cost is strictly increasing.
    pub fn flat_stretches(&self) -> Vec<FlatStretch> {
        match self {
            CostFunction::Power { exponent, scale } => {
                if *exponent == 1.0 {
                    vec![FlatStretch { slope: *scale, lo: 0.0, hi: f64::INFINITY }]
                } else {
                    Vec::new()
                }
            }
            CostFunction::PiecewiseLinear(p) => {
                let n = p.slopes.len();
                let mut out = Vec::new();
                let mut i = 0;
                while i < n {
                    let mut j = i;
                    while j + 1 < n && p.slopes[j + 1] == p.slopes[i] {
                        j += 1;
                    }
                    out.push(FlatStretch {
                        slope: p.slopes[i],
                        lo: if i == 0 { 0.0 } else { p.knots[i - 1] },
                        hi: if j == n - 1 { f64::INFINITY } else { p.knots[j] },
                    });
                    i = j + 1;
                }
                out
            }
        }
    }

    /// True when some quality range shares one marginal cost, so budget
    /// exhaustion may require spreading actions along that range.
    pub fn has_flat_marginals(&self) -> bool {
        !self.flat_stretches().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> CostFunction {
        CostFunction::power(2.0, 1.0).unwrap()
    }

    fn bent() -> CostFunction {
        // Slope 1 on [0, 1], slope 2 beyond.
        CostFunction::piecewise_linear(vec![1.0, 2.0], vec![1.0]).unwrap()
    }

    #[test]
    fn power_point_values() {
        let c = quadratic();
        assert_eq!(c.eval(3.0), 9.0);
        assert_eq!(c.subderiv(3.0), Interval::point(6.0));
        assert_eq!(c.inverse(9.0), 3.0);
        assert_eq!(c.marginal_inverse(6.0).unwrap(), Interval::point(3.0));
        assert_eq!(c.marginal_inverse(0.0).unwrap(), Interval::point(0.0));
        assert_eq!(c.marginal_at_zero(), 0.0);
        assert!(c.flat_stretches().is_empty());
    }

    #[test]
    fn polyline_point_values() {
        let c = bent();
        assert_eq!(c.eval(2.0), 3.0);
        assert_eq!(c.subderiv(1.0), Interval { lo: 1.0, hi: 2.0 });
        assert_eq!(c.subderiv(0.5), Interval::point(1.0));
        assert_eq!(c.inverse(3.0), 2.0);
        // Strictly between the slopes: the preimage is the knot itself.
        assert_eq!(c.marginal_inverse(1.5).unwrap(), Interval::point(1.0));
        // On a slope: the preimage is the whole stretch.
        assert_eq!(c.marginal_inverse(1.0).unwrap(), Interval { lo: 0.0, hi: 1.0 });
        assert_eq!(c.marginal_inverse(2.0).unwrap(), Interval { lo: 1.0, hi: f64::INFINITY });
        assert_eq!(c.marginal_inverse(0.5).unwrap(), Interval::point(0.0));
        assert!(matches!(
            c.marginal_inverse(2.5),
            Err(ModelError::MarginalAboveRange { .. })
        ));
    }

    #[test]
    fn polyline_eval_matches_slope_accumulation() {
        let c =
            CostFunction::piecewise_linear(vec![0.5, 0.5, 2.0, 3.5], vec![0.4, 1.1, 2.0]).unwrap();
        // March a fine grid accumulating slope * dx; the polyline is exactly
        // this integral, so the two only differ by rounding.
        let mut acc = 0.0;
        let mut x = 0.0;
        let dx = 1e-4;
        while x < 3.0 {
            let mid = x + dx / 2.0;
            acc += c.subderiv(mid).lo * dx;
            x += dx;
            assert!(
                (c.eval(x) - acc).abs() <= 1e-9 * (1.0 + acc.abs()),
                "eval {} accumulated {} at x = {}",
                c.eval(x),
                acc,
                x
            );
        }
    }

    #[test]
    fn linear_family_marginals() {
        let c = CostFunction::linear(0.75).unwrap();
        assert_eq!(c.eval(4.0), 3.0);
        assert_eq!(c.sup_slope(), 0.75);
        assert_eq!(c.marginal_inverse(0.5).unwrap(), Interval::point(0.0));
        assert_eq!(c.marginal_inverse(0.75).unwrap(), Interval { lo: 0.0, hi: f64::INFINITY });
        assert!(c.marginal_inverse(0.76).is_err());
        let fs = c.flat_stretches();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].slope, 0.75);
    }

    #[test]
    fn inverse_round_trips() {
        for c in [
            quadratic(),
            bent(),
            CostFunction::power(1.7, 0.3).unwrap(),
            CostFunction::piecewise_linear(vec![0.2, 0.2, 1.0], vec![0.5, 2.0]).unwrap(),
        ] {
            for x in [0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 7.5] {
                let v = c.eval(x);
                let back = c.inverse(v);
                assert!(
                    (back - x).abs() <= 1e-12 * (1.0 + x),
                    "round trip {} -> {} -> {}",
                    x,
                    v,
                    back
                );
            }
        }
    }

    #[test]
    fn equal_adjacent_slopes_merge_into_one_stretch() {
        let c = CostFunction::piecewise_linear(vec![1.0, 1.0, 2.0], vec![0.5, 1.5]).unwrap();
        assert_eq!(c.marginal_inverse(1.0).unwrap(), Interval { lo: 0.0, hi: 1.5 });
        let fs = c.flat_stretches();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0], FlatStretch { slope: 1.0, lo: 0.0, hi: 1.5 });
        assert_eq!(fs[1], FlatStretch { slope: 2.0, lo: 1.5, hi: f64::INFINITY });
    }

    #[test]
    fn constructor_rejections() {
        assert!(matches!(CostFunction::power(0.9, 1.0), Err(ModelError::ExponentBelowOne)));
        assert!(matches!(CostFunction::power(2.0, 0.0), Err(ModelError::NonPositiveScale)));
        assert!(matches!(
            CostFunction::piecewise_linear(vec![], vec![]),
            Err(ModelError::NoSlopes)
        ));
        assert!(matches!(
            CostFunction::piecewise_linear(vec![2.0, 1.0], vec![1.0]),
            Err(ModelError::BadSlopes)
        ));
        assert!(matches!(
            CostFunction::piecewise_linear(vec![1.0, 2.0], vec![]),
            Err(ModelError::BadKnots)
        ));
        assert!(matches!(
            CostFunction::piecewise_linear(vec![1.0, 2.0, 3.0], vec![2.0, 1.0]),
            Err(ModelError::BadKnots)
        ));
    }
}
