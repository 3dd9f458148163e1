//! Grid brute force for cross-checking the solver on small instances.
//!
//! [`brute_force_p2`] enumerates nondecreasing action tuples on a uniform
//! grid of pitch `step`. Rounding the true optimum down to the grid stays
//! feasible and loses at most `step` per type, so the grid optimum is
//! within `total_weight * step` of the true value; any solver answer
//! outside that band is wrong, independently of how the solver works.

use crate::model::{CostFunction, Instance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("exhaustive search supports at most 3 types, got {m}")]
    TooManyTypes { m: usize },
    #[error("grid of {cells} cells exceeds the {cap} cap; coarsen the step")]
    GridTooLarge { cells: u128, cap: u128 },
    #[error("grid step must be finite and positive")]
    BadStep,
}

/// Uniform search grid `0, step, 2 step, ..` covering `[0, x_max]`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_max: f64,
    pub step: f64,
}

impl GridSpec {
    /// Smallest grid certain to contain the optimum: no single type can
    /// burn more than the whole budget on its own alpha coefficient.
    pub fn default_for(inst: &Instance, step: f64) -> GridSpec {
        let min_alpha = inst.alphas().iter().cloned().fold(f64::INFINITY, f64::min);
        GridSpec { x_max: inst.cost().inverse(inst.budget() / min_alpha), step }
    }

    fn points(&self) -> Result<usize, OracleError> {
        if !(self.step > 0.0) || !self.step.is_finite() || !self.x_max.is_finite() {
            return Err(OracleError::BadStep);
        }
        Ok((self.x_max / self.step).ceil() as usize + 1)
    }
}

const CELL_CAP: u128 = 200_000_000;

#[derive(Debug, Clone)]
pub struct BruteForceSolution {
    pub actions: Vec<f64>,
    pub gross: f64,
    pub spend: f64,
}

/// Exhaustive grid optimum of the designer's reduced problem for up to 3
/// types. The last coordinate rides a two-pointer: within a row the
/// leftover budget only shrinks, so its best index only moves down.
pub fn brute_force_p2(inst: &Instance, grid: &GridSpec) -> Result<BruteForceSolution, OracleError> {
    let m = inst.m();
    if m > 3 {
        return Err(OracleError::TooManyTypes { m });
    }
    let n = grid.points()?;
    let cells: u128 = if m == 3 { (n as u128) * (n as u128) } else { n as u128 };
    if cells > CELL_CAP {
        return Err(OracleError::GridTooLarge { cells, cap: CELL_CAP });
    }

    let xs: Vec<f64> = (0..n).map(|j| j as f64 * grid.step).collect();
    let cs: Vec<f64> = xs.iter().map(|x| inst.cost().eval(*x)).collect();
    let (w, a, budget) = (inst.weights(), inst.alphas(), inst.budget());

    let mut best_gross = -1.0;
    let mut best: Vec<usize> = vec![0; m];
    match m {
        1 => {
            let mut j = n - 1;
            while a[0] * cs[j] > budget {
                j -= 1;
            }
            best_gross = w[0] * xs[j];
            best[0] = j;
        }
        2 => {
            let mut j = n - 1;
            for i in 0..n {
                let r = budget - a[0] * cs[i];
                if r < 0.0 {
                    break;
                }
                while a[1] * cs[j] > r {
                    j -= 1;
                }
                if j < i {
                    break;
                }
                let g = w[0] * xs[i] + w[1] * xs[j];
                if g > best_gross {
                    best_gross = g;
                    best = vec![i, j];
                }
            }
        }
        _ => {
            for i1 in 0..n {
                let r1 = budget - a[0] * cs[i1];
                if r1 < 0.0 {
                    break;
                }
                let mut j = n - 1;
                for i2 in i1..n {
                    let r2 = r1 - a[1] * cs[i2];
                    if r2 < 0.0 {
                        break;
                    }
                    while a[2] * cs[j] > r2 {
                        j -= 1;
                    }
                    if j < i2 {
                        break;
                    }
                    let g = w[0] * xs[i1] + w[1] * xs[i2] + w[2] * xs[j];
                    if g > best_gross {
                        best_gross = g;
                        best = vec![i1, i2, j];
                    }
                }
            }
        }
    }

    let actions: Vec<f64> = best.iter().map(|j| xs[*j]).collect();
    let spend = best.iter().zip(a.iter()).map(|(j, ak)| ak * cs[*j]).sum();
    Ok(BruteForceSolution { actions, gross: best_gross, spend })
}

/// Grid argmax of `reward(x) - c(x) * h_t`; ties go to the larger action.
pub fn brute_force_best_action<R: Fn(f64) -> f64>(
    reward: R,
    h_t: f64,
    cost: &CostFunction,
    grid: &GridSpec,
) -> Result<(f64, f64), OracleError> {
    let n = grid.points()?;
    if n as u128 > CELL_CAP {
        return Err(OracleError::GridTooLarge { cells: n as u128, cap: CELL_CAP });
    }
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..n {
        let x = j as f64 * grid.step;
        let u = reward(x) - cost.eval(x) * h_t;
        if u >= best.1 {
            best = (x, u);
        }
    }
    Ok(best)
}
