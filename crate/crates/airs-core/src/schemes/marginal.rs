//! Monte Carlo marginalization of parameter-dependent reward curves.
//!
//! When the reward a producer faces depends on a private parameter the
//! designer cannot condition on, the relevant anonymous curve is the
//! expectation over that parameter. This estimates the curve on a fixed
//! grid with a seeded generator so tables are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MarginalError {
    #[error("need at least two samples for a standard error")]
    TooFewSamples,
    #[error("grid must be nonempty")]
    EmptyGrid,
}

/// Estimated expected reward per grid point.
#[derive(Debug, Clone)]
pub struct MarginalizedTable {
    pub grid: Vec<f64>,
    pub means: Vec<f64>,
    pub std_errs: Vec<f64>,
    pub samples: usize,
}

/// Estimate `E_theta reward(x, theta)` on `grid` from `samples` draws of
/// `sample`. One parameter draw is shared across the whole grid so each
/// sampled curve is internally consistent; running means and variances
/// accumulate by Welford updates.
pub fn marginalize_scheme<R, S>(
    mut reward: R,
    mut sample: S,
    grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<MarginalizedTable, MarginalError>
where
    R: FnMut(f64, f64) -> f64,
    S: FnMut(&mut ChaCha8Rng) -> f64,
{
    if grid.is_empty() {
        return Err(MarginalError::EmptyGrid);
    }
    if samples < 2 {
        return Err(MarginalError::TooFewSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = vec![0.0f64; grid.len()];
    let mut m2 = vec![0.0f64; grid.len()];
    for n in 1..=samples {
        let theta = sample(&mut rng);
        for (i, &x) in grid.iter().enumerate() {
            let v = reward(x, theta);
            let delta = v - means[i];
            means[i] += delta / n as f64;
            m2[i] += delta * (v - means[i]);
        }
    }
    let std_errs = m2
        .iter()
        .map(|s| (s / (samples as f64 - 1.0) / samples as f64).sqrt())
        .collect();
    Ok(MarginalizedTable { grid: grid.to_vec(), means, std_errs, samples })
}
