//! Monte Carlo check of the precision estimators on normal samples.
//!
//! Trials are split into fixed-size chunks. Chunk `k` draws from a ChaCha20
//! generator seeded with the master seed on stream `k`, and partial sums are
//! combined in chunk order, so results depend only on the parameters and the
//! seed, never on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precision::{c4, ci_with_quantile, sample_stats, stdev_stderr, t_quantile};

pub const GENERATOR: &str = "ChaCha20";
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n: usize,
    pub sigma: f64,
    pub mu: f64,
    pub trials: usize,
    pub seed: u64,
    pub generator: String,
    /// Mean of the unbiased standard deviation over trials.
    pub mean_s_star: f64,
    /// Mean of the n-1 sample standard deviation over trials.
    pub mean_s: f64,
    /// Fraction of trials whose 95% interval for s* contains sigma.
    pub ci_coverage: f64,
}

/// Simulation with the default population mean `mu = 10·sigma`.
pub fn simulate(n: usize, sigma: f64, trials: usize, seed: u64) -> Result<SimResult, SimError> {
    simulate_with_mean(n, sigma, 10.0 * sigma, trials, seed)
}

pub fn simulate_with_mean(
    n: usize,
    sigma: f64,
    mu: f64,
    trials: usize,
    seed: u64,
) -> Result<SimResult, SimError> {
    if n < 2 {
        return Err(SimError::InvalidParameters(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SimError::InvalidParameters(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !mu.is_finite() {
        return Err(SimError::InvalidParameters(format!(
            "mu must be finite, got {mu}"
        )));
    }
    if trials == 0 {
        return Err(SimError::InvalidParameters(
            "trials must be at least 1".to_string(),
        ));
    }
    if n > u32::MAX as usize {
        return Err(SimError::InvalidParameters(format!("n is too large: {n}")));
    }

    let c4n = c4(n).expect("n >= 2");
    let t = t_quantile(0.975, (n - 1) as u32).expect("df >= 1");
    let normal = Normal::new(mu, sigma).expect("sigma > 0");
    let chunks = trials.div_ceil(CHUNK);

    let partials: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = CHUNK.min(trials - k * CHUNK);
            let mut sample = vec![0.0; n];
            let (mut sum_s, mut sum_s_star, mut covered) = (0.0, 0.0, 0usize);
            for _ in 0..count {
                for x in sample.iter_mut() {
                    *x = normal.sample(&mut rng);
                }
                let s = sample_stats(&sample).expect("n >= 2").s;
                let s_star = s / c4n;
                let se = stdev_stderr(s, s_star, n).expect("n >= 2");
                if ci_with_quantile(s_star, se, t).contains(sigma) {
                    covered += 1;
                }
                sum_s += s;
                sum_s_star += s_star;
            }
            (sum_s, sum_s_star, covered)
        })
        .collect();

    let (sum_s, sum_s_star, covered) = partials
        .into_iter()
        .fold((0.0, 0.0, 0), |(a, b, c), (x, y, z)| (a + x, b + y, c + z));
    let trials_f = trials as f64;
    Ok(SimResult {
        n,
        sigma,
        mu,
        trials,
        seed,
        generator: GENERATOR.to_string(),
        mean_s_star: sum_s_star / trials_f,
        mean_s: sum_s / trials_f,
        ci_coverage: covered as f64 / trials_f,
    })
}
