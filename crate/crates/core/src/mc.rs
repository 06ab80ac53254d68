//! Seeded Monte-Carlo plumbing: per-sample counter-based RNG streams and
//! order-stable reductions.
//!
//! Every sample draws from its own ChaCha stream keyed by (seed, sample
//! index), and sums are pairwise, so a result for a given (seed, samples)
//! pair does not depend on how the sample range is chunked or scheduled.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mean and standard error of a Monte-Carlo average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// RNG for one sample: same key for the whole run, stream = sample index.
pub(crate) fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Pairwise sum with Kahan-compensated leaves.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &v in values {
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean ± standard error over a slice of per-sample values.
pub(crate) fn estimate(values: &[f64]) -> MonteCarloEstimate {
    let n = values.len() as f64;
    let sum = pairwise_sum(values);
    let mean = sum / n;
    if values.len() < 2 {
        return MonteCarloEstimate { mean, stderr: 0.0, samples: values.len() as u64 };
    }
    let mut devs: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&devs) / (n - 1.0);
    devs.clear();
    MonteCarloEstimate { mean, stderr: (var / n).sqrt(), samples: values.len() as u64 }
}
