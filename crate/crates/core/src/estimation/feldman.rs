//! Likelihood-ratio-ordered confidence belts for a Gaussian measurement of
//! a parameter bounded above (fidelity ≤ 1), following the Feldman-Cousins
//! construction.
//!
//! For each candidate parameter value μ ≤ bound, the acceptance region
//! {x : L(x|μ)/L(x|μ̂(x)) ≥ c} is an interval whose endpoints follow in
//! closed form from the Gaussian likelihood with μ̂(x) = min(x, bound); the
//! threshold c is tuned by bisection until the region holds the requested
//! probability. Inverting the belt at the measured value gives an interval
//! whose endpoints never exceed the physical bound.

use crate::error::{Error, Result};

/// Standard normal CDF.
fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// A precomputed confidence belt for fixed (σ, bound, confidence level).
#[derive(Debug, Clone)]
pub struct FeldmanCousinsBelt {
    sigma: f64,
    bound: f64,
    cl: f64,
    mu: Vec<f64>,
    x_lo: Vec<f64>,
    x_hi: Vec<f64>,
}

/// Default parameter-grid resolution.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// The grid spans bound − GRID_SPAN_SIGMA·σ up to bound.
pub const GRID_SPAN_SIGMA: f64 = 8.0;

impl FeldmanCousinsBelt {
    pub fn build(sigma: f64, bound: f64, cl: f64) -> Result<Self> {
        Self::build_with_grid(sigma, bound, cl, DEFAULT_GRID_POINTS)
    }

    pub fn build_with_grid(sigma: f64, bound: f64, cl: f64, grid_points: usize) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain("feldman_cousins", format!("sigma must be positive, got {sigma}")));
        }
        if !(cl > 0.5 && cl < 1.0) {
            return Err(Error::domain("feldman_cousins", format!("confidence level {cl} outside (0.5, 1)")));
        }
        if grid_points < 3 {
            return Err(Error::domain("feldman_cousins", "need at least 3 grid points"));
        }
        let mut mu = Vec::with_capacity(grid_points);
        let mut x_lo = Vec::with_capacity(grid_points);
        let mut x_hi = Vec::with_capacity(grid_points);
        let lo = bound - GRID_SPAN_SIGMA * sigma;
        for i in 0..grid_points {
            let m = lo + (bound - lo) * i as f64 / (grid_points - 1) as f64;
            let (a, b) = acceptance_interval((bound - m) / sigma, cl);
            mu.push(m);
            x_lo.push(m + a * sigma);
            x_hi.push(m + b * sigma);
        }
        // belt edges must be monotone for the inversion below
        for i in 1..grid_points {
            if x_lo[i] < x_lo[i - 1] - 1e-12 * sigma || x_hi[i] < x_hi[i - 1] - 1e-12 * sigma {
                return Err(Error::NonConvergence {
                    context: "feldman_cousins",
                    message: format!("belt edge not monotone at grid index {i}"),
                });
            }
        }
        Ok(FeldmanCousinsBelt { sigma, bound, cl, mu, x_lo, x_hi })
    }

    pub fn confidence_level(&self) -> f64 {
        self.cl
    }

    /// Invert the belt at a measured value: the confidence interval is the
    /// set of μ whose acceptance region contains the measurement. Outside
    /// the grid the far-field belt continues with unit slope (exact for a
    /// Gaussian far from the bound).
    pub fn interval(&self, measured: f64) -> (f64, f64) {
        let upper = if measured >= *self.x_lo.last().unwrap() {
            self.bound
        } else if measured < self.x_lo[0] {
            self.mu[0] - (self.x_lo[0] - measured)
        } else {
            invert_edge(&self.x_lo, &self.mu, measured)
        };
        let lower = if measured > *self.x_hi.last().unwrap() {
            self.bound
        } else if measured <= self.x_hi[0] {
            self.mu[0] - (self.x_hi[0] - measured)
        } else {
            invert_edge(&self.x_hi, &self.mu, measured)
        };
        (lower.min(self.bound), upper.min(self.bound))
    }
}

/// Largest μ (by interpolation) at which `edge(μ)` equals `x`.
fn invert_edge(edge: &[f64], mu: &[f64], x: f64) -> f64 {
    // boundary between the last index with edge <= x and the next
    let mut lo = 0usize;
    let mut hi = edge.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if edge[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let span = edge[hi] - edge[lo];
    if span <= 0.0 {
        return mu[hi];
    }
    let frac = (x - edge[lo]) / span;
    mu[lo] + frac * (mu[hi] - mu[lo])
}

/// Acceptance interval endpoints (a, b) in σ units around μ for a Gaussian
/// with the physical bound at distance m = (bound − μ)/σ ≥ 0.
///
/// The likelihood-ratio region at threshold exp(−λ) is
///   [μ − √(2λ)σ, μ + √(2λ)σ]            while the right edge stays ≤ bound,
///   [μ − √(2λ)σ, (μ+bound)/2 + λσ²/(bound−μ)]   beyond it,
/// and for μ = bound the ratio is 1 on the whole upper side.
fn acceptance_interval(m: f64, cl: f64) -> (f64, f64) {
    let coverage = |lambda: f64| -> (f64, f64, f64) {
        let half = (2.0 * lambda).sqrt();
        let a = -half;
        let b = if m == 0.0 {
            f64::INFINITY
        } else if half <= m {
            half
        } else {
            // linear branch of the log likelihood ratio past the bound
            m / 2.0 + lambda / m
        };
        let cov = phi(b) - phi(a);
        (cov, a, b)
    };
    let mut lo = 0.0f64;
    let mut hi = 400.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if coverage(mid).0 < cl {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (_, a, b) = coverage(hi);
    (a, b)
}

/// Feldman-Cousins confidence interval for a single Gaussian measurement of
/// a parameter physically bounded above.
pub fn feldman_cousins_interval(
    measured: f64,
    sigma: f64,
    bound_upper: f64,
    cl: f64,
) -> Result<(f64, f64)> {
    let belt = FeldmanCousinsBelt::build(sigma, bound_upper, cl)?;
    Ok(belt.interval(measured))
}
