//! Exact spin-dependent-kick dynamics via coherent-state branch algebra.
//!
//! A state is a finite superposition of (spin, coherent amplitude) branches.
//! Coherent states are closed under every operator used here — the kick
//! operator U(θ) = cos(θ/2)·𝟙 + i·sin(θ/2)·[D(iη)σ̂₋ + D(−iη)σ̂₊], free
//! harmonic evolution, and the qubit phase — so the Ramsey sequence is
//! evaluated without any Fock-space truncation. Thermal motion enters as a
//! Glauber-Sudarshan average over initial coherent amplitudes, either by
//! seeded Monte-Carlo or by deterministic radial quadrature.
//!
//! Sign conventions (kick displacement D(iη) with the spin flip up→down,
//! motional rotation α → α·e^(−iωτ), spin-up phase e^(+iδτ/2)) are pinned
//! by requiring the two-pulse Ramsey probability to equal the closed form
//! P↑ = ½ − ½·cos(δτ + η²·sin ωτ)·exp[−η²(1−cos ωτ)(2n̄+1)].

use crate::error::{Error, Result};
use crate::mc::{estimate, pairwise_sum, sample_rng, MonteCarloEstimate};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Qubit spin label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// One branch of the wavefunction: |spin⟩ ⊗ |α⟩ with a complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub spin: Spin,
    pub alpha: Complex64,
    pub weight: Complex64,
}

/// A weighted list of (spin, coherent state) branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinMotionState {
    branches: Vec<Branch>,
}

impl SpinMotionState {
    /// Single-branch state |spin⟩ ⊗ |alpha⟩.
    pub fn pure(spin: Spin, alpha: Complex64) -> Self {
        SpinMotionState {
            branches: vec![Branch { spin, alpha, weight: Complex64::new(1.0, 0.0) }],
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Norm functional Σᵢⱼ wᵢ*·wⱼ·⟨αᵢ|αⱼ⟩·[spinᵢ = spinⱼ]. Real part of a
    /// Hermitian form; the imaginary residue is discarded.
    pub fn norm(&self) -> f64 {
        self.spin_projection(None).re
    }

    fn spin_projection(&self, spin: Option<Spin>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, bi) in self.branches.iter().enumerate() {
            if let Some(s) = spin {
                if bi.spin != s {
                    continue;
                }
            }
            acc += bi.weight.conj() * bi.weight;
            for bj in self.branches.iter().skip(i + 1) {
                if bj.spin != bi.spin {
                    continue;
                }
                let cross = bi.weight.conj() * bj.weight * coherent_overlap(bi.alpha, bj.alpha);
                acc += cross + cross.conj();
            }
        }
        acc
    }
}

/// Coherent-state displacement: D(β)|α⟩ = phase·|α+β⟩ with
/// phase = exp((β·α* − β*·α)/2), a unit-modulus number.
pub fn displace(alpha: Complex64, beta: Complex64) -> (Complex64, Complex64) {
    let exponent = (beta * alpha.conj() - beta.conj() * alpha) / 2.0;
    (alpha + beta, exponent.exp())
}

/// Coherent-state overlap ⟨a|b⟩ = exp(−|a|²/2 − |b|²/2 + a*·b).
pub fn coherent_overlap(a: Complex64, b: Complex64) -> Complex64 {
    let exponent = a.conj() * b - Complex64::new((a.norm_sqr() + b.norm_sqr()) / 2.0, 0.0);
    exponent.exp()
}

/// Apply the impulsive kick U(θ) = cos(θ/2)·𝟙 + i·sin(θ/2)·[D(iη)σ̂₋ + D(−iη)σ̂₊].
///
/// Each branch maps to a cos term (spin and α unchanged) plus a sin term
/// (spin flipped, α displaced by +iη for up→down and −iη for down→up).
/// No renormalization is applied; unitarity holds by construction.
pub fn apply_sdk(state: &SpinMotionState, theta: f64, eta: f64) -> SpinMotionState {
    let half = theta / 2.0;
    let cos_w = Complex64::new(half.cos(), 0.0);
    let sin_w = Complex64::new(0.0, half.sin());
    let mut branches = Vec::with_capacity(2 * state.branches.len());
    for b in &state.branches {
        if cos_w.re != 0.0 {
            branches.push(Branch { spin: b.spin, alpha: b.alpha, weight: b.weight * cos_w });
        }
        if sin_w.im != 0.0 {
            let kick = match b.spin {
                Spin::Up => Complex64::new(0.0, eta),
                Spin::Down => Complex64::new(0.0, -eta),
            };
            let (alpha, phase) = displace(b.alpha, kick);
            branches.push(Branch {
                spin: b.spin.flipped(),
                alpha,
                weight: b.weight * sin_w * phase,
            });
        }
    }
    SpinMotionState { branches }
}

/// Ramsey sequence parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyConfig {
    /// Lamb-Dicke parameter η
    pub eta: f64,
    /// Trap secular frequency ω (rad/s)
    pub trap_omega: f64,
    /// Qubit splitting δ (rad/s)
    pub qubit_delta: f64,
    /// Ramsey wait time τ (s)
    pub wait_time: f64,
    /// Mean thermal occupation n̄
    pub nbar: f64,
}

impl RamseyConfig {
    pub fn new(eta: f64, trap_omega: f64, qubit_delta: f64, wait_time: f64, nbar: f64) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::domain("RamseyConfig", format!("eta must be >= 0, got {eta}")));
        }
        if !(trap_omega > 0.0) || !trap_omega.is_finite() {
            return Err(Error::domain("RamseyConfig", format!("trap_omega must be > 0, got {trap_omega}")));
        }
        if !(wait_time >= 0.0) || !wait_time.is_finite() {
            return Err(Error::domain("RamseyConfig", format!("wait_time must be >= 0, got {wait_time}")));
        }
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::domain("RamseyConfig", format!("nbar must be >= 0, got {nbar}")));
        }
        if !qubit_delta.is_finite() {
            return Err(Error::domain("RamseyConfig", "qubit_delta must be finite"));
        }
        Ok(RamseyConfig { eta, trap_omega, qubit_delta, wait_time, nbar })
    }
}

/// Free evolution over the Ramsey wait: α → α·e^(−iωτ), the spin-up weight
/// picks up e^(+iδτ/2) and the spin-down weight e^(−iδτ/2). The harmonic
/// global phase e^(−iωτ/2) is dropped; it cancels in every probability.
pub fn free_evolve(state: &SpinMotionState, cfg: &RamseyConfig) -> SpinMotionState {
    let rotation = Complex64::from_polar(1.0, -cfg.trap_omega * cfg.wait_time);
    let up_phase = Complex64::from_polar(1.0, cfg.qubit_delta * cfg.wait_time / 2.0);
    let branches = state
        .branches
        .iter()
        .map(|b| Branch {
            spin: b.spin,
            alpha: b.alpha * rotation,
            weight: b.weight
                * match b.spin {
                    Spin::Up => up_phase,
                    Spin::Down => up_phase.conj(),
                },
        })
        .collect();
    SpinMotionState { branches }
}

const NORM_TOLERANCE: f64 = 1e-8;
const IMAG_RESIDUE_TOLERANCE: f64 = 1e-10;

/// Probability of measuring spin up after tracing out the motion.
pub fn measure_up(state: &SpinMotionState) -> Result<f64> {
    measure_spin(state, Spin::Up)
}

/// Probability of measuring spin down.
pub fn measure_down(state: &SpinMotionState) -> Result<f64> {
    measure_spin(state, Spin::Down)
}

fn measure_spin(state: &SpinMotionState, spin: Spin) -> Result<f64> {
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NormViolation { norm, tolerance: NORM_TOLERANCE });
    }
    let p = state.spin_projection(Some(spin));
    debug_assert!(p.im.abs() <= IMAG_RESIDUE_TOLERANCE, "imaginary residue {}", p.im);
    Ok(p.re.clamp(0.0, 1.0))
}

/// Two-pulse Ramsey sequence π/2 — wait τ — π/2 on |↑⟩⊗|α₀⟩, returning P↑.
pub fn ramsey_pup_single(cfg: &RamseyConfig, alpha0: Complex64) -> Result<f64> {
    let state = SpinMotionState::pure(Spin::Up, alpha0);
    let state = apply_sdk(&state, FRAC_PI_2, cfg.eta);
    let state = free_evolve(&state, cfg);
    let state = apply_sdk(&state, FRAC_PI_2, cfg.eta);
    measure_up(&state)
}

/// Closed-form Ramsey probability for a thermal initial state:
/// P↑ = ½ − ½·cos(γ)·exp[−η²(1−cos ωτ)(2n̄+1)] with γ = δτ + η²·sin ωτ.
pub fn ramsey_pup_analytic(cfg: &RamseyConfig) -> f64 {
    let phase = cfg.trap_omega * cfg.wait_time;
    let gamma = cfg.qubit_delta * cfg.wait_time + cfg.eta * cfg.eta * phase.sin();
    let envelope = coherence_envelope(cfg);
    0.5 - 0.5 * gamma.cos() * envelope
}

fn coherence_envelope(cfg: &RamseyConfig) -> f64 {
    let phase = cfg.trap_omega * cfg.wait_time;
    (-cfg.eta * cfg.eta * (1.0 - phase.cos()) * (2.0 * cfg.nbar + 1.0)).exp()
}

/// Monte-Carlo Glauber-Sudarshan average of the branch-algebra Ramsey
/// sequence: α₀ drawn from the complex Gaussian with ⟨|α₀|²⟩ = n̄.
/// Deterministic for a fixed (seed, samples) pair.
pub fn ramsey_pup_mc(cfg: &RamseyConfig, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if samples < 1 {
        return Err(Error::domain("ramsey_pup_mc", "samples must be >= 1"));
    }
    let sigma = (cfg.nbar / 2.0).sqrt();
    let mut values = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let mut rng = sample_rng(seed, i);
        let x: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
        let y: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
        values.push(ramsey_pup_single(cfg, Complex64::new(x, y))?);
    }
    Ok(estimate(&values))
}

/// Deterministic thermal average: Gauss-Laguerre quadrature in u = |α|²/n̄
/// (the radial Glauber weight is exactly e^(−u)du) crossed with a uniform
/// phase grid. Used for noise-free high-accuracy checks against the MC path.
///
/// Converges spectrally while the kick-phase bandwidth
/// 2η·|1−e^(−iωτ)|·√(n̄·u_max) stays below the angle-node count, which
/// holds near revivals (ωτ close to a multiple of 2π). Deep in the
/// collapse the integrand oscillates faster than any practical node count;
/// use the Monte-Carlo average there (the probability is ½ anyway).
pub fn ramsey_pup_quadrature(cfg: &RamseyConfig, radial_nodes: usize, angle_nodes: usize) -> Result<f64> {
    if cfg.nbar == 0.0 {
        return ramsey_pup_single(cfg, Complex64::new(0.0, 0.0));
    }
    if radial_nodes < 2 || angle_nodes < 4 {
        return Err(Error::domain("ramsey_pup_quadrature", "need >= 2 radial and >= 4 angle nodes"));
    }
    let (nodes, weights) = gauss_laguerre(radial_nodes)?;
    let mut radial_terms = Vec::with_capacity(radial_nodes);
    for (&u, &w) in nodes.iter().zip(&weights) {
        let r = (cfg.nbar * u).sqrt();
        let mut angle_terms = Vec::with_capacity(angle_nodes);
        for m in 0..angle_nodes {
            let phi = TAU * m as f64 / angle_nodes as f64;
            let alpha0 = Complex64::from_polar(r, phi);
            angle_terms.push(ramsey_pup_single(cfg, alpha0)?);
        }
        radial_terms.push(w * pairwise_sum(&angle_terms) / angle_nodes as f64);
    }
    Ok(pairwise_sum(&radial_terms))
}

/// Gauss-Laguerre nodes and weights for ∫₀^∞ e^(−u)·f(u)·du.
/// Newton iteration on the Laguerre recurrence.
pub(crate) fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n {
        // standard initial guesses, then Newton
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
        }
        let mut converged = false;
        let mut p2 = 0.0f64;
        let mut pp = 0.0f64;
        for _ in 0..200 {
            let mut p1 = 1.0f64;
            p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 3e-14 * z.max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                context: "gauss_laguerre",
                message: format!("node {i} of {n} did not converge"),
            });
        }
        nodes[i] = z;
        weights[i] = -1.0 / (pp * nf * p2);
    }
    Ok((nodes, weights))
}

/// Ramsey fringe visibility V = exp[−η²(1−cos ωτ)(2n̄+1)].
pub fn visibility_analytic(cfg: &RamseyConfig) -> f64 {
    coherence_envelope(cfg)
}

/// Fitted-visibility model V = A + B·exp[−η²(1−cos ωτ)(2n̄+1)].
pub fn visibility_model(cfg: &RamseyConfig, offset: f64, scale: f64) -> Result<f64> {
    if !(offset >= 0.0) || !(scale >= 0.0) {
        return Err(Error::domain("visibility_model", "offset and scale must be non-negative"));
    }
    Ok(offset + scale * coherence_envelope(cfg))
}

/// Total visibility budget V_SPAM·(F_thermal·F_lightshift)·exp(−τ/T₂).
pub fn visibility_budget(
    v_spam: f64,
    f_thermal: f64,
    f_lightshift: f64,
    tau: f64,
    t2: f64,
) -> Result<f64> {
    for (label, v) in [("v_spam", v_spam), ("f_thermal", f_thermal), ("f_lightshift", f_lightshift)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::domain("visibility_budget", format!("{label} must lie in (0, 1], got {v}")));
        }
    }
    if !(t2 > 0.0) {
        return Err(Error::domain("visibility_budget", format!("t2 must be positive, got {t2}")));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain("visibility_budget", format!("tau must be non-negative, got {tau}")));
    }
    Ok(v_spam * f_thermal * f_lightshift * (-tau / t2).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random complex numbers for property-style loops.
    fn lcg_stream(seed: u64, n: usize) -> Vec<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn displace_vacuum_and_identity() {
        let eta = 0.56;
        let (alpha, phase) = displace(c(0.0, 0.0), c(0.0, eta));
        assert_eq!(alpha, c(0.0, eta));
        assert_eq!(phase, c(1.0, 0.0));
        let (alpha, phase) = displace(c(0.3, -0.8), c(0.0, 0.0));
        assert_eq!(alpha, c(0.3, -0.8));
        assert_eq!(phase, c(1.0, 0.0));
    }

    #[test]
    fn displace_phase_is_unit_modulus() {
        let r = lcg_stream(5, 64);
        for q in r.chunks(4) {
            let (_, phase) = displace(c(3.0 * q[0], 3.0 * q[1]), c(3.0 * q[2], 3.0 * q[3]));
            assert!((phase.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn overlap_identities() {
        let a = c(0.7, -1.2);
        assert!((coherent_overlap(a, a) - c(1.0, 0.0)).norm() < 1e-15);
        let b = c(-0.4, 0.9);
        let from_vacuum = coherent_overlap(c(0.0, 0.0), b);
        assert!((from_vacuum.norm() - (-b.norm_sqr() / 2.0).exp()).abs() < 1e-15);
        let r = lcg_stream(17, 64);
        for q in r.chunks(4) {
            let (a, b) = (c(2.0 * q[0], 2.0 * q[1]), c(2.0 * q[2], 2.0 * q[3]));
            let overlap2 = coherent_overlap(a, b).norm_sqr();
            let expected = (-(a - b).norm_sqr()).exp();
            assert!((overlap2 - expected).abs() < 1e-13 * expected.max(1e-30));
            assert!(coherent_overlap(a, b).norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn sdk_identity_at_zero_theta() {
        let state = SpinMotionState::pure(Spin::Up, c(0.2, 0.1));
        let out = apply_sdk(&state, 0.0, 0.56);
        assert_eq!(out.branches().len(), 1);
        assert_eq!(out.branches()[0], state.branches()[0]);
    }

    #[test]
    fn sdk_pi_kick_from_vacuum() {
        // cos(π/2) rounds to ~6e-17, so a residual up branch of that weight
        // survives; the transfer is still complete to machine precision
        let eta = 0.56;
        let state = SpinMotionState::pure(Spin::Up, c(0.0, 0.0));
        let out = apply_sdk(&state, PI, eta);
        assert!(out.branches().len() <= 2);
        let b = out
            .branches()
            .iter()
            .max_by(|x, y| x.weight.norm().partial_cmp(&y.weight.norm()).unwrap())
            .copied()
            .unwrap();
        assert_eq!(b.spin, Spin::Down);
        assert!((b.alpha - c(0.0, eta)).norm() < 1e-15);
        assert!((b.weight - c(0.0, 1.0)).norm() < 1e-15);
        assert!((measure_down(&out).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sdk_half_pi_branches() {
        let eta = 0.56;
        let state = SpinMotionState::pure(Spin::Up, c(0.0, 0.0));
        let out = apply_sdk(&state, FRAC_PI_2, eta);
        assert_eq!(out.branches().len(), 2);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert_eq!(out.branches()[0].spin, Spin::Up);
        assert!((out.branches()[0].weight - c(inv_sqrt2, 0.0)).norm() < 1e-15);
        assert_eq!(out.branches()[1].spin, Spin::Down);
        assert!((out.branches()[1].alpha - c(0.0, eta)).norm() < 1e-15);
        assert!((out.branches()[1].weight - c(0.0, inv_sqrt2)).norm() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-12);
        assert!((measure_up(&out).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_half_pi_kicks_equal_pi_kick() {
        // U(π/2)² = U(π) at zero wait for any η: the ±iη displacement
        // phases cancel pairwise.
        for &eta in &[0.0, 0.56, 1.3] {
            let state = SpinMotionState::pure(Spin::Up, c(0.4, -0.7));
            let twice = apply_sdk(&apply_sdk(&state, FRAC_PI_2, eta), FRAC_PI_2, eta);
            let once = apply_sdk(&state, PI, eta);
            let p_twice = measure_down(&twice).unwrap();
            let p_once = measure_down(&once).unwrap();
            assert!((p_twice - p_once).abs() < 1e-12);
            assert!((p_once - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_zero_reduces_to_rabi_flopping() {
        // with no kick, sequential pulses compose areas
        let thetas = [0.3, 1.1, 0.7, 0.9];
        let mut state = SpinMotionState::pure(Spin::Up, c(0.5, 0.2));
        let mut total = 0.0;
        for &theta in &thetas {
            state = apply_sdk(&state, theta, 0.0);
            total += theta;
        }
        let p_down = measure_down(&state).unwrap();
        assert!((p_down - (total / 2.0).sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn unitarity_under_random_sequences() {
        let cfg = RamseyConfig::new(0.56, TAU * 32.4e3, TAU * 150e6, 7.3e-6, 0.0).unwrap();
        let r = lcg_stream(23, 40);
        for q in r.chunks(2) {
            let mut state = SpinMotionState::pure(Spin::Up, c(4.0 * q[0], 4.0 * q[1]));
            // four pulses → 16 branches
            for k in 0..4 {
                state = apply_sdk(&state, 0.3 + 0.5 * k as f64, 0.56);
                state = free_evolve(&state, &cfg);
            }
            assert!(state.branches().len() <= 16);
            assert!((state.norm() - 1.0).abs() < 1e-10, "norm = {}", state.norm());
        }
    }

    #[test]
    fn free_evolution_identity_and_period() {
        let cfg = RamseyConfig::new(0.56, TAU * 32.4e3, TAU * 150e6, 0.0, 0.0).unwrap();
        let state = SpinMotionState::pure(Spin::Down, c(1.1, -0.3));
        let out = free_evolve(&state, &cfg);
        assert_eq!(out.branches()[0], state.branches()[0]);

        let period = RamseyConfig { wait_time: TAU / cfg.trap_omega, ..cfg };
        let out = free_evolve(&state, &period);
        let b = out.branches()[0];
        assert!((b.alpha - state.branches()[0].alpha).norm() < 1e-12);
        // spin-down phase advanced by −δτ/2
        let expected = Complex64::from_polar(1.0, -period.qubit_delta * period.wait_time / 2.0);
        assert!((b.weight - expected).norm() < 1e-12);
    }

    #[test]
    fn measurement_basics() {
        let up = SpinMotionState::pure(Spin::Up, c(0.9, 2.0));
        assert_eq!(measure_up(&up).unwrap(), 1.0);
        assert_eq!(measure_down(&up).unwrap(), 0.0);

        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        let split = SpinMotionState {
            branches: vec![
                Branch { spin: Spin::Up, alpha: c(0.0, 0.0), weight: c(inv_sqrt2, 0.0) },
                Branch { spin: Spin::Down, alpha: c(1.0, 0.5), weight: c(0.0, inv_sqrt2) },
            ],
        };
        assert!((measure_up(&split).unwrap() - 0.5).abs() < 1e-12);
        let total = measure_up(&split).unwrap() + measure_down(&split).unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn measurement_rejects_unnormalized_state() {
        let bad = SpinMotionState {
            branches: vec![Branch { spin: Spin::Up, alpha: c(0.0, 0.0), weight: c(0.7, 0.0) }],
        };
        assert!(matches!(measure_up(&bad), Err(Error::NormViolation { .. })));
    }

    #[test]
    fn up_down_sum_to_one_after_sequences() {
        let cfg = RamseyConfig::new(0.56, TAU * 32.4e3, TAU * 150e6, 11.7e-6, 0.0).unwrap();
        let r = lcg_stream(31, 20);
        for q in r.chunks(2) {
            let mut state = SpinMotionState::pure(Spin::Up, c(3.0 * q[0], 3.0 * q[1]));
            state = apply_sdk(&state, FRAC_PI_2, cfg.eta);
            state = free_evolve(&state, &cfg);
            state = apply_sdk(&state, FRAC_PI_2, cfg.eta);
            let total = measure_up(&state).unwrap() + measure_down(&state).unwrap();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    fn paper_cfg(wait_time: f64, nbar: f64) -> RamseyConfig {
        RamseyConfig::new(0.56, TAU * 32.4e3, TAU * 150e6, wait_time, nbar).unwrap()
    }

    #[test]
    fn analytic_trivial_points() {
        // two contiguous π/2 pulses form a π pulse
        assert!(ramsey_pup_analytic(&paper_cfg(0.0, 1059.0)).abs() < 1e-15);
        // full period: full-visibility fringe ½ − ½cos(δτ)
        let period = TAU / (TAU * 32.4e3);
        let cfg = paper_cfg(period, 1059.0);
        let expected = 0.5 - 0.5 * (cfg.qubit_delta * period).cos();
        assert!((ramsey_pup_analytic(&cfg) - expected).abs() < 1e-9);
    }

    #[test]
    fn analytic_collapse_at_half_period() {
        // exponent ≈ −1329: coherence underflows to zero
        let cfg = paper_cfg(0.5 / 32.4e3, 1059.0);
        assert_eq!(ramsey_pup_analytic(&cfg), 0.5);
        assert!(visibility_analytic(&cfg) < 1e-100);
    }

    #[test]
    fn branch_algebra_matches_closed_form_per_trajectory() {
        // single-α₀ closed form derived from the branch expansion:
        // P↑ = ½ − ½·e^(−η²(1−cos ωτ))·cos(δτ + X),
        // X = η·(−2x(1−cos ωτ) + 2y·sin ωτ + η·sin ωτ)
        let r = lcg_stream(47, 60);
        for q in r.chunks(6) {
            let eta = 0.2 + 0.8 * q[0].abs();
            let omega = TAU * 32.4e3;
            let tau = 40e-6 * q[1].abs();
            let delta = TAU * 1e5 * q[2];
            let nbar = 0.0;
            let cfg = RamseyConfig::new(eta, omega, delta, tau, nbar).unwrap();
            let (x, y) = (5.0 * q[3], 5.0 * q[4]);
            let p_branch = ramsey_pup_single(&cfg, c(x, y)).unwrap();
            let phase = omega * tau;
            let big_x = eta * (-2.0 * x * (1.0 - phase.cos()) + 2.0 * y * phase.sin() + eta * phase.sin());
            let p_formula = 0.5
                - 0.5 * (-eta * eta * (1.0 - phase.cos())).exp() * (delta * tau + big_x).cos();
            assert!(
                (p_branch - p_formula).abs() < 1e-12,
                "branch {p_branch} vs formula {p_formula}"
            );
        }
    }

    #[test]
    fn mc_zero_temperature_is_exact() {
        for k in 1..=10 {
            let tau = k as f64 * 3.1e-6;
            let cfg = paper_cfg(tau, 0.0);
            let est = ramsey_pup_mc(&cfg, 3, 5).unwrap();
            let analytic = ramsey_pup_analytic(&cfg);
            assert!(
                (est.mean - analytic).abs() < 1e-10,
                "tau {tau}: mc {} vs analytic {analytic}",
                est.mean
            );
        }
    }

    #[test]
    fn mc_agrees_with_analytic_hot() {
        let cfg = paper_cfg(29.9e-6, 1059.0);
        let est = ramsey_pup_mc(&cfg, 40_000, 9).unwrap();
        let analytic = ramsey_pup_analytic(&cfg);
        assert!(
            (est.mean - analytic).abs() < 3.5 * est.stderr,
            "mc {} ± {} vs analytic {analytic}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn mc_seed_determinism() {
        let cfg = paper_cfg(30.5e-6, 1059.0);
        let a = ramsey_pup_mc(&cfg, 5_000, 77).unwrap();
        let b = ramsey_pup_mc(&cfg, 5_000, 77).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    }

    #[test]
    fn laguerre_nodes_integrate_polynomials() {
        let (nodes, weights) = gauss_laguerre(48).unwrap();
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "Σw = {total}");
        let first: f64 = nodes.iter().zip(&weights).map(|(x, w)| x * w).sum();
        assert!((first - 1.0).abs() < 1e-10, "⟨u⟩ = {first}");
        let tenth: f64 = nodes.iter().zip(&weights).map(|(x, w)| x.powi(10) * w).sum();
        let exact = 3_628_800.0; // 10!
        assert!((tenth - exact).abs() / exact < 1e-9, "⟨u¹⁰⟩ = {tenth}");
    }

    #[test]
    fn quadrature_matches_analytic_near_revival() {
        let period = 1.0 / 32.4e3;
        for &offset in &[-0.5e-6, -0.3e-6, -0.1e-6, 0.0, 0.12e-6, 0.3e-6, 0.5e-6] {
            let cfg = paper_cfg(period + offset, 1059.0);
            let quad = ramsey_pup_quadrature(&cfg, 64, 64).unwrap();
            let analytic = ramsey_pup_analytic(&cfg);
            assert!(
                (quad - analytic).abs() < 1e-8,
                "offset {offset}: quad {quad} vs analytic {analytic}"
            );
        }
    }

    #[test]
    fn delta_sweep_visibility_matches_closed_form() {
        // peak-minus-trough of the fringe equals the coherence envelope
        let tau = 30.95e-6;
        let nbar = 40.0;
        let base = paper_cfg(tau, nbar);
        let envelope_phase = 0.56f64 * 0.56 * (base.trap_omega * tau).sin();
        let delta_peak = (PI - envelope_phase) / tau;
        let delta_trough = -envelope_phase / tau;
        let mut max = f64::MIN;
        let mut min = f64::MAX;
        for k in 0..=400 {
            let delta = delta_trough + (delta_peak - delta_trough) * k as f64 / 400.0;
            let p = ramsey_pup_analytic(&RamseyConfig { qubit_delta: delta, ..base });
            max = max.max(p);
            min = min.min(p);
        }
        let vis = visibility_analytic(&base);
        assert!((max - min - vis).abs() < 1e-12, "span {} vs envelope {vis}", max - min);
    }

    #[test]
    fn visibility_anchors() {
        let omega = TAU * 32.4e3;
        assert!((visibility_analytic(&paper_cfg(0.0, 1059.0)) - 1.0).abs() < 1e-15);
        assert!((visibility_analytic(&paper_cfg(TAU / omega, 1059.0)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn revival_half_width() {
        // η²(1−cos ωΔτ)(2n̄+1) = ln 2 at Δτ ≈ 0.224 µs for the quoted η, n̄
        let omega = TAU * 32.4e3;
        let period = TAU / omega;
        let target = 0.5f64;
        let mut lo = 0.0;
        let mut hi = 1.0e-6;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if visibility_analytic(&paper_cfg(period + mid, 1059.0)) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let half_width = 0.5 * (lo + hi);
        assert!((half_width - 0.2244e-6).abs() < 0.0023e-6, "half width {half_width}");
    }

    #[test]
    fn visibility_model_anchors() {
        let omega = TAU * 32.4e3;
        let at_revival = paper_cfg(TAU / omega, 1059.0);
        let v = visibility_model(&at_revival, 0.036, 0.41).unwrap();
        assert!((v - 0.446).abs() < 1e-6, "v = {v}");
        let flat = visibility_model(&paper_cfg(13.0e-6, 1059.0), 0.25, 0.0).unwrap();
        assert_eq!(flat, 0.25);
        let cfg = paper_cfg(8.5e-6, 20.0);
        let reduced = visibility_model(&cfg, 0.0, 1.0).unwrap();
        assert_eq!(reduced, visibility_analytic(&cfg));
    }

    #[test]
    fn budget_anchor() {
        let v = visibility_budget(0.70, 0.97, 0.95, 30.864e-6, 100e-6).unwrap();
        assert!((v - 0.47).abs() < 0.01, "v = {v}");
        // t2 → ∞ with unit fidelities returns v_spam
        let v = visibility_budget(0.70, 1.0, 1.0, 30.864e-6, f64::INFINITY).unwrap();
        assert_eq!(v, 0.70);
        // multiplicativity
        let a = visibility_budget(0.70, 0.97, 0.95, 30.864e-6, 100e-6).unwrap();
        let b = visibility_budget(0.35, 0.97, 0.95, 30.864e-6, 100e-6).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!(visibility_budget(1.2, 0.9, 0.9, 1e-6, 1e-4).is_err());
    }
}
