//! Parameter recovery: per-fringe sinusoid fits, Rabi-curve fits,
//! revival-envelope fits, bounded-parameter confidence intervals, and SPAM
//! correction.

mod feldman;
mod lm;

pub use feldman::{feldman_cousins_interval, FeldmanCousinsBelt};

use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::thermal::thermal_rabi_pdown_g;
use lm::{covariance_at, invert_dense, levenberg_marquardt, solve_dense, to_external, LmOptions, Transform};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Result of a least-squares fit: named parameters with 1σ uncertainties
/// and covariance, the weighted residual sum, and convergence/warning flags.
#[derive(Debug, Clone)]
pub struct FitResult {
    names: Vec<&'static str>,
    estimates: Vec<f64>,
    uncertainties: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    pub residual_sum: f64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn uncertainties(&self) -> &[f64] {
        &self.uncertainties
    }

    pub fn covariance(&self) -> &[Vec<f64>] {
        &self.covariance
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.estimates[i])
    }

    pub fn uncertainty(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.uncertainties[i])
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    fn from_parts(
        names: Vec<&'static str>,
        estimates: Vec<f64>,
        covariance: Vec<Vec<f64>>,
        residual_sum: f64,
        converged: bool,
        warnings: Vec<String>,
    ) -> Self {
        let uncertainties = (0..names.len()).map(|i| covariance[i][i].max(0.0).sqrt()).collect();
        FitResult { names, estimates, uncertainties, covariance, residual_sum, converged, warnings }
    }
}

/// Binomial standard deviation of an observed probability over `n`
/// repetitions, floored at √(1/(4n)) so endpoint observations keep a
/// finite weight.
pub fn binomial_sigma(p_hat: f64, n: u32) -> f64 {
    let nf = n as f64;
    (p_hat * (1.0 - p_hat) / nf).max(0.25 / nf).sqrt()
}

/// Weighted sinusoid fit of one Ramsey fringe:
/// p(δ) = offset + (amplitude/2)·cos(δ·τ_eff + phase), with binomial
/// weights. Linear in (offset, cos, sin) components, so the solve is exact;
/// the amplitude is non-negative by phase convention.
///
/// Points are (detuning rad/s, p_up, repetitions); `tau_eff` is the wait
/// time the fringe was recorded at.
pub fn fit_fringe(points: &[(f64, f64, u32)], tau_eff: f64) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::domain("fit_fringe", format!("need >= 4 points, got {}", points.len())));
    }
    let first = points[0].0;
    if points.iter().all(|p| p.0 == first) {
        return Err(Error::DegenerateDesign("all detunings equal".into()));
    }
    if !(tau_eff > 0.0) {
        return Err(Error::domain("fit_fringe", format!("tau_eff must be positive, got {tau_eff}")));
    }

    // normal equations for p = c0 + c1·cos(δτ) + c2·sin(δτ)
    let mut normal = vec![vec![0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    let mut sum_wyy = 0.0;
    for &(delta, p_up, reps) in points {
        let w = 1.0 / binomial_sigma(p_up, reps).powi(2);
        let phase = delta * tau_eff;
        let row = [1.0, phase.cos(), phase.sin()];
        for j in 0..3 {
            for k in j..3 {
                normal[j][k] += w * row[j] * row[k];
            }
            rhs[j] += w * row[j] * p_up;
        }
        sum_wyy += w * p_up * p_up;
    }
    for j in 0..3 {
        for k in 0..j {
            normal[j][k] = normal[k][j];
        }
    }
    let c = solve_dense(&normal, &rhs)?;
    let linear_cov = invert_dense(&normal)?;
    let residual_sum =
        (sum_wyy - c[0] * rhs[0] - c[1] * rhs[1] - c[2] * rhs[2]).max(0.0);

    let r = (c[1] * c[1] + c[2] * c[2]).sqrt();
    let amplitude = 2.0 * r;
    let (phase, jac) = if r > 1e-150 {
        let phase = (-c[2]).atan2(c[1]);
        // (c0,c1,c2) → (amplitude, phase, offset)
        let jac = [
            [0.0, 2.0 * c[1] / r, 2.0 * c[2] / r],
            [0.0, c[2] / (r * r), -c[1] / (r * r)],
            [1.0, 0.0, 0.0],
        ];
        (phase, jac)
    } else {
        // flat fringe: amplitude ~ 0, phase unconstrained
        let jac = [[0.0, 2.0, 0.0], [0.0, 0.0, 2.0], [1.0, 0.0, 0.0]];
        (0.0, jac)
    };
    let mut covariance = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += jac[i][a] * linear_cov[a][b] * jac[j][b];
                }
            }
            covariance[i][j] = acc;
        }
    }

    Ok(FitResult::from_parts(
        vec!["amplitude", "phase", "offset"],
        vec![amplitude, phase, c[0]],
        covariance,
        residual_sum,
        true,
        Vec::new(),
    ))
}

/// Fixed experimental context for the Rabi-curve fit: the beam waist, ion
/// mass, and trap frequency that map a temperature to the waist-to-spread
/// ratio g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiFitContext {
    /// 1/e² intensity radius (m)
    pub waist: f64,
    /// Ion mass (kg)
    pub mass: f64,
    /// Trap secular frequency (rad/s)
    pub trap_omega: f64,
}

impl RabiFitContext {
    fn g_of_temperature(&self, temperature: f64) -> f64 {
        let sigma_sq = K_B * temperature / (self.mass * self.trap_omega * self.trap_omega);
        self.waist * self.waist / (2.0 * sigma_sq)
    }
}

/// Starting point for [`fit_rabi_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiInit {
    /// π-pulse energy (J)
    pub pi_energy: f64,
    /// Ion temperature (K)
    pub temperature: f64,
    /// Visibility compression factor
    pub scale: f64,
}

/// Fit the thermally damped Rabi curve
/// p(E) = ½ + scale·(P↓(θ(E), g(T)) − ½) with θ(E) = (π/2)·E/E_π,
/// reporting the π-pulse energy, the ion temperature, and the visibility
/// scale. Points are (pulse energy J, p_down, repetitions).
pub fn fit_rabi_curve(
    points: &[(f64, f64, u32)],
    ctx: &RabiFitContext,
    init: &RabiInit,
) -> Result<FitResult> {
    if points.len() < 6 {
        return Err(Error::domain("fit_rabi_curve", format!("need >= 6 points, got {}", points.len())));
    }
    let e_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if !(e_max > 0.0) {
        return Err(Error::DegenerateDesign("all energies zero".into()));
    }

    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(e, p, reps)| (e, p, binomial_sigma(p, reps)))
        .collect();
    let ctx = *ctx;
    let transforms = [Transform::Log, Transform::Log, Transform::Log];
    let mut residual_fn = move |internal: &[f64], out: &mut [f64]| -> Result<()> {
        let p = to_external(&transforms, internal);
        let (pi_energy, temperature, scale) = (p[0], p[1], p[2]);
        let g = ctx.g_of_temperature(temperature);
        for (i, &(energy, y, sigma)) in data.iter().enumerate() {
            let theta = FRAC_PI_2 * energy / pi_energy;
            let model = 0.5 + scale * (thermal_rabi_pdown_g(theta, g)? - 0.5);
            out[i] = (model - y) / sigma;
        }
        Ok(())
    };

    // data-driven candidate: the global maximum sits near the first flop top
    let argmax_energy = points
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|p| p.0)
        .unwrap_or(init.pi_energy);
    let starts_external: Vec<Vec<f64>> = vec![
        vec![init.pi_energy, init.temperature, init.scale],
        vec![argmax_energy, init.temperature, init.scale],
    ];

    let (outcome, _) = multistart(&mut residual_fn, &transforms, &starts_external, points.len())?;
    let external = to_external(&transforms, &outcome.params);
    let (covariance, regularized) =
        external_covariance(&mut residual_fn, &transforms, &outcome.params, points.len())?;
    let mut warnings = Vec::new();
    if regularized {
        warnings.push("covariance regularized: some parameter is unidentifiable at the optimum".to_string());
    }
    Ok(FitResult::from_parts(
        vec!["pi_energy", "temperature", "scale"],
        external,
        covariance,
        outcome.chi2,
        outcome.converged,
        warnings,
    ))
}

/// Starting point for [`fit_revival`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalInit {
    /// Trap frequency ω (rad/s)
    pub omega: f64,
    /// Mean occupation n̄
    pub nbar: f64,
    /// Visibility floor A
    pub offset: f64,
    /// Revival amplitude B
    pub scale: f64,
}

/// Fit the revival envelope V(τ) = A + B·exp[−η²(1−cos ωτ)(2n̄+1)] with η
/// fixed, reporting ω, n̄, A, B. Points are (wait time s, visibility, σ).
/// Multiple deterministic starts guard against the narrow revival feature.
pub fn fit_revival(points: &[(f64, f64, f64)], eta: f64, init: &RevivalInit) -> Result<FitResult> {
    if points.len() < 8 {
        return Err(Error::domain("fit_revival", format!("need >= 8 points, got {}", points.len())));
    }
    if !(eta > 0.0) {
        return Err(Error::domain("fit_revival", format!("eta must be positive, got {eta}")));
    }
    for &(tau, _, sigma) in points {
        if !(tau > 0.0) || !(sigma > 0.0) {
            return Err(Error::domain("fit_revival", "wait times and sigmas must be positive"));
        }
    }

    let mut warnings = Vec::new();
    let argmax = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if argmax == 0 || argmax == points.len() - 1 {
        warnings.push("revival maximum sits on the scan boundary; ω is weakly constrained".to_string());
    }

    let data = points.to_vec();
    let eta_sq = eta * eta;
    let transforms = [Transform::Log, Transform::Log, Transform::Identity, Transform::Log];
    let mut residual_fn = move |internal: &[f64], out: &mut [f64]| -> Result<()> {
        let p = to_external(&transforms, internal);
        let (omega, nbar, offset, scale) = (p[0], p[1], p[2], p[3]);
        for (i, &(tau, v, sigma)) in data.iter().enumerate() {
            let phase = omega * tau;
            let model = offset + scale * (-eta_sq * (1.0 - phase.cos()) * (2.0 * nbar + 1.0)).exp();
            out[i] = (model - v) / sigma;
        }
        Ok(())
    };

    let omega_from_peak = TAU / points[argmax].0;
    let starts_external: Vec<Vec<f64>> = vec![
        vec![init.omega, init.nbar, init.offset, init.scale],
        vec![omega_from_peak, init.nbar, init.offset, init.scale],
    ];

    let (outcome, _) = multistart(&mut residual_fn, &transforms, &starts_external, points.len())?;
    let external = to_external(&transforms, &outcome.params);
    // a vanishing revival amplitude leaves ω and n̄ unidentifiable; surface
    // that as a degenerate design rather than quoting meaningless errors
    let (covariance, regularized) =
        external_covariance(&mut residual_fn, &transforms, &outcome.params, points.len())?;
    if regularized {
        return Err(Error::DegenerateDesign(
            "revival fit covariance singular (flat background: ω and n̄ unidentifiable)".into(),
        ));
    }
    Ok(FitResult::from_parts(
        vec!["omega", "nbar", "offset", "scale"],
        external,
        covariance,
        outcome.chi2,
        outcome.converged,
        warnings,
    ))
}

/// Revival time τ_rev = 2π/ω with its propagated uncertainty, from a
/// [`fit_revival`] result.
pub fn revival_time(fit: &FitResult) -> Option<(f64, f64)> {
    let omega = fit.get("omega")?;
    let sigma = fit.uncertainty("omega")?;
    let tau = TAU / omega;
    Some((tau, tau * sigma / omega))
}

/// SPAM-corrected visibility: raw/spam, rejecting ratios above 1 + slack.
pub fn spam_correct(raw_visibility: f64, spam_visibility: f64) -> Result<f64> {
    spam_correct_with_slack(raw_visibility, spam_visibility, 0.05)
}

pub fn spam_correct_with_slack(raw_visibility: f64, spam_visibility: f64, slack: f64) -> Result<f64> {
    if !(spam_visibility > 0.0 && spam_visibility <= 1.0) {
        return Err(Error::domain(
            "spam_correct",
            format!("spam visibility {spam_visibility} outside (0, 1]"),
        ));
    }
    if !(raw_visibility >= 0.0) {
        return Err(Error::domain("spam_correct", format!("raw visibility {raw_visibility} negative")));
    }
    let ratio = raw_visibility / spam_visibility;
    if ratio > 1.0 + slack {
        return Err(Error::Inconsistent(format!(
            "raw visibility {raw_visibility} exceeds SPAM visibility {spam_visibility} beyond slack {slack}"
        )));
    }
    Ok(ratio)
}

/// Deterministic multi-start dispersion factors (applied to log-space
/// parameters, staggered per parameter index).
const START_FACTORS: [f64; 8] = [1.0, 1.04, 0.96, 1.10, 0.90, 1.20, 0.83, 1.30];

/// Run LM from a deterministic spread of starting points and keep the best
/// outcome (lowest χ², ties broken by lexicographically smallest parameter
/// vector).
fn multistart(
    residual_fn: &mut lm::ResidualFn,
    transforms: &[Transform],
    starts_external: &[Vec<f64>],
    n_residuals: usize,
) -> Result<(lm::LmOutcome, usize)> {
    let options = LmOptions::default();
    let mut best: Option<(lm::LmOutcome, usize)> = None;
    let mut attempts = 0;
    for base in starts_external {
        for (k, _) in START_FACTORS.iter().enumerate() {
            let mut internal = Vec::with_capacity(base.len());
            let mut feasible = true;
            for (j, (&value, transform)) in base.iter().zip(transforms).enumerate() {
                let dispersed = match transform {
                    Transform::Log => value * START_FACTORS[(k + j) % START_FACTORS.len()],
                    Transform::Identity => value,
                };
                match transform.to_internal(dispersed) {
                    Ok(v) => internal.push(v),
                    Err(_) => {
                        feasible = false;
                        break;
                    }
                }
            }
            if !feasible {
                continue;
            }
            attempts += 1;
            let Ok(outcome) = levenberg_marquardt(residual_fn, &internal, n_residuals, &options) else {
                continue;
            };
            let replace = match &best {
                None => true,
                Some((current, _)) => {
                    outcome.chi2 < current.chi2
                        || (outcome.chi2 == current.chi2
                            && outcome.params.as_slice() < current.params.as_slice())
                }
            };
            if replace {
                best = Some((outcome, attempts));
            }
        }
    }
    best.ok_or_else(|| Error::NonConvergence {
        context: "multistart",
        message: "no starting point produced a feasible fit".into(),
    })
}

/// Covariance in external units via the delta method on the internal
/// (JᵀJ)⁻¹.
fn external_covariance(
    residual_fn: &mut lm::ResidualFn,
    transforms: &[Transform],
    internal: &[f64],
    n_residuals: usize,
) -> Result<(Vec<Vec<f64>>, bool)> {
    let (cov_int, regularized) = covariance_at(residual_fn, internal, n_residuals)?;
    let n = internal.len();
    let scale: Vec<f64> = transforms.iter().zip(internal).map(|(t, &p)| t.jacobian(p)).collect();
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            cov[i][j] = cov_int[i][j] * scale[i] * scale[j];
        }
    }
    Ok((cov, regularized))
}
