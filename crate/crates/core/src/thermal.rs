//! Thermal position-spread infidelity of single-beam rotations: the
//! closed-form hypergeometric Rabi curve and an independent Monte-Carlo
//! position-sampling oracle.

use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::hyp::hyp1f2;
use crate::mc::{estimate, sample_rng, MonteCarloEstimate};
use rand::Rng;
use rand_distr::StandardNormal;

/// Beam waist vs thermal position spread of the ion.
///
/// `g = w₀²/(2σ_ion²)` with `σ_ion = √(k_B·T/(m·ω²))` the one-dimensional
/// thermal spread; both derived quantities are fixed at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamThermalConfig {
    /// 1/e² intensity radius (m)
    waist: f64,
    /// Ion temperature (K)
    temperature: f64,
    /// Ion mass (kg)
    mass: f64,
    /// Trap secular frequency (rad/s)
    trap_omega: f64,
    /// Thermal position spread σ_ion (m)
    sigma_ion: f64,
    /// Waist-to-spread ratio g = w₀²/(2σ_ion²); infinite at T = 0
    g: f64,
}

impl BeamThermalConfig {
    pub fn new(waist: f64, temperature: f64, mass: f64, trap_omega: f64) -> Result<Self> {
        for (label, v) in [("waist", waist), ("mass", mass), ("trap_omega", trap_omega)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(
                    "BeamThermalConfig",
                    format!("{label} must be strictly positive, got {v}"),
                ));
            }
        }
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::domain(
                "BeamThermalConfig",
                format!("temperature must be non-negative, got {temperature}"),
            ));
        }
        let sigma_ion = (K_B * temperature / (mass * trap_omega * trap_omega)).sqrt();
        let g = if sigma_ion == 0.0 { f64::INFINITY } else { waist * waist / (2.0 * sigma_ion * sigma_ion) };
        let cfg = BeamThermalConfig { waist, temperature, mass, trap_omega, sigma_ion, g };
        cfg.check_consistency()?;
        Ok(cfg)
    }

    fn check_consistency(&self) -> Result<()> {
        let sigma = (K_B * self.temperature / (self.mass * self.trap_omega * self.trap_omega)).sqrt();
        let ok_sigma = if sigma == 0.0 {
            self.sigma_ion == 0.0
        } else {
            (self.sigma_ion - sigma).abs() / sigma < 1e-12
        };
        let g = if sigma == 0.0 { f64::INFINITY } else { self.waist * self.waist / (2.0 * sigma * sigma) };
        let ok_g = if g.is_infinite() { self.g.is_infinite() } else { (self.g - g).abs() / g < 1e-12 };
        if ok_sigma && ok_g {
            Ok(())
        } else {
            Err(Error::Inconsistent("BeamThermalConfig derived fields out of sync".into()))
        }
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn trap_omega(&self) -> f64 {
        self.trap_omega
    }

    pub fn sigma_ion(&self) -> f64 {
        self.sigma_ion
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

/// Thermally averaged transition probability of a Rabi flop,
/// P↓ = ½(1 − ₁F₂[g/2; ½, 1+g/2; −θ²]), with θ half the on-axis pulse area.
pub fn thermal_rabi_pdown(theta: f64, cfg: &BeamThermalConfig) -> Result<f64> {
    thermal_rabi_pdown_g(theta, cfg.g())
}

/// [`thermal_rabi_pdown`] parameterized directly by g (used by the fit
/// models, where g is a function of the temperature parameter).
pub fn thermal_rabi_pdown_g(theta: f64, g: f64) -> Result<f64> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::domain("thermal_rabi_pdown", format!("theta must be >= 0, got {theta}")));
    }
    if g.is_infinite() {
        // zero thermal spread: plain Rabi flopping
        return Ok(theta.sin().powi(2));
    }
    let f = hyp1f2(g / 2.0, 0.5, 1.0 + g / 2.0, -theta * theta)?;
    Ok((0.5 * (1.0 - f)).clamp(0.0, 1.0))
}

/// Monte-Carlo oracle for the thermal Rabi curve.
///
/// Draws transverse positions (x, y) from independent Gaussians of std
/// σ_ion and averages sin²(Θ_loc/2) over the local pulse area
/// Θ_loc = Θ·exp(−(x²+y²)/w₀²), the radial falloff under which the
/// closed form above is the exact average. Deterministic for a fixed
/// (seed, samples) pair regardless of evaluation order.
pub fn mc_thermal_rabi(
    area: f64,
    cfg: &BeamThermalConfig,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < 1 {
        return Err(Error::domain("mc_thermal_rabi", "samples must be >= 1"));
    }
    if !(area >= 0.0) || !area.is_finite() {
        return Err(Error::domain("mc_thermal_rabi", format!("area must be >= 0, got {area}")));
    }
    let sigma = cfg.sigma_ion();
    let inv_w2 = 1.0 / (cfg.waist() * cfg.waist());
    let values: Vec<f64> = (0..samples)
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let x: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
            let y: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
            let local_area = area * (-(x * x + y * y) * inv_w2).exp();
            (local_area / 2.0).sin().powi(2)
        })
        .collect();
    Ok(estimate(&values))
}

/// Linear pulse-area → pulse-energy map: energy = calibration × area,
/// with the calibration constant in J/rad.
pub fn pi_energy_from_area(area: f64, calibration: f64) -> Result<f64> {
    if !(calibration > 0.0) || !calibration.is_finite() {
        return Err(Error::domain(
            "pi_energy_from_area",
            format!("calibration must be positive, got {calibration}"),
        ));
    }
    Ok(calibration * area)
}
