//! Trap geometry and thermal occupation: the Lamb-Dicke parameter and the
//! n̄ ↔ temperature mapping.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use std::f64::consts::{SQRT_2, TAU};

/// Secular trap parameters with the derived Lamb-Dicke parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// Secular angular frequency (rad/s)
    secular_omega: f64,
    /// Effective wavevector magnitude (rad/m)
    k_eff: f64,
    /// Lamb-Dicke parameter η = k_eff·√(ħ/2mω)
    lamb_dicke: f64,
}

impl TrapParams {
    /// Construct from the trap frequency, effective wavevector, and ion mass.
    pub fn new(secular_omega: f64, k_eff: f64, mass: f64) -> Result<Self> {
        let eta = lamb_dicke(k_eff, mass, secular_omega)?;
        Ok(TrapParams { secular_omega, k_eff, lamb_dicke: eta })
    }

    /// Orthogonal-beam geometry: |k⃗_σ − k⃗_π| = √2·(2π/λ).
    pub fn orthogonal_beams(secular_omega: f64, wavelength: f64, mass: f64) -> Result<Self> {
        if !(wavelength > 0.0) {
            return Err(Error::domain("TrapParams", "wavelength must be positive"));
        }
        Self::new(secular_omega, SQRT_2 * TAU / wavelength, mass)
    }

    pub fn secular_omega(&self) -> f64 {
        self.secular_omega
    }

    pub fn k_eff(&self) -> f64 {
        self.k_eff
    }

    pub fn lamb_dicke(&self) -> f64 {
        self.lamb_dicke
    }
}

/// Lamb-Dicke parameter η = k_eff·√(ħ/(2·mass·omega)).
pub fn lamb_dicke(k_eff: f64, mass: f64, omega: f64) -> Result<f64> {
    for (label, v) in [("k_eff", k_eff), ("mass", mass), ("omega", omega)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(
                "lamb_dicke",
                format!("{label} must be strictly positive, got {v}"),
            ));
        }
    }
    Ok(k_eff * (HBAR / (2.0 * mass * omega)).sqrt())
}

/// Mean phonon number from temperature, classical limit n̄ = k_B·T/(ħ·ω).
///
/// Accurate for n̄ ≫ 1; see [`thermal_nbar_bose`] for the exact form.
pub fn thermal_nbar(temperature: f64, omega: f64) -> Result<f64> {
    check_nbar_inputs(temperature, omega)?;
    Ok(K_B * temperature / (HBAR * omega))
}

/// Temperature from mean phonon number, classical limit T = n̄·ħ·ω/k_B.
pub fn nbar_to_temperature(nbar: f64, omega: f64) -> Result<f64> {
    check_nbar_inputs(nbar, omega)?;
    Ok(nbar * HBAR * omega / K_B)
}

/// Exact Bose-Einstein occupation n̄ = 1/(exp(ħω/k_B·T) − 1).
pub fn thermal_nbar_bose(temperature: f64, omega: f64) -> Result<f64> {
    check_nbar_inputs(temperature, omega)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Inverse of [`thermal_nbar_bose`]: T = ħω / (k_B·ln(1 + 1/n̄)).
pub fn nbar_to_temperature_bose(nbar: f64, omega: f64) -> Result<f64> {
    check_nbar_inputs(nbar, omega)?;
    if nbar == 0.0 {
        return Ok(0.0);
    }
    Ok(HBAR * omega / (K_B * (1.0 / nbar).ln_1p()))
}

fn check_nbar_inputs(nonneg: f64, omega: f64) -> Result<()> {
    if !(nonneg >= 0.0) || !nonneg.is_finite() {
        return Err(Error::domain("thermal occupation", format!("negative or non-finite input {nonneg}")));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain("thermal occupation", format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::make_species;

    fn paper_geometry() -> (f64, f64, f64) {
        let species = make_species("Ba138+").unwrap();
        let omega = TAU * 32.4e3;
        let k_eff = SQRT_2 * TAU / 532e-9;
        (k_eff, species.mass(), omega)
    }

    #[test]
    fn eta_paper_value() {
        let (k, m, w) = paper_geometry();
        let eta = lamb_dicke(k, m, w).unwrap();
        assert!((eta - 0.56).abs() < 0.01, "eta = {eta}");
    }

    #[test]
    fn eta_rejects_zero_k() {
        let (_, m, w) = paper_geometry();
        assert!(lamb_dicke(0.0, m, w).is_err());
    }

    #[test]
    fn eta_omega_scaling() {
        // η ∝ ω^(-1/2): quadrupling ω halves η
        let (k, m, w) = paper_geometry();
        let a = lamb_dicke(k, m, w).unwrap();
        let b = lamb_dicke(k, m, 4.0 * w).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trap_params_eta_consistency() {
        let (k, m, w) = paper_geometry();
        let trap = TrapParams::new(w, k, m).unwrap();
        let expected = k * (HBAR / (2.0 * m * w)).sqrt();
        assert!((trap.lamb_dicke() - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn nbar_paper_value() {
        // 1.6 mK at 2π×32.4 kHz lands within 5% of the quoted 1059
        let nbar = thermal_nbar(1.6e-3, TAU * 32.4e3).unwrap();
        assert!((nbar / 1059.0 - 1.0).abs() < 0.05, "nbar = {nbar}");
    }

    #[test]
    fn nbar_zero_temperature() {
        assert_eq!(thermal_nbar(0.0, TAU * 32.4e3).unwrap(), 0.0);
    }

    #[test]
    fn nbar_roundtrip() {
        let omega = TAU * 32.4e3;
        let t = 1.6e-3;
        let back = nbar_to_temperature(thermal_nbar(t, omega).unwrap(), omega).unwrap();
        assert!((back - t).abs() / t < 1e-12);
    }

    #[test]
    fn nbar_rejects_negative_temperature() {
        assert!(thermal_nbar(-1e-3, TAU * 32.4e3).is_err());
    }

    #[test]
    fn bose_form_matches_classical_at_high_nbar() {
        // 1/(e^x - 1) = 1/x - 1/2 + O(x): classical and exact agree to ~0.5 phonon
        let omega = TAU * 32.4e3;
        let classical = thermal_nbar(1.6e-3, omega).unwrap();
        let bose = thermal_nbar_bose(1.6e-3, omega).unwrap();
        assert!((classical - bose - 0.5).abs() < 0.01, "diff = {}", classical - bose);
        let t_back = nbar_to_temperature_bose(bose, omega).unwrap();
        assert!((t_back - 1.6e-3).abs() / 1.6e-3 < 1e-12);
    }
}
