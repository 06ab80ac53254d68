//! Closed-form single-pulse physics: the hyperbolic-secant transfer
//! fidelity, the two-photon Rabi frequency and differential light shift of
//! the stimulated Raman transition, the magic detuning that nulls the
//! shift, and pulse envelope definitions.

use crate::error::{Error, Result};
use crate::species::IonSpecies;
use crate::units::wavelength_from_angular;
use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2, TAU};

/// Timescale constant of the sech-pulse transfer formula
/// F = sin²(θ/2)·sech²(δ·τ/1.76).
pub const SECH_TRANSFER_TIMESCALE: f64 = 1.76;

/// Default pole guard for the Raman formulas: evaluation is refused when
/// the laser detuning is within 2π×1 GHz of either P-state resonance.
pub const DEFAULT_POLE_GUARD: f64 = TAU * 1.0e9;

/// arcsech(1/2) = ln(2 + √3); half-width constant of sech.
const ASECH_HALF: f64 = 1.316_957_896_924_816_6;
/// arccosh(√2) = ln(1 + √2); half-width constant of sech².
const ACOSH_SQRT2: f64 = 0.881_373_587_019_543;

/// Temporal envelope shape of the Rabi frequency Ω(t).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    /// Ω(t) ∝ sech(2·arcsech(½)·t/τ); FWHM of Ω(t) equals τ.
    Sech,
    /// Ω(t) ∝ sech²(2·arccosh(√2)·t/τ); FWHM of Ω(t) equals τ.
    SechSquared,
}

/// A single pulse: envelope shape, FWHM duration, area, and the qubit
/// splitting it drives across.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub envelope: Envelope,
    /// Full width at half maximum of Ω(t) (s)
    pub fwhm: f64,
    /// Pulse area θ = ∫Ω(t)dt (rad)
    pub area: f64,
    /// Qubit splitting δ (rad/s)
    pub detuning_qubit: f64,
}

impl PulseParams {
    pub fn new(envelope: Envelope, fwhm: f64, area: f64, detuning_qubit: f64) -> Result<Self> {
        if !(fwhm > 0.0) || !fwhm.is_finite() {
            return Err(Error::domain("PulseParams", format!("fwhm must be positive, got {fwhm}")));
        }
        if !(area >= 0.0) || !area.is_finite() {
            return Err(Error::domain("PulseParams", format!("area must be non-negative, got {area}")));
        }
        if !detuning_qubit.is_finite() {
            return Err(Error::domain("PulseParams", "detuning_qubit must be finite"));
        }
        Ok(PulseParams { envelope, fwhm, area, detuning_qubit })
    }

    /// Peak Rabi frequency Ω₀ such that ∫Ω(t)dt = area (rad/s).
    pub fn peak_rabi(&self) -> f64 {
        match self.envelope {
            // ∫ sech(at) dt = π/a with a = 2·arcsech(½)/τ
            Envelope::Sech => self.area * 2.0 * ASECH_HALF / (PI * self.fwhm),
            // ∫ sech²(bt) dt = 2/b with b = 2·arccosh(√2)/τ
            Envelope::SechSquared => self.area * ACOSH_SQRT2 / self.fwhm,
        }
    }

    /// Dimensionless envelope shape f(t), f(0) = 1, FWHM = fwhm.
    pub fn shape(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::Sech => sech(2.0 * ASECH_HALF * t / self.fwhm),
            Envelope::SechSquared => {
                let s = sech(2.0 * ACOSH_SQRT2 * t / self.fwhm);
                s * s
            }
        }
    }

    /// Time integral of the dimensionless shape, ∫f(t)dt (s).
    pub fn shape_integral(&self) -> f64 {
        match self.envelope {
            Envelope::Sech => PI * self.fwhm / (2.0 * ASECH_HALF),
            Envelope::SechSquared => self.fwhm / ACOSH_SQRT2,
        }
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Instantaneous Rabi frequency Ω(t) of the pulse (rad/s), normalized so
/// that ∫Ω(t)dt equals the pulse area and FWHM(Ω) equals the pulse FWHM.
pub fn envelope_value(p: &PulseParams, t: f64) -> f64 {
    p.peak_rabi() * p.shape(t)
}

/// Population-transfer fidelity of a hyperbolic-secant pulse of area θ and
/// FWHM τ across a splitting δ: F = sin²(θ/2)·sech²(δ·τ/1.76).
pub fn rosen_zener_fidelity(p: &PulseParams) -> f64 {
    let amplitude = (p.area / 2.0).sin().powi(2);
    let detuning_factor = sech(p.detuning_qubit * p.fwhm / SECH_TRANSFER_TIMESCALE).powi(2);
    (amplitude * detuning_factor).clamp(0.0, 1.0)
}

/// Complex electric field amplitudes at the ion in the spherical basis,
/// plus the laser detuning Δ = ω − ω₀ from the S₁/₂→P₁/₂ resonance.
///
/// Amplitudes use the analytic-signal convention E(t) = Re[E·e^(−iωt)],
/// so intensity I = ½ε₀c|E|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    /// π-polarized component (V/m)
    pub e_pi: Complex64,
    /// σ⁺ component (V/m)
    pub e_sigma_plus: Complex64,
    /// σ⁻ component (V/m)
    pub e_sigma_minus: Complex64,
    /// Laser detuning Δ = ω − ω₀ (rad/s); may be negative
    pub laser_detuning: f64,
}

fn check_poles(delta: f64, omega_fs: f64, guard: f64) -> Result<()> {
    let d1 = delta.abs();
    let d2 = (delta - omega_fs).abs();
    let offence = d1.min(d2);
    if offence < guard {
        return Err(Error::PoleProximity { guard, offence });
    }
    Ok(())
}

/// Two-photon Rabi frequency of the Raman transition (rad/s, complex):
/// Ω₂γ = (√2/(6Δ))·(d²/ħ²)·(2Δ/(Δ−ω_FS) − 1)·(E_π*·E_σ₋ + E_σ₊*·E_π).
///
/// Magnitude and phase are available on the returned complex value; the
/// population dynamics consume the magnitude.
pub fn two_photon_rabi(f: &FieldConfig, s: &IonSpecies) -> Result<Complex64> {
    two_photon_rabi_guarded(f, s, DEFAULT_POLE_GUARD)
}

/// [`two_photon_rabi`] with an explicit pole guard threshold (rad/s).
pub fn two_photon_rabi_guarded(f: &FieldConfig, s: &IonSpecies, guard: f64) -> Result<Complex64> {
    let delta = f.laser_detuning;
    let omega_fs = s.fine_structure_omega();
    check_poles(delta, omega_fs, guard)?;
    let d2_hbar2 = (s.dipole_moment() / crate::constants::HBAR).powi(2);
    let structure = 2.0 * delta / (delta - omega_fs) - 1.0;
    let bilinear = f.e_pi.conj() * f.e_sigma_minus + f.e_sigma_plus.conj() * f.e_pi;
    Ok(bilinear * (SQRT_2 / (6.0 * delta) * d2_hbar2 * structure))
}

/// Differential light shift of the qubit (rad/s):
/// δ₂γ = (d²/(6ħ²Δ))·(4Δ/(Δ−ω_FS) + 1)·(|E_σ₊|² − |E_σ₋|²).
pub fn differential_light_shift(f: &FieldConfig, s: &IonSpecies) -> Result<f64> {
    differential_light_shift_guarded(f, s, DEFAULT_POLE_GUARD)
}

/// [`differential_light_shift`] with an explicit pole guard (rad/s).
pub fn differential_light_shift_guarded(f: &FieldConfig, s: &IonSpecies, guard: f64) -> Result<f64> {
    let delta = f.laser_detuning;
    let omega_fs = s.fine_structure_omega();
    check_poles(delta, omega_fs, guard)?;
    let imbalance = f.e_sigma_plus.norm_sqr() - f.e_sigma_minus.norm_sqr();
    Ok(light_shift_prefactor(delta, s) * imbalance)
}

/// The field-independent prefactor (d²/(6ħ²Δ))·(4Δ/(Δ−ω_FS) + 1) of the
/// differential light shift (rad/s per (V/m)²).
pub fn light_shift_prefactor(delta: f64, s: &IonSpecies) -> f64 {
    let d2_hbar2 = (s.dipole_moment() / crate::constants::HBAR).powi(2);
    let structure = 4.0 * delta / (delta - s.fine_structure_omega()) + 1.0;
    d2_hbar2 / (6.0 * delta) * structure
}

/// Magic detuning Δ* = ω_FS/5 (rad/s) and the corresponding vacuum
/// wavelength (m) at which the differential light shift vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicPoint {
    pub detuning: f64,
    pub wavelength: f64,
}

/// Root of the light-shift prefactor in Δ ∈ (0, ω_FS): Δ* = ω_FS/5.
pub fn magic_detuning(s: &IonSpecies) -> MagicPoint {
    let detuning = s.fine_structure_omega() / 5.0;
    let wavelength = wavelength_from_angular(s.resonance_omega0() + detuning);
    MagicPoint { detuning, wavelength }
}
