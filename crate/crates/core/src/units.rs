//! Unit conventions.
//!
//! Every quantity inside this crate is SI: frequencies are *angular*
//! (rad/s), energies in joules, lengths in meters, temperatures in kelvin,
//! times in seconds. Ordinary frequencies in Hz, wavelengths in nm, and
//! other human-friendly units appear only at API boundaries (CLI flags,
//! CSV columns) and are converted immediately with the helpers below.

use std::f64::consts::TAU;

/// Marker for the crate-wide unit convention; see module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitPolicy;

impl UnitPolicy {
    pub const FREQUENCIES: &'static str = "angular (rad/s)";
    pub const ENERGIES: &'static str = "joules";
    pub const LENGTHS: &'static str = "meters";
    pub const TEMPERATURES: &'static str = "kelvin";
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn angular_from_hz(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
pub fn hz_from_angular(omega: f64) -> f64 {
    omega / TAU
}

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn angular_from_wavelength(lambda_m: f64) -> f64 {
    TAU * crate::constants::C / lambda_m
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn wavelength_from_angular(omega: f64) -> f64 {
    TAU * crate::constants::C / omega
}
