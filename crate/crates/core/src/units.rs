//! Unit conversions and reference values.
//!
//! Everything inside the crate is SI with angular frequencies. Text formats
//! report MHz (cycles) and ns.

use std::f64::consts::TAU;

/// Natural linewidth of the ⁸⁷Rb D2 line, MHz.
pub const RB87_D2_LINEWIDTH_MHZ: f64 = 6.07;
/// Linewidth of the scanning spectroscopy cavity, MHz.
pub const SPECTROSCOPY_CAVITY_FWHM_MHZ: f64 = 3.92;
/// Linewidth of the sideband filter cavities, MHz.
pub const SIDEBAND_FILTER_FWHM_MHZ: f64 = 20.0;
/// Probe-laser reflection share of the detected spectral power.
pub const LASER_REFLECTION_FRACTION: f64 = 0.076;
/// Probe pulse length, s.
pub const PROBE_PULSE_S: f64 = 2e-6;
/// Total detection efficiency.
pub const DETECTION_EFFICIENCY: f64 = 0.0179;
/// Saturation power of the probe, W.
pub const SATURATION_POWER_W: f64 = 6.3e-12;

#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz * 1e6
}

#[inline]
pub fn angular_to_mhz(w: f64) -> f64 {
    w / (TAU * 1e6)
}

#[inline]
pub fn ns_to_s(t_ns: f64) -> f64 {
    t_ns * 1e-9
}

#[inline]
pub fn s_to_ns(t: f64) -> f64 {
    t * 1e9
}

/// Natural linewidth of the ⁸⁷Rb D2 line in rad/s.
pub fn rb87_gamma() -> f64 {
    mhz_to_angular(RB87_D2_LINEWIDTH_MHZ)
}
