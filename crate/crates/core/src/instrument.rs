//! Measurement chain: filter cavity, laser reflection, peak readout,
//! linewidth deconvolution and the finite-pulse coincidence window.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Lorentzian, Spectrum};
use crate::error::{Error, Result};
use crate::numerics::trapz_weights;

/// Lorentzian Fabry-Pérot transmission near one resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityFilter {
    /// Resonance offset from the drive, rad/s.
    pub center: f64,
    /// Transmission FWHM, rad/s.
    pub fwhm: f64,
}

impl CavityFilter {
    pub fn new(center: f64, fwhm: f64) -> Result<Self> {
        if !(fwhm > 0.0 && fwhm.is_finite()) || !center.is_finite() {
            return Err(Error::invalid("cavity fwhm must be positive and finite"));
        }
        Ok(CavityFilter { center, fwhm })
    }
}

/// Transmission `1 / (1 + (2(ω − ω_c)/FWHM)²)`, unity on resonance.
pub fn cavity_transfer(filter: &CavityFilter, omega: f64) -> f64 {
    let x = 2.0 * (omega - filter.center) / filter.fwhm;
    1.0 / (1.0 + x * x)
}

/// Laser light reaching the detector, as a share of total detected power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionBackground {
    pub fraction: f64,
}

impl ReflectionBackground {
    pub fn new(fraction: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::invalid(format!("reflection fraction must be in [0, 1), got {fraction}")));
        }
        Ok(ReflectionBackground { fraction })
    }
}

/// Convolve a spectrum with the unit-area cavity line of width `filter_fwhm`.
///
/// The elastic weight becomes a cavity-shaped line at zero offset; the
/// output has no elastic part. Requires grid spacing ≤ `filter_fwhm / 10`.
pub fn convolve_with_cavity(spec: &Spectrum, filter_fwhm: f64) -> Result<Spectrum> {
    if !(filter_fwhm > 0.0) {
        return Err(Error::invalid("filter fwhm must be positive"));
    }
    let required = 0.1 * filter_fwhm;
    let spacing = spec.max_spacing();
    if spacing > required {
        return Err(Error::Resolution { spacing, required });
    }
    let weights = trapz_weights(&spec.freq);
    let mass: Vec<f64> = weights.iter().zip(&spec.density).map(|(w, d)| w * d).collect();
    let kernel = Lorentzian { center: 0.0, fwhm: filter_fwhm, area: 1.0 };
    let elastic = Lorentzian { area: spec.elastic_weight, ..kernel };
    let density = spec
        .freq
        .par_iter()
        .map(|&w| {
            let smeared: f64 = spec
                .freq
                .iter()
                .zip(&mass)
                .map(|(&wj, m)| m * kernel.eval(w - wj))
                .sum();
            smeared + elastic.eval(w)
        })
        .collect();
    Spectrum::new(spec.freq.clone(), density, 0.0)
}

/// Add monochromatic laser light at the drive frequency so that it carries
/// `bg.fraction` of the output power; the atomic part is scaled by
/// `1 − fraction`. Apply before cavity filtering.
pub fn add_reflection(spec: &Spectrum, bg: &ReflectionBackground) -> Result<Spectrum> {
    let f = ReflectionBackground::new(bg.fraction)?.fraction;
    let atomic = spec.total_power();
    let keep = 1.0 - f;
    Spectrum::new(
        spec.freq.clone(),
        spec.density.iter().map(|d| d * keep).collect(),
        spec.elastic_weight * keep + f * atomic,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    /// Interpolated peak position, rad/s.
    pub freq: f64,
    /// Interpolated height of the unsmoothed density.
    pub height: f64,
}

/// Local maxima of the density, tallest first (ties: smaller |ω| first).
///
/// Maxima are located on a 3-point moving average; position and height
/// are refined with a parabola through the raw samples.
pub fn find_peaks(spec: &Spectrum) -> Vec<Peak> {
    let d = &spec.density;
    let n = d.len();
    if n < 3 {
        return Vec::new();
    }
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                d[i]
            } else {
                (d[i - 1] + d[i] + d[i + 1]) / 3.0
            }
        })
        .collect();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if smooth[i] > smooth[i - 1] {
            // walk across a flat top
            let mut j = i;
            while j + 1 < n && smooth[j + 1] == smooth[i] {
                j += 1;
            }
            if j + 1 < n && smooth[j + 1] < smooth[i] {
                let k = (i + j) / 2;
                peaks.push(refine_peak(&spec.freq, d, k));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks.sort_by(|a, b| {
        b.height
            .total_cmp(&a.height)
            .then(a.freq.abs().total_cmp(&b.freq.abs()))
    });
    peaks
}

fn refine_peak(x: &[f64], y: &[f64], k: usize) -> Peak {
    // pick the raw sample maximum near k, then fit a parabola through it
    let mut m = k;
    for j in k.saturating_sub(1)..=(k + 1).min(y.len() - 1) {
        if y[j] > y[m] {
            m = j;
        }
    }
    if m == 0 || m == y.len() - 1 {
        return Peak { index: m, freq: x[m], height: y[m] };
    }
    let (x0, x1, x2) = (x[m - 1], x[m], x[m + 1]);
    let (y0, y1, y2) = (y[m - 1], y[m], y[m + 1]);
    // Newton divided differences
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let a = (d2 - d1) / (x2 - x0);
    if !(a < 0.0) {
        return Peak { index: m, freq: x1, height: y1 };
    }
    let b = d1 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y0 + d1 * (xv - x0) + a * (xv - x0) * (xv - x1);
    Peak { index: m, freq: xv, height: yv }
}

/// Heights of a triplet, normalized to the smaller sideband.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRatios {
    pub left: f64,
    pub center: f64,
    pub right: f64,
}

/// Locate the three tallest local maxima and report their relative heights.
pub fn peak_ratios(spec: &Spectrum) -> Result<PeakRatios> {
    let peaks = find_peaks(spec);
    if peaks.len() < 3 {
        return Err(Error::PeakFinding { needed: 3, found: peaks.len() });
    }
    let mut top: Vec<Peak> = peaks[..3].to_vec();
    top.sort_by(|a, b| a.freq.total_cmp(&b.freq));
    let norm = top[0].height.min(top[2].height);
    Ok(PeakRatios {
        left: top[0].height / norm,
        center: top[1].height / norm,
        right: top[2].height / norm,
    })
}

/// Full width at half maximum of the peak at `peak.index`, by linear
/// interpolation of the half-maximum crossings.
pub fn peak_fwhm(spec: &Spectrum, peak: &Peak) -> Result<f64> {
    let d = &spec.density;
    let x = &spec.freq;
    let half = 0.5 * peak.height;
    let mut lo = None;
    for i in (0..peak.index).rev() {
        if d[i] <= half {
            let t = (half - d[i]) / (d[i + 1] - d[i]);
            lo = Some(x[i] + t * (x[i + 1] - x[i]));
            break;
        }
    }
    let mut hi = None;
    for i in peak.index + 1..d.len() {
        if d[i] <= half {
            let t = (d[i - 1] - half) / (d[i - 1] - d[i]);
            hi = Some(x[i - 1] + t * (x[i] - x[i - 1]));
            break;
        }
    }
    match (lo, hi) {
        (Some(a), Some(b)) => Ok(b - a),
        _ => Err(Error::invalid("peak does not fall to half maximum within the grid")),
    }
}

/// Intrinsic width from a measured Lorentzian width: widths add under
/// Lorentzian convolution.
pub fn deconvolve_fwhm(measured_fwhm: f64, cavity_fwhm: f64) -> Result<f64> {
    if !(measured_fwhm > cavity_fwhm) {
        return Err(Error::NonPhysical { measured: measured_fwhm, instrument: cavity_fwhm });
    }
    Ok(measured_fwhm - cavity_fwhm)
}

/// Overlap of two square pulses of length `pulse_length` at delay `tau`:
/// `max(0, 1 − |τ|/T)`.
pub fn triangle_window(tau: f64, pulse_length: f64) -> f64 {
    (1.0 - tau.abs() / pulse_length).max(0.0)
}
