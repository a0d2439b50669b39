use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lm::{least_squares, DataSeries, FitResult};
use crate::dynamics::{g2_resonant, mollow_lines, Lorentzian};
use crate::error::{Error, Result};
use crate::instrument::triangle_window;
use crate::units;

const FREE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);
const POSITIVE: (f64, f64) = (f64::MIN_POSITIVE, f64::INFINITY);

/// Fixed instrument and atom parameters for a spectrum fit. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFitConfig {
    pub gamma: f64,
    pub cavity_fwhm: f64,
    pub reflection_fraction: f64,
}

impl SpectrumFitConfig {
    pub fn reference() -> Self {
        SpectrumFitConfig {
            gamma: units::rb87_gamma(),
            cavity_fwhm: units::mhz_to_angular(units::SPECTROSCOPY_CAVITY_FWHM_MHZ),
            reflection_fraction: units::LASER_REFLECTION_FRACTION,
        }
    }
}

/// Unit-power closed-form triplet with laser reflection, seen through the
/// cavity.
pub fn measured_triplet(cfg: &SpectrumFitConfig, omega: f64, w: f64) -> f64 {
    let cav = Lorentzian { center: 0.0, fwhm: cfg.cavity_fwhm, area: 1.0 };
    let f = cfg.reflection_fraction;
    let lines: f64 = mollow_lines(cfg.gamma, omega).iter().map(|l| l.convolve(&cav).eval(w)).sum();
    (1.0 - f) * lines + f * cav.eval(w)
}

/// Moving average over `2h + 1` samples, shrinking at the edges.
fn smooth(y: &[f64], h: usize) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h).min(n - 1);
            y[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

fn median_spacing(x: &[f64]) -> f64 {
    let mut d: Vec<f64> = x.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

fn sorted(data: &DataSeries) -> DataSeries {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|&a, &b| data.x[a].total_cmp(&data.x[b]));
    DataSeries {
        x: idx.iter().map(|&i| data.x[i]).collect(),
        y: idx.iter().map(|&i| data.y[i]).collect(),
        y_err: data.y_err.as_ref().map(|e| idx.iter().map(|&i| e[i]).collect()),
    }
}

/// Fit `amplitude · measured_triplet(Ω) + offset` with Ω, amplitude and
/// offset free. Ω is seeded from the sideband separation.
pub fn fit_spectrum(data: &DataSeries, cfg: &SpectrumFitConfig) -> Result<FitResult> {
    if !(cfg.gamma > 0.0 && cfg.cavity_fwhm > 0.0) || !(0.0..1.0).contains(&cfg.reflection_fraction) {
        return Err(Error::invalid("invalid spectrum fit configuration"));
    }
    if data.len() < 10 {
        return Err(Error::FitDegenerate("too few spectrum points".into()));
    }
    let d = sorted(data);
    let h = ((0.25 * cfg.gamma / median_spacing(&d.x)).round() as usize).max(1);
    let s = smooth(&d.y, h);
    let n = s.len();
    let ic = (0..n).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    let xc = d.x[ic];
    let is_max = |i: usize| i > 0 && i + 1 < n && s[i] >= s[i - 1] && s[i] >= s[i + 1];
    let side = |range: Vec<usize>| {
        range
            .into_iter()
            .filter(|&i| is_max(i))
            .max_by(|&a, &b| s[a].total_cmp(&s[b]))
    };
    let left = side((0..n).filter(|&i| d.x[i] < xc - cfg.gamma).collect());
    let right = side((0..n).filter(|&i| d.x[i] > xc + cfg.gamma).collect());
    let (Some(il), Some(ir)) = (left, right) else {
        return Err(Error::FitDegenerate("sidebands not resolved".into()));
    };
    let omega0 = 0.5 * (d.x[ir] - d.x[il]);
    let offset0 = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let amp0 = (s[ic] - offset0) / measured_triplet(cfg, omega0, 0.0);
    if !(amp0 > 0.0) {
        return Err(Error::FitDegenerate("no signal above the baseline".into()));
    }
    let c = *cfg;
    let fit = least_squares(
        move |w, p| p[1] * measured_triplet(&c, p[0], w) + p[2],
        &["omega", "amplitude", "offset"],
        &d,
        &[omega0, amp0, offset0],
        &[(1e-6 * cfg.gamma, f64::INFINITY), POSITIVE, FREE],
    )?;
    if fit.values[0] < cfg.gamma {
        return Err(Error::FitDegenerate(format!(
            "fitted omega {:e} is below the linewidth; triplet unresolved",
            fit.values[0]
        )));
    }
    Ok(fit)
}

/// Fixed parameters of a g²(τ) fit: Γ in rad/s and the pulse length in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2FitConfig {
    pub gamma: f64,
    pub pulse_length: f64,
}

impl G2FitConfig {
    pub fn reference() -> Self {
        G2FitConfig { gamma: units::rb87_gamma(), pulse_length: units::PROBE_PULSE_S }
    }
}

/// Closed-form g²(τ) times the pulse-overlap triangle.
pub fn g2_model(cfg: &G2FitConfig, omega: f64, amplitude: f64, tau: f64) -> f64 {
    amplitude * g2_resonant(cfg.gamma, omega, tau) * triangle_window(tau, cfg.pulse_length)
}

/// Amplitude minimizing the weighted squared error for fixed Ω, and the
/// resulting error.
fn linear_amplitude(data: &DataSeries, cfg: &G2FitConfig, omega: f64) -> (f64, f64) {
    let (mut fy, mut ff) = (0.0, 0.0);
    let w = |i: usize| data.y_err.as_ref().map_or(1.0, |e| 1.0 / (e[i] * e[i]));
    for i in 0..data.len() {
        let f = g2_model(cfg, omega, 1.0, data.x[i]);
        fy += w(i) * f * data.y[i];
        ff += w(i) * f * f;
    }
    let a = if ff > 0.0 { fy / ff } else { 0.0 };
    let sse = (0..data.len())
        .map(|i| w(i) * (data.y[i] - a * g2_model(cfg, omega, 1.0, data.x[i])).powi(2))
        .sum();
    (a, sse)
}

/// Fit Ω and an overall amplitude of the closed-form g²(τ)·triangle.
///
/// Ω is seeded from the first oscillation maximum at `τ = π/Ω`, checked
/// against a coarse logarithmic scan. A fit whose model shows no resolvable
/// oscillation, or whose Ω is uncertain by more than 5%, carries the flag
/// `omega_poorly_identified`.
pub fn fit_g2(data: &DataSeries, cfg: &G2FitConfig) -> Result<FitResult> {
    if !(cfg.gamma > 0.0 && cfg.pulse_length > 0.0) {
        return Err(Error::invalid("invalid g2 fit configuration"));
    }
    if data.len() < 5 {
        return Err(Error::FitDegenerate("too few g2 points".into()));
    }
    let d = sorted(data);
    let mut candidates = Vec::new();
    let window: Vec<usize> = (0..d.len())
        .filter(|&i| d.x[i] != 0.0 && d.x[i].abs() <= 4.0 / cfg.gamma)
        .collect();
    if !window.is_empty() {
        let h = ((0.05 / cfg.gamma / median_spacing(&d.x)).round() as usize).max(1);
        let s = smooth(&d.y, h);
        let ipk = *window.iter().max_by(|&&a, &&b| s[a].total_cmp(&s[b])).unwrap();
        candidates.push(PI / d.x[ipk].abs());
    }
    candidates.extend((0..=120).map(|k| cfg.gamma * 0.25 * 10f64.powf(k as f64 / 50.0)));
    let (omega0, amp0) = candidates
        .iter()
        .map(|&o| {
            let (a, sse) = linear_amplitude(&d, cfg, o);
            (o, a, sse)
        })
        .filter(|(_, a, sse)| *a > 0.0 && sse.is_finite())
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|(o, a, _)| (o, a))
        .ok_or_else(|| Error::FitDegenerate("no positive correlation signal".into()))?;
    let c = *cfg;
    let mut fit = least_squares(
        move |t, p| g2_model(&c, p[0], p[1], t),
        &["omega", "amplitude"],
        &d,
        &[omega0, amp0],
        &[(1e-3 * cfg.gamma, f64::INFINITY), POSITIVE],
    )?;
    let (omega, sigma) = (fit.values[0], fit.sigmas[0]);
    let overshoot = (-0.75 * cfg.gamma * PI / omega).exp();
    if overshoot < 0.05 || sigma > 0.05 * omega {
        fit.flags.push("omega_poorly_identified".into());
    }
    Ok(fit)
}

/// Fixed Γ (rad/s) for a saturation-curve fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationFitConfig {
    pub gamma: f64,
}

/// Fit `P_sat` and η of `R = (ηΓ/2)·P/(P + P_sat)`; x is probe power in W,
/// y the detected rate in counts/s. Flags `psat_eta_correlated` when the
/// two parameters are more than 95% correlated.
pub fn fit_saturation(data: &DataSeries, cfg: &SaturationFitConfig) -> Result<FitResult> {
    if !(cfg.gamma > 0.0) {
        return Err(Error::invalid("gamma must be positive"));
    }
    if data.x.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::invalid("probe powers must be positive"));
    }
    if data.y.iter().all(|&r| r <= 0.0) {
        return Err(Error::FitDegenerate("no positive count rates".into()));
    }
    // seed from the straight line 1/R = (2/ηΓ)(1 + P_sat/P)
    let pts: Vec<(f64, f64)> = data
        .x
        .iter()
        .zip(&data.y)
        .filter(|(_, &r)| r > 0.0)
        .map(|(&p, &r)| (1.0 / p, 1.0 / r))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rmax = data.y.iter().cloned().fold(0.0, f64::max);
    let mut powers = data.x.clone();
    powers.sort_by(f64::total_cmp);
    let (eta0, psat0) = if intercept > 0.0 && slope > 0.0 {
        ((2.0 / (cfg.gamma * intercept)).min(1.0), slope / intercept)
    } else {
        ((4.0 * rmax / cfg.gamma).min(1.0), powers[powers.len() / 2])
    };
    let g = cfg.gamma;
    let mut fit = least_squares(
        move |p, q| 0.5 * q[1] * g * p / (p + q[0]),
        &["p_sat", "eta"],
        data,
        &[psat0, eta0.max(1e-12)],
        &[POSITIVE, (f64::MIN_POSITIVE, 1.0)],
    )?;
    if fit.correlation(0, 1).abs() > 0.95 {
        fit.flags.push("psat_eta_correlated".into());
    }
    Ok(fit)
}
