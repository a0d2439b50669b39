//! Acceptance suite. Every criterion prints one PASS/FAIL line; the test
//! fails if any criterion does. Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use mollow_core::dynamics::{
    g2_resonant, generalized_rabi, mollow_lines, mollow_spectrum_analytic, spectrum_numeric,
};
use mollow_core::filtered::{build_composite, filtered_cross_correlation, fit_two_exponentials, SensorConfig};
use mollow_core::fit::{
    fit_g2, fit_saturation, fit_spectrum, g2_model, measured_triplet, DataSeries, G2FitConfig,
    SaturationFitConfig, SpectrumFitConfig,
};
use mollow_core::instrument::{
    add_reflection, convolve_with_cavity, deconvolve_fwhm, find_peaks, peak_fwhm, peak_ratios,
    triangle_window, ReflectionBackground,
};
use mollow_core::montecarlo::{
    correlate, hbt_split, simulate_stream, write_timetag, CorrelationHistogram, PhotonRecord, SimConfig,
    TimetagHeader,
};
use mollow_core::numerics::{integrate_real_line, linspace};
use mollow_core::units::{angular_to_mhz, mhz_to_angular, rb87_gamma};
use mollow_core::{AtomParams, Spectrum};

// Pinned tolerances.
const C1_AREA_REL: f64 = 1e-6;
const C1_HEIGHT_REL: f64 = 1e-9;
const C1_RUNTIME: Duration = Duration::from_secs(1);
const C2_POSITION_REL: f64 = 0.01;
const C2_FWHM_REL: f64 = 0.05;
const C2_RUNTIME: Duration = Duration::from_secs(10);
const C3_CAVITY_RATIO: (f64, f64) = (2.6, 0.15);
const C3_REFLECTION_RATIO: (f64, f64) = (3.7, 0.3);
const C3_RUNTIME: Duration = Duration::from_secs(5);
const C4_WEAK_READING_MHZ: (f64, f64) = (2.5, 0.3);
const C4_STRONG_READING_MHZ: (f64, f64) = (7.3, 0.5);
const C5_MAX_REDUCED_CHI2: f64 = 2.0;
const C5_MAX_ZERO_BIN: f64 = 0.1;
const C5_RUNTIME: Duration = Duration::from_secs(120);
const C6_OMEGA_REL: f64 = 0.02;
const C6_SUCCESS_FRACTION: f64 = 0.95;
const C6_SATURATION_REL: f64 = 0.05;
const C6_JOINT_SIGMAS: f64 = 2.0;
const C7_RABI_MHZ: (f64, f64) = (42.0, 1.0);
const C7_SIDEBAND_REL: f64 = 0.05;
const C8_MIN_BUNCHING: f64 = 1.5;
const C8_RATIO_RANGE: (f64, f64) = (2.0, 6.0);
const C8_SYMMETRY: f64 = 1e-4;
const C8_RUNTIME: Duration = Duration::from_secs(30);
const SUITE_RUNTIME: Duration = Duration::from_secs(600);

const REPETITIONS: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Goes straight to the process stderr so the report is visible without
/// `--nocapture`.
fn report(n: usize, o: &Outcome, elapsed: Duration) {
    let line = format!(
        "criterion {n}: {} ({:.2} s) {}\n",
        if o.pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        o.detail
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut o = f();
    let el = start.elapsed();
    if let Some(limit) = limit {
        if el > limit {
            o.pass = false;
            o.detail += &format!("; runtime over {:.0} s", limit.as_secs_f64());
        }
    }
    (o, el)
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn mhz_grid(half_span: f64, step: f64) -> Vec<f64> {
    let half = (half_span / step).round() as i64;
    (-half..=half).map(|k| mhz_to_angular(k as f64 * step)).collect()
}

fn criterion_1() -> Outcome {
    let gamma = rb87_gamma();
    let lines = mollow_lines(gamma, 10.0 * gamma);
    let areas: Vec<f64> = lines
        .iter()
        .map(|l| integrate_real_line(|w| l.eval(w), l.center, 0.5 * l.fwhm, 20_000))
        .collect();
    let heights: Vec<f64> = lines.iter().map(|l| l.eval(l.center)).collect();
    let area_err = [rel(areas[1] / areas[0], 2.0), rel(areas[1] / areas[2], 2.0), rel(areas[0] / areas[2], 1.0)]
        .into_iter()
        .fold(0.0, f64::max);
    let height_err = rel(heights[1] / heights[0], 3.0).max(rel(heights[1] / heights[2], 3.0));
    outcome(
        area_err < C1_AREA_REL && height_err < C1_HEIGHT_REL,
        format!(
            "areas {:.9}:{:.9}:{:.9} (rel err {area_err:.1e}), heights ratio err {height_err:.1e}",
            areas[0] / areas[0],
            areas[1] / areas[0],
            areas[2] / areas[0]
        ),
    )
}

/// Nearest peak to `target`.
fn peak_near(spec: &Spectrum, target: f64) -> Option<mollow_core::instrument::Peak> {
    find_peaks(spec)
        .into_iter()
        .take(3)
        .min_by(|a, b| (a.freq - target).abs().total_cmp(&(b.freq - target).abs()))
}

fn criterion_2() -> Outcome {
    let gamma = rb87_gamma();
    let omega = 10.0 * gamma;
    let p = AtomParams::new(gamma, omega, 0.0).unwrap();
    let grid: Vec<f64> = linspace(-3.0 * omega, 3.0 * omega, 3001);
    let num = spectrum_numeric(&p, &grid).unwrap();
    let ana = mollow_spectrum_analytic(&p, &grid).unwrap();
    let (Some(lo), Some(mid), Some(hi)) = (peak_near(&num, -omega), peak_near(&num, 0.0), peak_near(&num, omega))
    else {
        return outcome(false, "triplet not found in the numeric spectrum".into());
    };
    let pos_err = rel(-lo.freq, omega).max(rel(hi.freq, omega));
    let fwhm = peak_fwhm(&num, &mid).unwrap();
    let fwhm_err = rel(fwhm, gamma);
    // scale-free shape comparison for information
    let scale = num.inelastic_power() / ana.inelastic_power();
    let worst = num
        .density
        .iter()
        .zip(&ana.density)
        .map(|(a, b)| (a - b * scale).abs())
        .fold(0.0, f64::max)
        / (scale * ana.density.iter().cloned().fold(0.0, f64::max));
    outcome(
        pos_err < C2_POSITION_REL && fwhm_err < C2_FWHM_REL,
        format!(
            "sidebands at {:.3}/{:.3} x Omega (err {:.2}%), central FWHM {:.4} Gamma, max shape deviation {:.2}% of peak",
            lo.freq / omega,
            hi.freq / omega,
            100.0 * pos_err,
            fwhm / gamma,
            100.0 * worst
        ),
    )
}

fn criterion_3() -> Outcome {
    let gamma = rb87_gamma();
    let p = AtomParams::new(gamma, mhz_to_angular(25.0), 0.0).unwrap();
    let grid = mhz_grid(150.0, 0.1);
    let ideal = mollow_spectrum_analytic(&p, &grid).unwrap();
    let r0 = peak_ratios(&ideal).unwrap();
    let cav = convolve_with_cavity(&ideal, mhz_to_angular(3.92)).unwrap();
    let r1 = peak_ratios(&cav).unwrap();
    let refl = add_reflection(&ideal, &ReflectionBackground::new(0.076).unwrap()).unwrap();
    let both = convolve_with_cavity(&refl, mhz_to_angular(3.92)).unwrap();
    let r2 = peak_ratios(&both).unwrap();
    let ok1 = (r1.center - C3_CAVITY_RATIO.0).abs() <= C3_CAVITY_RATIO.1;
    let ok2 = (r2.center - C3_REFLECTION_RATIO.0).abs() <= C3_REFLECTION_RATIO.1;
    // line-by-line heights, ignoring overlap between the three lines
    let cavity = mollow_core::dynamics::Lorentzian { center: 0.0, fwhm: mhz_to_angular(3.92), area: 1.0 };
    let [side, mid, _] = mollow_lines(gamma, p.omega).map(|l| l.convolve(&cavity));
    let comp = mid.peak_height() / side.peak_height();
    let comp_refl = (0.924 * mid.peak_height() + 0.076 * cavity.peak_height()) / (0.924 * side.peak_height());
    outcome(
        ok1 && ok2,
        format!(
            "full spectrum: ideal 1:{:.3}:{:.3}, cavity 1:{:.3}:{:.3}, cavity+reflection 1:{:.3}:{:.3}; \
             isolated-line heights: cavity 1:{comp:.3}:1, cavity+reflection 1:{comp_refl:.3}:1",
            r0.center, r0.right, r1.center, r1.right, r2.center, r2.right
        ),
    )
}

/// Central-peak width of the cavity-convolved model spectrum, deconvolved.
fn deconvolved_center_width(omega_mhz: f64) -> f64 {
    let p = AtomParams::from_mhz(6.07, omega_mhz, 0.0).unwrap();
    let grid = mhz_grid(150.0, 0.025);
    let s = spectrum_numeric(&p, &grid).unwrap();
    let cavity = mhz_to_angular(3.92);
    let m = convolve_with_cavity(&s, cavity).unwrap();
    let center = find_peaks(&m)
        .into_iter()
        .min_by(|a, b| a.freq.abs().total_cmp(&b.freq.abs()))
        .unwrap();
    let measured = peak_fwhm(&m, &center).unwrap();
    angular_to_mhz(deconvolve_fwhm(measured, cavity).unwrap())
}

fn criterion_4() -> Outcome {
    // round trip on Lorentzians with the two reported intrinsic widths
    let mut round_trip_ok = true;
    for (w, tol) in [(2.5, 0.3), (7.3, 0.5)] {
        let grid = mhz_grid(200.0, 0.02);
        let l = mollow_core::dynamics::Lorentzian { center: 0.0, fwhm: mhz_to_angular(w), area: 1.0 };
        let s = Spectrum::new(grid.clone(), grid.iter().map(|&x| l.eval(x)).collect(), 0.0).unwrap();
        let c = convolve_with_cavity(&s, mhz_to_angular(3.92)).unwrap();
        let pk = find_peaks(&c)[0];
        let back = angular_to_mhz(deconvolve_fwhm(peak_fwhm(&c, &pk).unwrap(), mhz_to_angular(3.92)).unwrap());
        round_trip_ok &= (back - w).abs() <= tol;
    }
    // weak drive well below saturation, strong drive at a resolved triplet
    let weak = deconvolved_center_width(1.0);
    let strong = deconvolved_center_width(25.0);
    let (lo, hi) = (weak.min(strong), weak.max(strong));
    let overlaps = |(r, e): (f64, f64)| r + e >= lo && r - e <= hi;
    let weak_ok = overlaps(C4_WEAK_READING_MHZ);
    let strong_ok = overlaps(C4_STRONG_READING_MHZ);
    outcome(
        round_trip_ok && weak_ok && strong_ok,
        format!(
            "model widths {weak:.3} MHz (weak) .. {strong:.3} MHz (strong); reading 2.5(3) {}, reading 7.3(5) {}; round trip {}",
            if weak_ok { "inside" } else { "outside" },
            if strong_ok { "inside" } else { "outside" },
            if round_trip_ok { "ok" } else { "off" }
        ),
    )
}

struct McData {
    records: Vec<PhotonRecord>,
    cfg: SimConfig,
}

fn c5_dataset() -> McData {
    let gamma = rb87_gamma();
    let cfg = SimConfig {
        params: AtomParams::new(gamma, 10.0 * gamma, 0.0).unwrap(),
        pulse_length: 2e-6,
        n_trials: 100_000,
        detection_efficiency: 1.0,
        rng_seed: 20_240_501,
    };
    let stream = simulate_stream(&cfg).unwrap();
    McData { records: hbt_split(&stream, 99), cfg }
}

/// Bin average of `g2_resonant · triangle` over each bin.
fn bin_averaged_model(h: &CorrelationHistogram, gamma: f64, omega: f64) -> Vec<f64> {
    let sub = 32;
    h.bin_centers()
        .iter()
        .map(|&c| {
            let pts = linspace(c - 0.5 * h.bin_width, c + 0.5 * h.bin_width, sub + 1);
            let vals: Vec<f64> = pts
                .iter()
                .map(|&t| g2_resonant(gamma, omega, t) * triangle_window(t, h.pulse_length))
                .collect();
            mollow_core::numerics::trapz(&pts, &vals) / h.bin_width
        })
        .collect()
}

fn criterion_5(data: &McData) -> Outcome {
    let h = correlate(&data.records, 1e-9, 200e-9, data.cfg.n_trials, data.cfg.pulse_length).unwrap();
    let g = h.normalized().unwrap();
    let model = bin_averaged_model(&h, data.cfg.params.gamma, data.cfg.params.omega);
    let chi2: f64 = h
        .counts
        .iter()
        .zip(&model)
        .map(|(&c, &m)| {
            let e = (m * h.norm).max(1.0);
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let red = chi2 / h.counts.len() as f64;
    let zero = g[h.zero_bin()];
    outcome(
        red < C5_MAX_REDUCED_CHI2 && zero < C5_MAX_ZERO_BIN,
        format!(
            "{} detections, {} pairs, reduced chi2 {red:.3} over {} bins, g2 zero bin {zero:.4}",
            data.records.len(),
            h.total_pairs(),
            h.counts.len()
        ),
    )
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

fn noise_rng(rep: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rep as u64);
    rng.set_stream(stream);
    rng
}

fn criterion_6(data: &McData) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // spectrum: Omega = 2pi 30 MHz, 3% of peak height additive noise, MHz units
    let scfg = SpectrumFitConfig { gamma: 6.07, cavity_fwhm: 3.92, reflection_fraction: 0.076 };
    let om_s = 30.0;
    let xs: Vec<f64> = (-360..=360).map(|k| k as f64 * 0.25).collect();
    let clean: Vec<f64> = xs.iter().map(|&f| measured_triplet(&scfg, om_s, f)).collect();
    let peak = clean.iter().cloned().fold(0.0, f64::max);
    let hits = (0..REPETITIONS)
        .into_par_iter()
        .filter(|&rep| {
            let mut rng = noise_rng(rep, 1);
            let n = Normal::new(0.0, 0.03 * peak).unwrap();
            let y = clean.iter().map(|v| v + n.sample(&mut rng)).collect();
            fit_spectrum(&DataSeries::new(xs.clone(), y, None).unwrap(), &scfg)
                .map(|f| rel(f.values[0], om_s) < C6_OMEGA_REL)
                .unwrap_or(false)
        })
        .count();
    let frac = hits as f64 / REPETITIONS as f64;
    pass &= frac >= C6_SUCCESS_FRACTION;
    notes.push(format!("spectrum {:.0}%", 100.0 * frac));

    // g2: Omega = 2pi 25 MHz, sigma 0.05 additive, tau in ns
    let gcfg = G2FitConfig { gamma: 2.0 * PI * 6.07e-3, pulse_length: 2000.0 };
    let om_g = 2.0 * PI * 25e-3;
    let taus: Vec<f64> = (-250..=250).map(|k| k as f64).collect();
    let clean: Vec<f64> = taus.iter().map(|&t| g2_model(&gcfg, om_g, 1.0, t)).collect();
    let hits = (0..REPETITIONS)
        .into_par_iter()
        .filter(|&rep| {
            let mut rng = noise_rng(rep, 2);
            let n = Normal::new(0.0, 0.05).unwrap();
            let y = clean.iter().map(|v| v + n.sample(&mut rng)).collect();
            fit_g2(&DataSeries::new(taus.clone(), y, None).unwrap(), &gcfg)
                .map(|f| rel(f.values[0], om_g) < C6_OMEGA_REL)
                .unwrap_or(false)
        })
        .count();
    let frac = hits as f64 / REPETITIONS as f64;
    pass &= frac >= C6_SUCCESS_FRACTION;
    notes.push(format!("g2 {:.0}%", 100.0 * frac));

    // saturation: 3% multiplicative noise, powers in pW
    let gamma = rb87_gamma();
    let (psat, eta) = (6.3, 0.0179);
    let powers = log_space(0.3, 60.0, 20);
    let clean: Vec<f64> = powers.iter().map(|&p| 0.5 * eta * gamma * p / (p + psat)).collect();
    let hits = (0..REPETITIONS)
        .into_par_iter()
        .filter(|&rep| {
            let mut rng = noise_rng(rep, 3);
            let n = Normal::new(0.0, 0.03).unwrap();
            let y: Vec<f64> = clean.iter().map(|v| v * (1.0 + n.sample(&mut rng))).collect();
            let err = y.iter().map(|v| 0.03 * v).collect();
            fit_saturation(&DataSeries::new(powers.clone(), y, Some(err)).unwrap(), &SaturationFitConfig { gamma })
                .map(|f| rel(f.values[0], psat) < C6_SATURATION_REL && rel(f.values[1], eta) < C6_SATURATION_REL)
                .unwrap_or(false)
        })
        .count();
    let frac = hits as f64 / REPETITIONS as f64;
    pass &= frac >= C6_SUCCESS_FRACTION;
    notes.push(format!("saturation {:.0}%", 100.0 * frac));

    // cross-check: Monte Carlo g2 versus the exact spectrum seen through the
    // instrument, both at the criterion-5 operating point
    let p = data.cfg.params;
    let h = correlate(&data.records, 0.25e-9, 200e-9, data.cfg.n_trials, data.cfg.pulse_length).unwrap();
    let tau_ns: Vec<f64> = h.bin_centers().iter().map(|t| t * 1e9).collect();
    let g2 = DataSeries::new(tau_ns, h.normalized().unwrap(), Some(h.normalized_errors().unwrap())).unwrap();
    let gcfg = G2FitConfig { gamma: p.gamma * 1e-9, pulse_length: data.cfg.pulse_length * 1e9 };
    let fg = fit_g2(&g2, &gcfg).unwrap();
    let (og, sg) = (fg.values[0] * 1e3 / (2.0 * PI), fg.sigmas[0] * 1e3 / (2.0 * PI));

    let grid = mhz_grid(2.0 * angular_to_mhz(p.omega) + 30.0, 0.25);
    let ideal = spectrum_numeric(&p, &grid).unwrap();
    let measured = convolve_with_cavity(
        &add_reflection(&ideal, &ReflectionBackground::new(0.076).unwrap()).unwrap(),
        mhz_to_angular(3.92),
    )
    .unwrap();
    let peak = measured.density.iter().cloned().fold(0.0, f64::max);
    let mut rng = noise_rng(0, 4);
    let n = Normal::new(0.0, 0.03).unwrap();
    let y: Vec<f64> = measured.density.iter().map(|d| d / peak + n.sample(&mut rng)).collect();
    let xs: Vec<f64> = grid.iter().map(|&w| angular_to_mhz(w)).collect();
    let fs = fit_spectrum(&DataSeries::new(xs, y, None).unwrap(), &scfg).unwrap();
    let (os, ss) = (fs.values[0], fs.sigmas[0]);
    let joint = sg.hypot(ss);
    let agree = (og - os).abs() <= C6_JOINT_SIGMAS * joint;
    pass &= agree;
    notes.push(format!(
        "cross-check g2 {og:.3}({sg:.3}) vs spectrum {os:.3}({ss:.3}) MHz, truth {:.3}, |diff| = {:.1} joint sigma",
        angular_to_mhz(p.omega),
        (og - os).abs() / joint
    ));
    outcome(pass, notes.join(", "))
}

fn criterion_7() -> Outcome {
    let p = AtomParams::from_mhz(6.07, 29.4, -30.0).unwrap();
    let wp = generalized_rabi(&p);
    let wp_mhz = angular_to_mhz(wp);
    let rabi_ok = (wp_mhz - C7_RABI_MHZ.0).abs() <= C7_RABI_MHZ.1 && (wp_mhz - 42.0).abs() < 0.05;
    let grid = mhz_grid(120.0, 0.05);
    let s = spectrum_numeric(&p, &grid).unwrap();
    let (Some(lo), Some(hi)) = (peak_near(&s, -wp), peak_near(&s, wp)) else {
        return outcome(false, "sidebands not found".into());
    };
    let err = rel(-lo.freq, wp).max(rel(hi.freq, wp));
    outcome(
        rabi_ok && err < C7_SIDEBAND_REL,
        format!(
            "Omega' = {wp_mhz:.3} MHz, sidebands at {:.2} / {:.2} MHz (err {:.2}%)",
            angular_to_mhz(lo.freq),
            angular_to_mhz(hi.freq),
            100.0 * err
        ),
    )
}

fn cross(omega_mhz: f64, delta_mhz: f64, taus: &[f64]) -> Vec<f64> {
    let p = AtomParams::from_mhz(6.07, omega_mhz, delta_mhz).unwrap();
    let cfg = SensorConfig::reference_sidebands(&p).unwrap();
    let sys = build_composite(&p, &cfg).unwrap();
    filtered_cross_correlation(&sys, taus).unwrap().g
}

fn criterion_8() -> Outcome {
    let taus: Vec<f64> = (-300..=300).map(|k| k as f64 * 0.5e-9).collect();
    let g = cross(29.4, -30.0, &taus);
    let gmax = g.iter().cloned().fold(0.0, f64::max);
    let fit = fit_two_exponentials(&mollow_core::filtered::CrossCorrelation { tau: taus.clone(), g: g.clone() })
        .unwrap();
    let ratio = fit.tau_fall / fit.tau_rise;
    let a = gmax > C8_MIN_BUNCHING;
    let b = fit.tau_fall > fit.tau_rise && ratio >= C8_RATIO_RANGE.0 && ratio <= C8_RATIO_RANGE.1;
    let flipped = cross(29.4, 30.0, &taus);
    let n = taus.len();
    let mirror = (0..n)
        .map(|i| (flipped[i] - g[n - 1 - i]).abs() / g[n - 1 - i].abs().max(1.0))
        .fold(0.0, f64::max);
    let resonant = cross(42.0, 0.0, &taus);
    let sym = (0..n)
        .map(|i| (resonant[i] - resonant[n - 1 - i]).abs() / resonant[i].abs().max(1.0))
        .fold(0.0, f64::max);
    let c = mirror <= C8_SYMMETRY;
    let d = sym <= C8_SYMMETRY;
    outcome(
        a && b && c && d,
        format!(
            "max g {gmax:.2}; tau_rise {:.2} ns, tau_fall {:.2} ns, ratio {ratio:.2}; mirror dev {mirror:.1e}; resonant asymmetry {sym:.1e}",
            fit.tau_rise * 1e9,
            fit.tau_fall * 1e9
        ),
    )
}

fn timetag_bytes(seed: u64) -> Vec<u8> {
    let cfg = SimConfig::new(AtomParams::from_mhz(6.07, 60.7, 0.0).unwrap(), 2_000, seed);
    let records = hbt_split(&simulate_stream(&cfg).unwrap(), seed);
    let mut buf = Vec::new();
    let header = TimetagHeader { pulse_length: cfg.pulse_length, seed, n_trials: Some(cfg.n_trials) };
    write_timetag(&mut buf, &header, &records).unwrap();
    buf
}

fn criterion_9(suite_start: Instant) -> Outcome {
    let a = timetag_bytes(11);
    let b = timetag_bytes(11);
    let c = timetag_bytes(12);
    let identical = a == b;
    let distinct = a != c;
    let total = suite_start.elapsed();
    outcome(
        identical && distinct && total < SUITE_RUNTIME,
        format!(
            "same seed identical: {identical}, other seed differs: {distinct}, {} bytes, suite {:.1} s",
            a.len(),
            total.as_secs_f64()
        ),
    )
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut failed = Vec::new();
    let mut record = |n: usize, (o, el): (Outcome, Duration)| {
        report(n, &o, el);
        if !o.pass {
            failed.push(n);
        }
    };
    record(1, timed(Some(C1_RUNTIME), criterion_1));
    record(2, timed(Some(C2_RUNTIME), criterion_2));
    record(3, timed(Some(C3_RUNTIME), criterion_3));
    record(4, timed(None, criterion_4));
    let t0 = Instant::now();
    let data = c5_dataset();
    let sim_time = t0.elapsed();
    let (o5, el5) = timed(None, || criterion_5(&data));
    let mut o5 = o5;
    if sim_time + el5 > C5_RUNTIME {
        o5.pass = false;
        o5.detail += "; runtime over 120 s";
    }
    record(5, (o5, sim_time + el5));
    record(6, timed(None, || criterion_6(&data)));
    record(7, timed(None, criterion_7));
    record(8, timed(Some(C8_RUNTIME), criterion_8));
    record(9, timed(None, || criterion_9(start)));
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
