//! Resonance-fluorescence spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{steady_state, AtomParams};
use crate::error::{Error, Result};
use crate::lindblad::{c, trace, trace_product, vectorize, CMatrix, I};
use crate::numerics::{is_strictly_increasing, max_spacing, trapz};

/// Spectral density on a frequency grid (offsets from the drive, rad/s),
/// plus the power of a delta-like elastic line at zero offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub freq: Vec<f64>,
    pub density: Vec<f64>,
    pub elastic_weight: f64,
}

impl Spectrum {
    pub fn new(freq: Vec<f64>, density: Vec<f64>, elastic_weight: f64) -> Result<Self> {
        if freq.len() != density.len() {
            return Err(Error::invalid("freq and density lengths differ"));
        }
        if !is_strictly_increasing(&freq) {
            return Err(Error::invalid("frequency grid must be strictly increasing"));
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::invalid("density must be finite and non-negative"));
        }
        if !(elastic_weight >= 0.0 && elastic_weight.is_finite()) {
            return Err(Error::invalid("elastic weight must be finite and non-negative"));
        }
        Ok(Spectrum { freq, density, elastic_weight })
    }

    /// Trapezoid integral of the density over the grid.
    pub fn inelastic_power(&self) -> f64 {
        trapz(&self.freq, &self.density)
    }

    pub fn total_power(&self) -> f64 {
        self.inelastic_power() + self.elastic_weight
    }

    pub fn max_spacing(&self) -> f64 {
        max_spacing(&self.freq)
    }
}

/// Area-normalized Lorentzian line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    pub center: f64,
    pub fwhm: f64,
    pub area: f64,
}

impl Lorentzian {
    #[inline]
    pub fn eval(&self, w: f64) -> f64 {
        let hw = 0.5 * self.fwhm;
        self.area * hw / (PI * ((w - self.center).powi(2) + hw * hw))
    }

    pub fn peak_height(&self) -> f64 {
        self.eval(self.center)
    }

    /// Convolution with another Lorentzian: centers and widths add.
    pub fn convolve(&self, other: &Lorentzian) -> Lorentzian {
        Lorentzian {
            center: self.center + other.center,
            fwhm: self.fwhm + other.fwhm,
            area: self.area * other.area,
        }
    }
}

/// The three lines of the strong-drive triplet: center (FWHM Γ, area 1/2)
/// and sidebands at ∓Ω (FWHM 3Γ/2, area 1/4 each), in order of frequency.
pub fn mollow_lines(gamma: f64, omega: f64) -> [Lorentzian; 3] {
    let side = |center| Lorentzian { center, fwhm: 1.5 * gamma, area: 0.25 };
    [side(-omega), Lorentzian { center: 0.0, fwhm: gamma, area: 0.5 }, side(omega)]
}

/// Closed-form strong-drive Mollow spectrum on `freq_grid`, unit total area,
/// no elastic part.
pub fn mollow_spectrum_analytic(params: &AtomParams, freq_grid: &[f64]) -> Result<Spectrum> {
    params.validate()?;
    if params.delta != 0.0 {
        return Err(Error::invalid("the closed-form triplet is for resonant drive (delta = 0)"));
    }
    if params.omega <= 0.25 * params.gamma {
        log::warn!("closed-form triplet used outside its strong-drive range (omega <= gamma/4)");
    }
    let lines = mollow_lines(params.gamma, params.omega);
    let density = freq_grid.iter().map(|&w| lines.iter().map(|l| l.eval(w)).sum()).collect();
    Spectrum::new(freq_grid.to_vec(), density, 0.0)
}

/// Regression-theorem pieces for the first-order dipole correlation.
struct DipoleRegression {
    liouvillian: crate::lindblad::Liouvillian,
    rho_ss: CMatrix,
    lowering: CMatrix,
    /// `ρ_ss σ⁺ − Tr(ρ_ss σ⁺) ρ_ss`, the decaying part of the regression seed.
    seed: crate::lindblad::CVector,
    coherent: Complex64,
}

impl DipoleRegression {
    fn new(params: &AtomParams) -> Self {
        let liouvillian = params.liouvillian();
        let rho_ss = steady_state(params).density_matrix();
        let lowering = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let raising = lowering.adjoint();
        let x0 = vectorize(&(&rho_ss * &raising));
        let tr = trace(&x0, 2);
        let seed = x0 - vectorize(&rho_ss) * tr;
        let coherent = trace_product(&lowering, &vectorize(&rho_ss));
        DipoleRegression { liouvillian, rho_ss, lowering, seed, coherent }
    }
}

/// Fluctuating part of `⟨σ⁺(0)σ⁻(τ)⟩_ss − |⟨σ⁻⟩|²` for `τ ≥ 0`, by
/// propagating the regression seed with the master equation.
pub fn dipole_correlation(params: &AtomParams, tau_grid: &[f64]) -> Result<Vec<Complex64>> {
    params.validate()?;
    let reg = DipoleRegression::new(params);
    let states = reg.liouvillian.propagate_series(&reg.seed, tau_grid)?;
    Ok(states.iter().map(|x| trace_product(&reg.lowering, x)).collect())
}

/// Spectrum of resonance fluorescence at arbitrary drive and detuning.
///
/// The density is `(Γ/π) Re ∫₀^∞ [⟨σ⁺(0)σ⁻(τ)⟩ − |⟨σ⁻⟩|²] e^{iωτ} dτ`, in
/// emitted photons per second per rad/s; the elastic weight is `Γ|⟨σ⁻⟩|²`.
/// The total is therefore the scattering rate `Γρ_ee`. The Laplace
/// transform is taken exactly through the resolvent of the Bloch generator.
pub fn spectrum_numeric(params: &AtomParams, freq_grid: &[f64]) -> Result<Spectrum> {
    params.validate()?;
    if !is_strictly_increasing(freq_grid) {
        return Err(Error::invalid("frequency grid must be strictly increasing"));
    }
    let spacing = max_spacing(freq_grid);
    if spacing > 0.5 * params.gamma {
        log::warn!(
            "frequency grid spacing {spacing:e} rad/s does not resolve gamma/2 = {:e}",
            0.5 * params.gamma
        );
    }
    let reg = DipoleRegression::new(params);
    let scale = params.gamma / PI;
    let density = freq_grid
        .iter()
        .map(|&w| {
            // ∫₀^∞ e^{(L + iω)τ} Y dτ = −(L + iω)⁻¹ Y on the traceless seed
            let y = reg.liouvillian.resolvent_solve(&reg.rho_ss, I * w, &reg.seed)?;
            let val = -trace_product(&reg.lowering, &y).re * scale;
            Ok(val.max(0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let elastic = params.gamma * reg.coherent.norm_sqr();
    Spectrum::new(freq_grid.to_vec(), density, elastic)
}
