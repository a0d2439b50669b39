//! Driven two-level atom: Bloch dynamics, steady state, spectra and g².
//!
//! Conventions: rotating frame at the drive frequency, rotating-wave
//! approximation, `H = −Δ|e⟩⟨e| + (Ω/2)(σ⁺ + σ⁻)`, population decay `Γ` and
//! coherence decay `Γ/2`. `Δ = ω_drive − ω_atom`, so red detuning is negative.

mod bloch;
mod correlation;
mod ode;
mod spectrum;

pub use bloch::{evolve, evolve_on_grid};
pub use correlation::{g2_analytic, g2_numeric, g2_resonant};
pub use ode::Dopri5;
pub use spectrum::{
    dipole_correlation, mollow_lines, mollow_spectrum_analytic, spectrum_numeric, Lorentzian,
    Spectrum,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{c, CMatrix, Liouvillian};
use crate::units;

/// The driven two-level system, all rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Natural linewidth Γ.
    pub gamma: f64,
    /// Rabi frequency Ω.
    pub omega: f64,
    /// Drive detuning Δ from atomic resonance (negative = red).
    pub delta: f64,
}

impl AtomParams {
    pub fn new(gamma: f64, omega: f64, delta: f64) -> Result<Self> {
        let p = AtomParams { gamma, omega, delta };
        p.validate()?;
        Ok(p)
    }

    /// ⁸⁷Rb D2 linewidth with the given drive.
    pub fn rb87(omega: f64, delta: f64) -> Result<Self> {
        Self::new(units::rb87_gamma(), omega, delta)
    }

    pub fn from_mhz(gamma_mhz: f64, omega_mhz: f64, delta_mhz: f64) -> Result<Self> {
        Self::new(
            units::mhz_to_angular(gamma_mhz),
            units::mhz_to_angular(omega_mhz),
            units::mhz_to_angular(delta_mhz),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.omega.is_finite() && self.delta.is_finite()) {
            return Err(Error::invalid("atom parameters must be finite"));
        }
        if self.gamma <= 0.0 {
            return Err(Error::invalid(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.omega < 0.0 {
            return Err(Error::invalid(format!("omega must be >= 0, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn generalized_rabi(&self) -> f64 {
        generalized_rabi(self)
    }

    /// Atomic Hamiltonian in the (g, e) basis.
    pub(crate) fn hamiltonian(&self) -> CMatrix {
        let half = c(0.5 * self.omega);
        CMatrix::from_row_slice(2, 2, &[c(0.0), half, half, c(-self.delta)])
    }

    /// Lowering operator `√Γ σ⁻` in the (g, e) basis.
    pub(crate) fn decay_operator(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(self.gamma.sqrt()), c(0.0), c(0.0)])
    }

    pub(crate) fn liouvillian(&self) -> Liouvillian {
        Liouvillian::new(&self.hamiltonian(), &[self.decay_operator()])
    }
}

/// Atomic density matrix as (ρ_ee, Re ρ_eg, Im ρ_eg). `ρ_eg = ⟨σ⁻⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub p_ee: f64,
    pub coh_re: f64,
    pub coh_im: f64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState { p_ee: 0.0, coh_re: 0.0, coh_im: 0.0 };
    pub const EXCITED: BlochState = BlochState { p_ee: 1.0, coh_re: 0.0, coh_im: 0.0 };

    pub fn coherence(&self) -> Complex64 {
        Complex64::new(self.coh_re, self.coh_im)
    }

    /// `p(1−p) − |ρ_eg|²`, non-negative exactly when the state is physical.
    pub fn positivity_margin(&self) -> f64 {
        self.p_ee * (1.0 - self.p_ee) - self.coherence().norm_sqr()
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.p_ee >= -tol && self.p_ee <= 1.0 + tol && self.positivity_margin() >= -tol
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.p_ee.is_finite() && self.coh_re.is_finite() && self.coh_im.is_finite();
        if !finite || !self.is_physical(1e-12) {
            return Err(Error::invalid(format!("not a valid two-level state: {self:?}")));
        }
        Ok(())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.p_ee, self.coh_re, self.coh_im]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochState { p_ee: a[0], coh_re: a[1], coh_im: a[2] }
    }

    /// 2×2 density matrix in the (g, e) basis.
    pub fn density_matrix(&self) -> CMatrix {
        let eg = self.coherence();
        CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0 - self.p_ee), eg.conj(), eg, c(self.p_ee)],
        )
    }
}

/// Closed-form stationary solution of the Bloch equations.
pub fn steady_state(params: &AtomParams) -> BlochState {
    let AtomParams { gamma, omega, delta } = *params;
    let denom = delta * delta + 0.25 * gamma * gamma + 0.5 * omega * omega;
    BlochState {
        p_ee: 0.25 * omega * omega / denom,
        coh_re: 0.5 * omega * delta / denom,
        coh_im: -0.25 * omega * gamma / denom,
    }
}

/// `Ω′ = √(Ω² + Δ²)`.
pub fn generalized_rabi(params: &AtomParams) -> f64 {
    params.omega.hypot(params.delta)
}

/// Saturation curve of the detected scattering rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationModel {
    /// Saturation power, W.
    pub p_sat: f64,
    /// Total detection efficiency.
    pub eta: f64,
}

impl SaturationModel {
    pub fn new(p_sat: f64, eta: f64) -> Result<Self> {
        if !(p_sat > 0.0 && p_sat.is_finite()) {
            return Err(Error::invalid("p_sat must be positive"));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid("eta must lie in (0, 1]"));
        }
        Ok(SaturationModel { p_sat, eta })
    }

    /// Reference values of the single-atom experiment.
    pub fn reference() -> Self {
        SaturationModel { p_sat: units::SATURATION_POWER_W, eta: units::DETECTION_EFFICIENCY }
    }
}

/// Detected count rate `(ηΓ/2)·P/(P + P_sat)`.
pub fn saturation_rate(model: &SaturationModel, gamma: f64, p_probe: f64) -> f64 {
    if p_probe.is_infinite() {
        return 0.5 * model.eta * gamma;
    }
    0.5 * model.eta * gamma * p_probe / (p_probe + model.p_sat)
}
