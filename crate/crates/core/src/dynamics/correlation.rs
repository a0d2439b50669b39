use super::{evolve_on_grid, steady_state, AtomParams, BlochState};
use crate::error::{Error, Result};

/// Resonant strong-drive intensity correlation
/// `1 − e^{−3Γ|τ|/4}(cos Ωτ + (3Γ/4Ω) sin Ω|τ|)`, without validation.
#[inline]
pub fn g2_resonant(gamma: f64, omega: f64, tau: f64) -> f64 {
    let a = 0.75 * gamma;
    let t = tau.abs();
    1.0 - (-a * t).exp() * ((omega * t).cos() + a / omega * (omega * t).sin())
}

/// Closed-form g²(τ) of resonance fluorescence (resonant, strong drive).
///
/// Evaluated with `params.omega`; pass `Ω′` as `omega` to use the formula
/// for detuned drive the way an autocorrelation fit would.
pub fn g2_analytic(params: &AtomParams, tau: f64) -> Result<f64> {
    params.validate()?;
    if params.omega == 0.0 {
        return Err(Error::UndefinedModel("g2 of an undriven atom (omega = 0)".into()));
    }
    if params.omega < 0.25 * params.gamma {
        log::warn!("g2_analytic used below its strong-drive range (omega < gamma/4)");
    }
    Ok(g2_resonant(params.gamma, params.omega, tau))
}

/// g²(τ) = ρ_ee(τ | ground) / ρ_ee(steady state), valid at any detuning.
/// Negative delays are mapped to `|τ|`.
pub fn g2_numeric(params: &AtomParams, tau_grid: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    let p_ss = steady_state(params).p_ee;
    if p_ss <= 0.0 {
        return Err(Error::UndefinedModel("zero steady-state population".into()));
    }
    if tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("tau grid must be finite"));
    }
    let mut order: Vec<usize> = (0..tau_grid.len()).collect();
    order.sort_by(|&a, &b| tau_grid[a].abs().total_cmp(&tau_grid[b].abs()));
    let times: Vec<f64> = order.iter().map(|&i| tau_grid[i].abs()).collect();
    let states = evolve_on_grid(params, &BlochState::GROUND, &times)?;
    let mut out = vec![0.0; tau_grid.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = states[k].p_ee / p_ss;
    }
    Ok(out)
}
