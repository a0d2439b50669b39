use super::ode::Dopri5;
use super::{AtomParams, BlochState};
use crate::error::{Error, Result};

/// Right-hand side of the optical Bloch equations for `(ρ_ee, u, v)`,
/// `ρ_eg = u + iv`.
fn bloch_rhs(p: &AtomParams) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] {
    let AtomParams { gamma, omega, delta } = *p;
    move |_t, y| {
        let [pe, u, v] = *y;
        [
            -gamma * pe - omega * v,
            -0.5 * gamma * u - delta * v,
            delta * u - 0.5 * gamma * v + omega * pe - 0.5 * omega,
        ]
    }
}

fn integrator() -> Dopri5 {
    Dopri5::default()
}

fn initial_step(p: &AtomParams) -> f64 {
    0.05 / (p.gamma + p.omega.hypot(p.delta))
}

/// Propagate `initial` for a duration `t ≥ 0`.
pub fn evolve(params: &AtomParams, initial: &BlochState, t: f64) -> Result<BlochState> {
    params.validate()?;
    initial.validate()?;
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("evolution time must be >= 0, got {t}")));
    }
    let mut h = initial_step(params);
    let y = integrator().integrate(bloch_rhs(params), 0.0, initial.to_array(), t, &mut h)?;
    Ok(BlochState::from_array(y))
}

/// States at each time of a non-decreasing, non-negative grid. The
/// adaptive stepper lands exactly on every grid point.
pub fn evolve_on_grid(
    params: &AtomParams,
    initial: &BlochState,
    times: &[f64],
) -> Result<Vec<BlochState>> {
    params.validate()?;
    initial.validate()?;
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid must be non-negative and sorted"));
    }
    let rhs = bloch_rhs(params);
    let ode = integrator();
    let mut h = initial_step(params);
    let mut y = initial.to_array();
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        y = ode.integrate(&rhs, t_prev, y, t, &mut h)?;
        t_prev = t;
        out.push(BlochState::from_array(y));
    }
    Ok(out)
}
