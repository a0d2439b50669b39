use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{PhotonRecord, SimConfig};
use crate::dynamics::AtomParams;
use crate::error::Result;

/// No-jump evolution of the atom from the ground state under
/// `H_eff = H − (iΓ/2)|e⟩⟨e|`, in closed form.
///
/// Every jump resets the atom to the ground state, so waiting times between
/// emissions are independent draws from `w(t) = Γ|c_e(t)|² = −dS/dt`, with
/// `S(t)` the norm of the unnormalized no-jump state.
#[derive(Debug, Clone)]
pub struct NoJumpEvolution {
    gamma: f64,
    omega: f64,
    /// `a = −Δ − iΓ/2`, trace of `H_eff`.
    a: Complex64,
    /// `s = √(a² + Ω²)`, eigenvalue splitting of `H_eff`.
    s: Complex64,
    step: f64,
    survival: Vec<f64>,
}

impl NoJumpEvolution {
    /// Tabulate the survival probability up to `horizon` seconds.
    pub fn new(params: &AtomParams, horizon: f64) -> Self {
        let a = Complex64::new(-params.delta, -0.5 * params.gamma);
        let s = (a * a + params.omega * params.omega).sqrt();
        let rate = params.gamma + params.omega.hypot(params.delta);
        let step = (0.02 / rate).min(horizon / 64.0).max(horizon / 5e6);
        let n = (horizon / step).ceil() as usize;
        let mut nj = NoJumpEvolution {
            gamma: params.gamma,
            omega: params.omega,
            a,
            s,
            step,
            survival: Vec::with_capacity(n + 1),
        };
        for k in 0..=n {
            let p = nj.survival(k as f64 * step);
            nj.survival.push(p);
        }
        nj
    }

    /// `(c_g, c_e)` amplitudes at time `t`.
    pub fn amplitudes(&self, t: f64) -> (Complex64, Complex64) {
        let z = self.s * (0.5 * t);
        // sin(z)/s, with the removable singularity at s = 0 handled by series
        let sinc = if z.norm() < 1e-4 {
            let z2 = z * z;
            (1.0 - z2 / 6.0 + z2 * z2 / 120.0) * (0.5 * t)
        } else {
            z.sin() / self.s
        };
        let phase = (Complex64::new(0.0, -0.5 * t) * self.a).exp();
        let cg = phase * (z.cos() + Complex64::i() * self.a * sinc);
        let ce = phase * (-Complex64::i() * self.omega * sinc);
        (cg, ce)
    }

    /// Probability of no emission during `[0, t]`.
    pub fn survival(&self, t: f64) -> f64 {
        let (cg, ce) = self.amplitudes(t);
        cg.norm_sqr() + ce.norm_sqr()
    }

    /// Waiting-time density `Γ|c_e(t)|²`.
    pub fn waiting_density(&self, t: f64) -> f64 {
        self.gamma * self.amplitudes(t).1.norm_sqr()
    }

    pub fn horizon(&self) -> f64 {
        (self.survival.len() - 1) as f64 * self.step
    }

    /// Time at which the survival probability first drops to `threshold`,
    /// or `None` if that does not happen within `limit`.
    pub fn first_passage(&self, threshold: f64, limit: f64) -> Option<f64> {
        let limit = limit.min(self.horizon());
        let k_max = ((limit / self.step).ceil() as usize).min(self.survival.len() - 1);
        // survival is non-increasing: first index with S ≤ threshold
        let k = self.survival[..=k_max].partition_point(|&p| p > threshold);
        if k > k_max {
            // S(k_max·step) > threshold and k_max·step ≥ limit
            return None;
        }
        if k == 0 {
            return Some(0.0);
        }
        let t = self.refine(threshold, (k - 1) as f64 * self.step, k as f64 * self.step);
        (t <= limit).then_some(t)
    }

    /// Safeguarded Newton on `S(t) = threshold` inside a bracketing interval.
    fn refine(&self, threshold: f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut t = 0.5 * (lo + hi);
        for _ in 0..60 {
            let f = self.survival(t) - threshold;
            if f > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let slope = -self.waiting_density(t);
            let mut next = if slope < 0.0 { t - f / slope } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-15 * t.max(1e-12) || hi - lo <= 1e-15 * hi {
                return next;
            }
            t = next;
        }
        t
    }
}

/// Per-trial generator: ChaCha8 keyed by the run seed, one stream per trial,
/// so results do not depend on how trials are partitioned across threads.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn simulate_trial(nj: &NoJumpEvolution, cfg: &SimConfig, trial: u64, out: &mut Vec<PhotonRecord>) {
    let mut rng = trial_rng(cfg.rng_seed, trial);
    let mut t = 0.0;
    loop {
        let threshold = 1.0 - rng.random::<f64>();
        let remaining = cfg.pulse_length - t;
        let Some(wait) = nj.first_passage(threshold, remaining) else {
            break;
        };
        t += wait;
        if t > cfg.pulse_length {
            break;
        }
        if rng.random::<f64>() < cfg.detection_efficiency {
            out.push(PhotonRecord { trial_id: trial, t, channel: 0 });
        }
    }
}

/// Detected photon stream of `cfg.n_trials` independent pulses, sorted by
/// `(trial_id, t)`, all on channel 0. Deterministic in `cfg.rng_seed`.
pub fn simulate_stream(cfg: &SimConfig) -> Result<Vec<PhotonRecord>> {
    cfg.validate()?;
    if cfg.params.omega == 0.0 {
        return Ok(Vec::new());
    }
    let nj = NoJumpEvolution::new(&cfg.params, cfg.pulse_length);
    const CHUNK: u64 = 256;
    let n_chunks = cfg.n_trials.div_ceil(CHUNK);
    let parts: Vec<Vec<PhotonRecord>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let end = ((c + 1) * CHUNK).min(cfg.n_trials);
            for trial in c * CHUNK..end {
                simulate_trial(&nj, cfg, trial, &mut out);
            }
            out
        })
        .collect();
    Ok(parts.concat())
}
