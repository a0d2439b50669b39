//! Frequency-filtered photon correlations with the two-sensor method.
//!
//! Each spectral filter is represented by a two-level "sensor" tuned to the
//! filter center, decaying at the filter linewidth and coupled to the atomic
//! lowering operator with a strength ε small enough that it does not perturb
//! the atom. Intensity correlations of the filtered light are then sensor
//! population correlations, computed exactly with the regression theorem on
//! the 8-dimensional atom ⊗ sensor ⊗ sensor master equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::AtomParams;
use crate::error::{Error, Result};
use crate::fit::{least_squares, DataSeries, FitResult};
use crate::lindblad::{c, kron_all, trace_product, vectorize, CMatrix, CVector, Liouvillian};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    /// Filter center offsets from the drive, rad/s. Order does not matter;
    /// the lower one is the "start" filter.
    pub filter_centers: [f64; 2],
    /// Filter FWHM = sensor decay rate, rad/s.
    pub filter_fwhm: f64,
    /// Atom–sensor coupling, rad/s.
    pub coupling_epsilon: f64,
}

impl SensorConfig {
    pub fn new(filter_centers: [f64; 2], filter_fwhm: f64, coupling_epsilon: f64) -> Result<Self> {
        let cfg = SensorConfig { filter_centers, filter_fwhm, coupling_epsilon };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Filters on both sidebands at `±Ω′` with the given width, coupling
    /// `filter_fwhm / 1000`.
    pub fn sidebands(params: &AtomParams, filter_fwhm: f64) -> Result<Self> {
        let w = params.generalized_rabi();
        Self::new([-w, w], filter_fwhm, 1e-3 * filter_fwhm)
    }

    /// 20 MHz filters on both sidebands.
    pub fn reference_sidebands(params: &AtomParams) -> Result<Self> {
        Self::sidebands(params, units::mhz_to_angular(units::SIDEBAND_FILTER_FWHM_MHZ))
    }

    /// ε = 0 is admitted for the decoupled limit; correlations are then
    /// undefined.
    pub fn validate(&self) -> Result<()> {
        if !(self.filter_fwhm > 0.0 && self.filter_fwhm.is_finite()) {
            return Err(Error::invalid("filter fwhm must be positive"));
        }
        if !self.filter_centers.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("filter centers must be finite"));
        }
        if !(self.coupling_epsilon >= 0.0 && self.coupling_epsilon <= 0.01 * self.filter_fwhm) {
            return Err(Error::invalid(format!(
                "coupling epsilon must lie in [0, fwhm/100], got {:e}",
                self.coupling_epsilon
            )));
        }
        Ok(())
    }

    fn ordered_centers(&self) -> (f64, f64) {
        let [a, b] = self.filter_centers;
        (a.min(b), a.max(b))
    }
}

/// Atom ⊗ low-frequency sensor ⊗ high-frequency sensor.
#[derive(Debug, Clone)]
pub struct CompositeSystem {
    pub params: AtomParams,
    pub sensors: SensorConfig,
    liouvillian: Liouvillian,
    rho_ss: CMatrix,
    lowering: [CMatrix; 3],
    populations: [CMatrix; 3],
}

fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])
}

/// Index of the subsystems in the tensor product.
const ATOM: usize = 0;
const LOW: usize = 1;
const HIGH: usize = 2;

pub fn build_composite(params: &AtomParams, cfg: &SensorConfig) -> Result<CompositeSystem> {
    params.validate()?;
    cfg.validate()?;
    let id = CMatrix::identity(2, 2);
    let sm = sigma_minus();
    let embed = |k: usize, op: &CMatrix| {
        let mut parts = [&id, &id, &id];
        parts[k] = op;
        kron_all(&parts)
    };
    let lowering = [embed(ATOM, &sm), embed(LOW, &sm), embed(HIGH, &sm)];
    let populations = lowering.clone().map(|a| a.adjoint() * a);

    let (w_low, w_high) = cfg.ordered_centers();
    let eps = c(cfg.coupling_epsilon);
    let mut h = embed(ATOM, &params.hamiltonian());
    h += &populations[LOW] * c(w_low);
    h += &populations[HIGH] * c(w_high);
    for k in [LOW, HIGH] {
        let hop = lowering[ATOM].adjoint() * &lowering[k];
        h += (&hop + hop.adjoint()) * eps;
    }
    let collapse = [
        &lowering[ATOM] * c(params.gamma.sqrt()),
        &lowering[LOW] * c(cfg.filter_fwhm.sqrt()),
        &lowering[HIGH] * c(cfg.filter_fwhm.sqrt()),
    ];
    let liouvillian = Liouvillian::new(&h, &collapse);
    let rho_ss = liouvillian.steady_state()?;
    Ok(CompositeSystem { params: *params, sensors: *cfg, liouvillian, rho_ss, lowering, populations })
}

impl CompositeSystem {
    pub fn liouvillian(&self) -> &Liouvillian {
        &self.liouvillian
    }

    pub fn steady_state(&self) -> &CMatrix {
        &self.rho_ss
    }

    fn expect(&self, op: &CMatrix) -> f64 {
        trace_product(op, &vectorize(&self.rho_ss)).re
    }

    /// Steady-state `(ρ_ee, ⟨n_low⟩, ⟨n_high⟩)`.
    pub fn mean_populations(&self) -> [f64; 3] {
        [
            self.expect(&self.populations[ATOM]),
            self.expect(&self.populations[LOW]),
            self.expect(&self.populations[HIGH]),
        ]
    }

    /// Atomic reduced state `(ρ_ee, ⟨σ⁻⟩)`.
    pub fn atom_state(&self) -> (f64, Complex64) {
        let coh = trace_product(&self.lowering[ATOM], &vectorize(&self.rho_ss));
        (self.expect(&self.populations[ATOM]), coh)
    }

    /// `⟨a†(0) n_b(τ) a(0)⟩ / (⟨n_a⟩⟨n_b⟩)` for `τ ≥ 0` on a sorted grid.
    fn ordered_correlation(&self, start: usize, stop: usize, taus: &[f64]) -> Result<Vec<f64>> {
        let [_, n_low, n_high] = self.mean_populations();
        let means = [0.0, n_low, n_high];
        if self.sensors.coupling_epsilon == 0.0 || !(means[start] > 1e-300 && means[stop] > 1e-300) {
            return Err(Error::UndefinedModel("sensor steady-state population is zero".into()));
        }
        let a = &self.lowering[start];
        let seed: CVector = vectorize(&(a * &self.rho_ss * a.adjoint())) / c(means[start]);
        let series = self.liouvillian.propagate_series(&seed, taus)?;
        Ok(series
            .iter()
            .map(|x| trace_product(&self.populations[stop], x).re / means[stop])
            .collect())
    }
}

/// Normalized filtered cross-correlation. `τ > 0`: a photon through the
/// higher-frequency filter detected `τ` after one through the lower filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelation {
    /// Signed delay, s.
    pub tau: Vec<f64>,
    pub g: Vec<f64>,
}

pub fn filtered_cross_correlation(system: &CompositeSystem, tau_grid: &[f64]) -> Result<CrossCorrelation> {
    if tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("tau grid must be finite"));
    }
    let mut g = vec![0.0; tau_grid.len()];
    for (sign_positive, start, stop) in [(true, LOW, HIGH), (false, HIGH, LOW)] {
        let mut idx: Vec<usize> = (0..tau_grid.len())
            .filter(|&i| (tau_grid[i] >= 0.0) == sign_positive)
            .collect();
        if idx.is_empty() {
            continue;
        }
        idx.sort_by(|&a, &b| tau_grid[a].abs().total_cmp(&tau_grid[b].abs()));
        let taus: Vec<f64> = idx.iter().map(|&i| tau_grid[i].abs()).collect();
        let vals = system.ordered_correlation(start, stop, &taus)?;
        for (k, &i) in idx.iter().enumerate() {
            g[i] = vals[k];
        }
    }
    Ok(CrossCorrelation { tau: tau_grid.to_vec(), g })
}

/// Two-sided exponential fit around the correlation maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoExponentialFit {
    /// Time constant on the `τ < τ_peak` side, s.
    pub tau_rise: f64,
    /// Time constant on the `τ ≥ τ_peak` side, s.
    pub tau_fall: f64,
    pub amplitude: f64,
    pub baseline: f64,
    /// Grid argmax, held fixed during the fit.
    pub tau_peak: f64,
    pub fit: FitResult,
}

/// `baseline + A·exp(−|τ − τ_peak| / τ_side)`.
pub fn two_exponential(tau: f64, tau_peak: f64, p: &[f64]) -> f64 {
    let [baseline, amp, rise, fall] = [p[0], p[1], p[2], p[3]];
    let d = tau - tau_peak;
    let tc = if d < 0.0 { rise } else { fall };
    baseline + amp * (-d.abs() / tc).exp()
}

pub fn fit_two_exponentials(corr: &CrossCorrelation) -> Result<TwoExponentialFit> {
    let n = corr.tau.len();
    if n < 6 || corr.g.len() != n {
        return Err(Error::FitDegenerate("need at least six correlation points".into()));
    }
    let (ipk, &gmax) = corr
        .g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let tau_peak = corr.tau[ipk];
    let edge = (n / 20).max(1);
    let baseline0 = 0.5
        * (corr.g[..edge].iter().sum::<f64>() / edge as f64
            + corr.g[n - edge..].iter().sum::<f64>() / edge as f64);
    let amp0 = gmax - baseline0;
    if !(amp0 > 1e-9 * baseline0.abs().max(1e-12)) || ipk == 0 || ipk == n - 1 {
        return Err(Error::FitDegenerate("no correlation peak above the baseline".into()));
    }
    // 1/e points on each side
    let target = baseline0 + amp0 / std::f64::consts::E;
    let span = corr.tau[n - 1] - corr.tau[0];
    let rise0 = (0..ipk)
        .rev()
        .find(|&i| corr.g[i] <= target)
        .map(|i| tau_peak - corr.tau[i])
        .unwrap_or(0.1 * span);
    let fall0 = (ipk + 1..n)
        .find(|&i| corr.g[i] <= target)
        .map(|i| corr.tau[i] - tau_peak)
        .unwrap_or(0.1 * span);
    let data = DataSeries::new(corr.tau.clone(), corr.g.clone(), None)?;
    let model = move |t: f64, p: &[f64]| two_exponential(t, tau_peak, p);
    let tiny = 1e-6 * span;
    let fit = least_squares(
        model,
        &["baseline", "amplitude", "tau_rise", "tau_fall"],
        &data,
        &[baseline0, amp0, rise0.max(2.0 * tiny), fall0.max(2.0 * tiny)],
        &[
            (f64::NEG_INFINITY, f64::INFINITY),
            (0.0, f64::INFINITY),
            (tiny, 10.0 * span),
            (tiny, 10.0 * span),
        ],
    )?;
    Ok(TwoExponentialFit {
        baseline: fit.values[0],
        amplitude: fit.values[1],
        tau_rise: fit.values[2],
        tau_fall: fit.values[3],
        tau_peak,
        fit,
    })
}
