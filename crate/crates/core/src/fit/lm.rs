use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Data points with optional one-sigma uncertainties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_err: Option<Vec<f64>>,
}

impl DataSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>, y_err: Option<Vec<f64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid("x and y lengths differ"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("data must be finite"));
        }
        if let Some(e) = &y_err {
            if e.len() != y.len() {
                return Err(Error::invalid("y_err length differs from y"));
            }
            if e.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(Error::invalid("uncertainties must be positive and finite"));
            }
        }
        Ok(DataSeries { x, y, y_err })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn weight_sqrt(&self, i: usize) -> f64 {
        self.y_err.as_ref().map_or(1.0, |e| 1.0 / e[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub reduced_chi2: f64,
    pub dof: usize,
    /// Row-major parameter covariance.
    pub covariance: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub flags: Vec<String>,
}

impl FitResult {
    /// `(value, sigma)` of a named parameter.
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        let i = self.names.iter().position(|n| n == name)?;
        Some((self.values[i], self.sigmas[i]))
    }

    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.covariance[i][j] / (self.sigmas[i] * self.sigmas[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the largest relative parameter step.
    pub xtol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iterations: 200, xtol: 1e-8 }
    }
}

/// Weighted nonlinear least squares with default options.
pub fn least_squares<F>(
    model: F,
    names: &[&str],
    data: &DataSeries,
    initial: &[f64],
    bounds: &[(f64, f64)],
) -> Result<FitResult>
where
    F: Fn(f64, &[f64]) -> f64,
{
    least_squares_with(model, names, data, initial, bounds, FitOptions::default())
}

struct Problem<'a, F> {
    model: F,
    data: &'a DataSeries,
    bounds: &'a [(f64, f64)],
    /// Parameter scales for finite differences.
    scale: Vec<f64>,
}

impl<F: Fn(f64, &[f64]) -> f64> Problem<'_, F> {
    fn residuals(&self, p: &[f64]) -> Option<DVector<f64>> {
        let d = self.data;
        let r = DVector::from_iterator(
            d.len(),
            (0..d.len()).map(|i| (d.y[i] - (self.model)(d.x[i], p)) * d.weight_sqrt(i)),
        );
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    /// Jacobian of the weighted model, central differences where bounds allow.
    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.data;
        let mut jac = DMatrix::zeros(d.len(), p.len());
        let mut q = p.to_vec();
        for j in 0..p.len() {
            let h = 1e-6 * p[j].abs().max(self.scale[j]);
            let (lo, hi) = self.bounds[j];
            let up = (p[j] + h).min(hi);
            let dn = (p[j] - h).max(lo);
            if !(up > dn) {
                return Err(Error::FitDegenerate(format!("parameter {j} is pinned by its bounds")));
            }
            for i in 0..d.len() {
                q[j] = up;
                let fu = (self.model)(d.x[i], &q);
                q[j] = dn;
                let fd = (self.model)(d.x[i], &q);
                jac[(i, j)] = (fu - fd) / (up - dn) * d.weight_sqrt(i);
            }
            q[j] = p[j];
        }
        if jac.iter().any(|v| !v.is_finite()) {
            return Err(Error::FitDegenerate("model derivative is not finite".into()));
        }
        Ok(jac)
    }

    fn project(&self, p: &mut [f64]) {
        for (v, &(lo, hi)) in p.iter_mut().zip(self.bounds) {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Levenberg–Marquardt with Marquardt diagonal scaling and box bounds
/// enforced by projection.
///
/// The covariance is the inverse curvature `(JᵀWJ)⁻¹` scaled by the reduced
/// χ². Without `y_err` all points get unit weight. Running out of iterations
/// is reported through `converged = false` and a flag, not an error.
pub fn least_squares_with<F>(
    model: F,
    names: &[&str],
    data: &DataSeries,
    initial: &[f64],
    bounds: &[(f64, f64)],
    opts: FitOptions,
) -> Result<FitResult>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let np = initial.len();
    if names.len() != np || bounds.len() != np {
        return Err(Error::invalid("names, initial values and bounds must have equal length"));
    }
    if data.len() <= np {
        return Err(Error::FitDegenerate(format!(
            "{} points cannot constrain {np} parameters",
            data.len()
        )));
    }
    for (k, (&v, &(lo, hi))) in initial.iter().zip(bounds).enumerate() {
        if !(lo < hi) || !(v >= lo && v <= hi) || !v.is_finite() {
            return Err(Error::invalid(format!("initial value of {} outside its bounds", names[k])));
        }
    }
    let scale = initial
        .iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| {
            let width = if (hi - lo).is_finite() { 1e-3 * (hi - lo) } else { 0.0 };
            v.abs().max(width).max(1e-300)
        })
        .collect();
    let prob = Problem { model, data, bounds, scale };

    let mut p = initial.to_vec();
    let mut r = prob
        .residuals(&p)
        .ok_or_else(|| Error::FitDegenerate("model is not finite at the initial point".into()))?;
    let mut chi2 = r.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut flags = Vec::new();

    while iterations < opts.max_iterations && !converged {
        iterations += 1;
        let jac = prob.jacobian(&p)?;
        let a = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let diag: Vec<f64> = (0..np).map(|j| a[(j, j)]).collect();
        if diag.iter().any(|&d| d <= 0.0) {
            return Err(Error::SingularCurvature);
        }
        loop {
            let mut m = a.clone();
            for j in 0..np {
                m[(j, j)] += lambda * diag[j];
            }
            let step = m.cholesky().map(|ch| ch.solve(&g));
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > 1e20 {
                    return Err(Error::SingularCurvature);
                }
                continue;
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            prob.project(&mut trial);
            let rel = trial
                .iter()
                .zip(&p)
                .enumerate()
                .map(|(j, (t, q))| (t - q).abs() / q.abs().max(prob.scale[j]))
                .fold(0.0, f64::max);
            let new = prob.residuals(&trial).map(|rn| (rn.norm_squared(), rn));
            match new {
                Some((c2, rn)) if c2 <= chi2 => {
                    p = trial;
                    r = rn;
                    chi2 = c2;
                    lambda = (lambda * 0.1).max(1e-12);
                    converged = rel < opts.xtol || chi2 == 0.0;
                    break;
                }
                _ => {
                    if rel < opts.xtol {
                        // no downhill step left at the resolution we care about
                        converged = true;
                        break;
                    }
                    lambda *= 10.0;
                    if lambda > 1e16 {
                        flags.push("stalled".to_string());
                        break;
                    }
                }
            }
        }
        if flags.iter().any(|f| f == "stalled") {
            break;
        }
    }
    if !converged && iterations >= opts.max_iterations {
        flags.push("max_iterations".to_string());
    }

    let dof = data.len() - np;
    let reduced_chi2 = chi2 / dof as f64;
    let jac = prob.jacobian(&p)?;
    let a = jac.transpose() * &jac;
    let cov = invert_curvature(&a)? * reduced_chi2;
    let sigmas = (0..np).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    Ok(FitResult {
        names: names.iter().map(|s| s.to_string()).collect(),
        values: p,
        sigmas,
        reduced_chi2,
        dof,
        covariance: (0..np).map(|i| (0..np).map(|j| cov[(i, j)]).collect()).collect(),
        converged,
        iterations,
        flags,
    })
}

/// Inverse of the curvature matrix, refusing near-singular cases.
fn invert_curvature(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let d: Vec<f64> = (0..n).map(|j| a[(j, j)]).collect();
    if d.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::SingularCurvature);
    }
    let s = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / (d[i] * d[j]).sqrt());
    let eig = SymmetricEigen::new(s.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(min > 1e-13 * max) {
        return Err(Error::SingularCurvature);
    }
    let inv = s.try_inverse().ok_or(Error::SingularCurvature)?;
    Ok(DMatrix::from_fn(n, n, |i, j| inv[(i, j)] / (d[i] * d[j]).sqrt()))
}
