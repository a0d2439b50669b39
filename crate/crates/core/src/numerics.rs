//! Small numerical helpers shared across modules.

/// Trapezoid rule on a (possibly non-uniform) grid.
pub fn trapz(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Per-point trapezoid weights, so that `Σ w_i y_i == trapz(x, y)`.
pub fn trapz_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// Integrate `f` over the whole real line.
///
/// Uses the substitution `x = center + scale·tan θ` followed by composite
/// Simpson on `θ ∈ (−π/2, π/2)` with `n` panels (rounded up to even). A
/// Lorentzian of half width `scale` becomes constant in `θ`; any integrand
/// decaying at least as fast as `1/x²` gives a smooth, bounded θ-integrand.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, scale: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let h = 2.0 * half_pi / n as f64;
    let g = |theta: f64| {
        // the endpoint value is the limit of f·sec², which is finite (and
        // nonzero for 1/x² tails); evaluate just inside the interval.
        let theta = theta.clamp(-half_pi + 1e-7, half_pi - 1e-7);
        let c = theta.cos();
        let x = center + scale * theta.tan();
        f(x) * scale / (c * c)
    };
    let mut sum = g(-half_pi) + g(half_pi);
    for i in 1..n {
        let theta = -half_pi + i as f64 * h;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * g(theta);
    }
    sum * h / 3.0
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n).map(|i| start + step * i as f64).collect()
        }
    }
}

pub(crate) fn is_strictly_increasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] > w[0])
}

pub(crate) fn max_spacing(x: &[f64]) -> f64 {
    x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}
