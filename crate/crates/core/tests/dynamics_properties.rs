use proptest::prelude::*;

use mollow_core::dynamics::{
    evolve, evolve_on_grid, g2_analytic, g2_numeric, spectrum_numeric, steady_state,
};
use mollow_core::numerics::linspace;
use mollow_core::{AtomParams, BlochState};

fn physical_state() -> impl Strategy<Value = BlochState> {
    // uniform in the Bloch ball
    (0.0..1.0f64, 0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(p, r, phi)| {
        let max = (p * (1.0 - p)).sqrt();
        BlochState { p_ee: p, coh_re: r * max * phi.cos(), coh_im: r * max * phi.sin() }
    })
}

fn atom() -> impl Strategy<Value = AtomParams> {
    (0.2..5.0f64, 0.0..30.0f64, -20.0..20.0f64)
        .prop_map(|(g, o, d)| AtomParams::new(g, o, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_keeps_the_state_physical(p in atom(), s in physical_state(), t in 0.0..20.0f64) {
        let times = linspace(0.0, t, 25);
        for st in evolve_on_grid(&p, &s, &times).unwrap() {
            prop_assert!(st.is_physical(1e-9), "{st:?}");
        }
    }

    #[test]
    fn long_evolution_reaches_the_steady_state(p in atom(), s in physical_state()) {
        // slowest relaxation rate is at least Γ/2
        let t = 60.0 / p.gamma;
        let end = evolve(&p, &s, t).unwrap();
        let ss = steady_state(&p);
        prop_assert!((end.p_ee - ss.p_ee).abs() < 1e-6);
        prop_assert!((end.coherence() - ss.coherence()).norm() < 1e-6);
    }

    #[test]
    fn steady_state_is_physical(p in atom()) {
        prop_assert!(steady_state(&p).is_physical(1e-14));
    }

    #[test]
    fn g2_numeric_vanishes_at_zero_delay(p in atom()) {
        prop_assume!(p.omega > 0.0);
        prop_assert_eq!(g2_numeric(&p, &[0.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn strong_drive_g2_matches_closed_form(g in 0.5..3.0f64, k in 5.0..15.0f64) {
        let p = AtomParams::new(g, k * g, 0.0).unwrap();
        let taus = linspace(0.0, 10.0 / g, 400);
        let num = g2_numeric(&p, &taus).unwrap();
        for (t, n) in taus.iter().zip(num) {
            prop_assert!((n - g2_analytic(&p, *t).unwrap()).abs() <= 0.02);
        }
    }

    #[test]
    fn resonant_spectrum_is_even(g in 0.5..3.0f64, k in 0.1..15.0f64) {
        let p = AtomParams::new(g, k * g, 0.0).unwrap();
        let w = linspace(0.1 * g, 3.0 * k * g + 5.0 * g, 60);
        let neg: Vec<f64> = w.iter().rev().map(|x| -x).collect();
        let a = spectrum_numeric(&p, &w).unwrap();
        let b = spectrum_numeric(&p, &neg).unwrap();
        for (x, y) in a.density.iter().zip(b.density.iter().rev()) {
            prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-12));
        }
    }

    #[test]
    fn detuning_sign_mirrors_the_spectrum(p in atom()) {
        prop_assume!(p.omega > 0.1);
        let flipped = AtomParams::new(p.gamma, p.omega, -p.delta).unwrap();
        let w = linspace(-40.0, 40.0, 41);
        let neg: Vec<f64> = w.iter().rev().map(|x| -x).collect();
        let a = spectrum_numeric(&p, &w).unwrap();
        let b = spectrum_numeric(&flipped, &neg).unwrap();
        for (x, y) in a.density.iter().zip(b.density.iter().rev()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-9));
        }
    }
}

#[test]
fn emission_rate_is_conserved_by_the_spectrum() {
    for &(o, d) in &[(0.3, 0.0), (2.0, 0.0), (10.0, 0.0), (5.0, -4.0)] {
        let p = AtomParams::new(1.0, o, d).unwrap();
        let grid = linspace(-3000.0, 3000.0, 300_001);
        let s = spectrum_numeric(&p, &grid).unwrap();
        let rate = p.gamma * steady_state(&p).p_ee;
        assert!((s.total_power() / rate - 1.0).abs() < 0.01, "omega {o}, delta {d}");
    }
}

#[test]
fn weak_drive_spectrum_is_mostly_elastic() {
    let p = AtomParams::new(1.0, 0.05, 0.0).unwrap();
    let s = spectrum_numeric(&p, &linspace(-200.0, 200.0, 40_001)).unwrap();
    assert!(s.elastic_weight / s.total_power() > 0.9);
}
