//! Library values against independent quadratures, plus property checks of
//! the equation-of-state layer.

mod common;

use std::f64::consts::PI;

use bose2d::eos::{
    cherny_u, energy_mf_expansion, energy_mf_integrated, energy_mf_schick, fit_c3, universal_energy,
    universal_energy_correction, universal_mu, FitWindow, GasParameter, Theory, UniversalConstants,
};
use bose2d::reference::{table1, ReferenceRow};
use bose2d::specfun::{bessel_k0_scaled, gamma_upper_zero, gamma_upper_zero_scaled, AccuracyPolicy, EULER_GAMMA};
use common::{cherny_fixed_point, e1_scaled_oracle, k0_scaled_oracle, rel};
use proptest::prelude::*;

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

#[test]
fn oracles_reproduce_tabulated_values() {
    // E₁(1) and K₀(1) from standard tables
    assert!(rel(e1_scaled_oracle(1.0) * (-1f64).exp(), 0.219_383_934_395_520_3) < 1e-14);
    assert!(rel(k0_scaled_oracle(1.0) * (-1f64).exp(), 0.421_024_438_240_708_3) < 1e-14);
}

#[test]
fn e1_matches_quadrature() {
    let worst = log_grid(1.0, 500.0, 120)
        .map(|x| rel(gamma_upper_zero_scaled(x).unwrap(), e1_scaled_oracle(x)))
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "worst relative error {worst:e}");
}

#[test]
fn k0_matches_quadrature() {
    let worst = log_grid(0.01, 30.0, 120)
        .map(|x| rel(bessel_k0_scaled(x).unwrap(), k0_scaled_oracle(x)))
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "worst relative error {worst:e}");
}

#[test]
fn e1_positive_and_decreasing() {
    let values: Vec<f64> = log_grid(1e-3, 500.0, 200).map(|x| gamma_upper_zero(x).unwrap()).collect();
    assert!(values.iter().all(|&v| v > 0.0));
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn branches_agree_around_crossover() {
    let policy = AccuracyPolicy::default();
    let x0 = policy.series_asymptotic_crossover;
    for x in (0..=40).map(|i| x0 * (0.8 + 0.01 * i as f64)) {
        let (low, asym) = policy.branch_values(x).unwrap();
        assert!(rel(low, asym) < 10.0 * policy.rel_tol, "x = {x}: {low} vs {asym}");
    }
}

#[test]
fn cherny_against_fixed_point() {
    for l in [10.0, 43.7428, 100.0, 1000.0] {
        let u = cherny_u(GasParameter::from_l(l).unwrap()).unwrap();
        assert!((u - cherny_fixed_point(l)).abs() < 1e-13, "L = {l}");
    }
}

#[test]
fn large_l_ordering() {
    let k = UniversalConstants::default();
    for l in [50.0, 100.0, 500.0, 2000.0] {
        let g = GasParameter::from_l(l).unwrap();
        assert!(energy_mf_schick(g) > universal_energy(g, &k).unwrap());
    }
    let g = GasParameter::from_l(500.0).unwrap();
    let gap = 1.0 / universal_energy(g, &k).unwrap() - 500.0;
    assert!(rel(gap, 500f64.ln() + k.c1_e) < 0.01);
}

/// Synthetic table generated from ε = u + u²/2 − c₃u³ at c₃ = 1.5.
fn synthetic_rows(c3: f64) -> Vec<ReferenceRow> {
    (1..=12)
        .map(|k| {
            let n_r02 = 10f64.powi(-10 * k);
            let g = GasParameter::from_density_dipoles(n_r02).unwrap();
            let u = cherny_u(g).unwrap();
            let eps = u + 0.5 * u * u - c3 * u * u * u;
            let e_per_n = 2.0 * PI * n_r02 * eps;
            ReferenceRow { n_r02, e_per_n, err: 1e-4 * e_per_n }
        })
        .collect()
}

#[test]
fn c3_fit_recovers_synthetic_value() {
    let fit = fit_c3(&synthetic_rows(1.5), FitWindow::default()).unwrap();
    assert!((fit.c3 - 1.5).abs() < 1e-10, "{fit:?}");
    assert!(fit.chi2_per_dof < 1e-12);
}

#[test]
fn c3_stable_under_dropping_lowest_rows() {
    let rows = table1();
    let full = fit_c3(&rows, FitWindow::default()).unwrap();
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.n_r02.total_cmp(&b.n_r02));
    let trimmed = fit_c3(&sorted[3..], FitWindow::default()).unwrap();
    assert!((trimmed.c3 - full.c3).abs() < full.c3_err, "{full:?} vs {trimmed:?}");
}

proptest! {
    #[test]
    fn cherny_residual_and_monotone(l in 3.0f64..2300.0, dl in 1e-3f64..10.0) {
        let g = GasParameter::from_l(l).unwrap();
        let u = cherny_u(g).unwrap();
        let rhs = l - PI.ln() - 2.0 * EULER_GAMMA;
        prop_assert!((1.0 / u + u.ln() - rhs).abs() <= 1e-12);
        let u2 = cherny_u(GasParameter::from_l(l + dl).unwrap()).unwrap();
        prop_assert!(u2 < u);
    }

    #[test]
    fn duplicated_theories_identical(l in 3.0f64..2300.0) {
        let g = GasParameter::from_l(l).unwrap();
        let popov = Theory::Popov.spec().correction(g).unwrap();
        prop_assert_eq!(popov.to_bits(), Theory::Fisher.spec().correction(g).unwrap().to_bits());
        prop_assert_eq!(popov.to_bits(), Theory::Andersen.spec().correction(g).unwrap().to_bits());
        let cmp = Theory::ChernyMoraPricoupenko.spec().correction(g).unwrap();
        prop_assert!((cmp - popov - (4f64.ln() - 2.0 * EULER_GAMMA)).abs() < 1e-12);
    }

    #[test]
    fn log_domain_safety(l in 3.0f64..2300.0) {
        let g = GasParameter::from_l(l).unwrap();
        let k = UniversalConstants::default();
        prop_assert!(energy_mf_integrated(g).unwrap().is_finite());
        prop_assert!(energy_mf_expansion(g).unwrap().is_finite());
        prop_assert!(universal_energy(g, &k).unwrap().is_finite());
        prop_assert!(universal_mu(g, &k).unwrap().is_finite());
        prop_assert!(universal_energy_correction(g, &k).unwrap().is_finite());
        prop_assert!(cherny_u(g).unwrap().is_finite());
        for t in Theory::ALL {
            if let Ok(d) = t.spec().correction(g) {
                prop_assert!(d.is_finite(), "{}", t);
            }
        }
    }

    #[test]
    fn mean_field_forms_agree(l in 20.0f64..200.0) {
        let g = GasParameter::from_l(l).unwrap();
        prop_assert!(rel(energy_mf_expansion(g).unwrap(), energy_mf_integrated(g).unwrap()) < 1e-4);
    }
}
