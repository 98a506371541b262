use std::f64::consts::PI;

use neutral_inclusion::conformal::ConformalMap;
use neutral_inclusion::interface::{
    beta_csv, calibrate_gamma, gamma_closed_form, gamma_closed_form_exact, InterfaceParameter, Provenance,
};
use neutral_inclusion::{Complex64, Error, B_MAX};
use num_rational::Ratio;
use proptest::prelude::*;

/// `(17/15 - 16/15 cos 2 theta) |(1 + e^{-i theta}) / (1 + e^{-i theta}/2)^2|^{-1}`.
fn droplet_beta(theta: f64) -> f64 {
    let e = Complex64::from_polar(1.0, -theta);
    let jac = ((1.0 + e) / (1.0 + e / 2.0).powi(2)).norm();
    (17.0 / 15.0 - 16.0 / 15.0 * (2.0 * theta).cos()) / jac
}

#[test]
fn droplet_beta_matches_the_closed_expression() {
    let p = InterfaceParameter::closed_form(&ConformalMap::droplet()).unwrap();
    for k in 0..400 {
        let th = 2.0 * PI * (k as f64 + 0.25) / 400.0;
        if (th - PI).abs() < 1e-3 {
            continue;
        }
        let got = p.beta(th).unwrap();
        assert!((got - droplet_beta(th)).abs() <= 1e-12 * got.abs().max(1.0), "theta = {th}");
    }
    assert!(matches!(p.beta(PI), Err(Error::CornerPoint(_))));
}

#[test]
fn ellipse_beta_is_gamma_over_the_jacobian() {
    let p = InterfaceParameter::closed_form(&ConformalMap::ellipse(1.25, 0.75).unwrap()).unwrap();
    for k in 0..64 {
        let th = 2.0 * PI * k as f64 / 64.0;
        let jac = (1.0 - 0.25 * Complex64::from_polar(1.0, -2.0 * th)).norm();
        let gamma = 17.0 / 15.0 - 16.0 / 15.0 * (2.0 * th).cos();
        assert!((p.beta(th).unwrap() - gamma / jac).abs() < 1e-14);
    }
    let csv = beta_csv(&p.beta_samples(8));
    assert!(csv.starts_with("theta,beta\n"));
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn rational_closed_form() {
    assert_eq!(gamma_closed_form_exact(Ratio::new(1, 4)), (Ratio::new(17, 15), Ratio::new(-8, 15)));
    assert_eq!(gamma_closed_form_exact(Ratio::new(0, 1)), (Ratio::new(1, 1), Ratio::new(0, 1)));
    assert!(matches!(gamma_closed_form(0.3), Err(Error::Inadmissible(_))));
    let (g0, g2) = gamma_closed_form(B_MAX).unwrap();
    assert!((g0 - 2.0 * g2.abs()).abs() < 1e-12);
}

#[test]
fn calibrated_parameters() {
    let map = ConformalMap::laurent(&[Complex64::new(0.0, 0.2)]).unwrap();
    let p = InterfaceParameter::calibrated(&map, 128).unwrap();
    assert_eq!(p.provenance, Provenance::Calibrated);
    assert_eq!(p.truncation, Some(128));
    assert!((p.phase - PI / 2.0).abs() < 1e-15);
    assert!(p.min_gamma() > 0.0);
    // beyond the closed-form range the calibration still produces a non-negative design
    let (g0, g2) = calibrate_gamma(0.26, 128).unwrap();
    assert!(g0 >= 2.0 * g2.abs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_is_non_negative(b in 0.0f64..=B_MAX, t in 0.0f64..(2.0 * PI)) {
        let (g0, g2) = gamma_closed_form(b).unwrap();
        prop_assert!(g0 + 2.0 * g2 * t.cos() >= -1e-12);
    }
}
