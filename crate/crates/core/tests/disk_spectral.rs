use std::f64::consts::PI;

use neutral_inclusion::disk_spectral::{
    polarization, solve_dense, solve_direction, thomas, GammaModes, OddSystem, TridiagonalSystem,
};
use neutral_inclusion::Complex64;
use proptest::prelude::*;

#[test]
fn constant_gamma_tensor() {
    // only the modes n = +-1 are driven: (g + 1) phi_{+-1} = -1
    for g in [0.3, 1.0, 2.5, 10.0] {
        let t = polarization(&GammaModes::constant(g), 64).unwrap();
        let expected = -2.0 * PI * (g - 1.0) / (g + 1.0);
        assert!((t.t[0][0] - expected).abs() < 1e-13);
        assert!((t.t[1][1] - expected).abs() < 1e-13);
        assert!(t.t[0][1].abs() < 1e-14 && t.t[1][0].abs() < 1e-14);
    }
    // gamma = 0 leaves the mean of the density undetermined
    assert!(polarization(&GammaModes::constant(0.0), 64).is_err());
}

#[test]
fn quarter_turn_phase_swaps_the_diagonal() {
    let (g0, g2) = (17.0 / 15.0, -8.0 / 15.0);
    let t0 = polarization(&GammaModes::two_harmonic(g0, g2, 0.0), 128).unwrap();
    let t1 = polarization(&GammaModes::two_harmonic(g0, g2, PI), 128).unwrap();
    assert!((t0.t[0][0] - t1.t[1][1]).abs() < 1e-12);
    assert!((t0.t[1][1] - t1.t[0][0]).abs() < 1e-12);
}

#[test]
fn densities_are_real_functions() {
    let g = GammaModes::new(vec![Complex64::new(1.4, 0.0), Complex64::new(0.1, 0.05), Complex64::new(-0.2, 0.1)]).unwrap();
    let d = solve_dense(&g, 64).unwrap();
    assert!(d.reality_defect() < 1e-13);
    assert!(d.constraint_residual(1) < 1e-13 && d.constraint_residual(2) < 1e-13);
}

fn admissible() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.2f64..3.0, -0.45f64..0.45, 0.0f64..(2.0 * PI)).prop_map(|(g0, r, ph)| (g0, r * g0, ph))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncation_doubling((g0, g2, ph) in admissible()) {
        let g = GammaModes::two_harmonic(g0, g2, ph);
        let a = polarization(&g, 64).unwrap();
        let b = polarization(&g, 128).unwrap();
        prop_assert!(a.distance(&b.t) <= 1e-10);
    }

    #[test]
    fn linear_in_the_field_direction((g0, g2, ph) in admissible(), a1 in -2.0f64..2.0, a2 in -2.0f64..2.0) {
        let g = GammaModes::two_harmonic(g0, g2, ph);
        let d = solve_dense(&g, 32).unwrap();
        let psi = solve_direction(&g, 32, [a1, a2]).unwrap();
        let n = 32i64;
        for m in -n..=n {
            let expected = d.phi(1, m) * a1 + d.phi(2, m) * a2;
            prop_assert!((psi[(m + n) as usize] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn explicit_inverse_matches_elimination((g0, g2, _) in admissible(), n in 2usize..220, b in proptest::bool::ANY) {
        let which = if b { OddSystem::A } else { OddSystem::B };
        let sys = TridiagonalSystem::new(g0, g2, n, which).unwrap();
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let elim = thomas(sys.diagonal(), sys.off_diagonal(), &e1).unwrap();
        let col = sys.inverse_first_column();
        for k in 0..n {
            prop_assert!((col[k] - elim[k]).abs() <= 1e-12 * elim[0].abs().max(1e-300) + 1e-300);
        }
        let mid = n / 2 + 1;
        let mut ej = vec![0.0; n];
        ej[mid - 1] = 1.0;
        let elim = thomas(sys.diagonal(), sys.off_diagonal(), &ej).unwrap();
        for k in 1..=n {
            prop_assert!((sys.inverse_entry(k, mid) - elim[k - 1]).abs() <= 1e-12 * elim[mid - 1].abs());
        }
    }
}
