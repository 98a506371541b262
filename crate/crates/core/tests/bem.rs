use std::f64::consts::PI;

use nalgebra::DVector;
use neutral_inclusion::bem::operators::{double_layer_matrix, hypersingular_matrix};
use neutral_inclusion::bem::*;
use neutral_inclusion::conformal::ConformalMap;
use neutral_inclusion::interface::InterfaceParameter;
use neutral_inclusion::{Complex64, Error};

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1)
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 50)
}

fn ellipse_mesh(n: usize) -> BoundaryMesh {
    BoundaryMesh::discretize(&ConformalMap::ellipse(1.25, 0.75).unwrap(), n, Grading::None).unwrap()
}

#[test]
fn perimeters_against_adaptive_quadrature() {
    let (a, b) = (1.25, 0.75);
    let exact = adaptive_simpson(|t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt(), 0.0, 2.0 * PI, 1e-13);
    assert!((ellipse_mesh(256).perimeter() - exact).abs() < 1e-12);

    let drop = ConformalMap::droplet();
    let exact = adaptive_simpson(|t: f64| drop.jacobian(t), 0.0, 2.0 * PI, 1e-13);
    let coarse = BoundaryMesh::discretize(&drop, 256, Grading::corner()).unwrap().perimeter();
    let fine = BoundaryMesh::discretize(&drop, 1024, Grading::corner()).unwrap().perimeter();
    assert!((fine - exact).abs() < 1e-9);
    assert!((fine - exact).abs() < (coarse - exact).abs() || (coarse - exact).abs() < 1e-12);
}

#[test]
fn double_layer_of_one_is_one_half() {
    let laurent = ConformalMap::laurent(&[Complex64::new(0.1, 0.15), Complex64::new(0.0, 0.03)]).unwrap();
    for mesh in [ellipse_mesh(256), BoundaryMesh::discretize(&laurent, 256, Grading::None).unwrap()] {
        let k = double_layer_matrix(&mesh);
        let ones = DVector::from_element(mesh.len(), 1.0);
        let k1 = &k * &ones;
        assert!(k1.iter().all(|v| (v - 0.5).abs() < 1e-12));
    }
}

#[test]
fn adjoint_double_layer_of_one_integrates_to_half_the_perimeter() {
    let mesh = ellipse_mesh(256);
    let k1 = apply_adjoint_double_layer(&mesh, &vec![1.0; 256]);
    let integral: f64 = k1.iter().zip(mesh.weights()).map(|(a, b)| a * b).sum();
    assert!((integral - 0.5 * mesh.perimeter()).abs() < 1e-12);
    // pointwise it is not constant away from the circle
    let spread = k1.iter().cloned().fold(f64::MIN, f64::max) - k1.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 0.1);
}

/// `d_nu D[f]` at `x0 + t nu` by fine trapezoidal quadrature of the gradient kernel.
fn normal_derivative_off_boundary(fine: &BoundaryMesh, f: &[f64], x: Complex64, nu: Complex64) -> f64 {
    let mut acc = 0.0;
    for (q, fq) in f.iter().enumerate() {
        let d = x - fine.node(q);
        let ny = fine.normal(q);
        let r2 = d.norm_sqr();
        let dn = d.re * ny.re + d.im * ny.im;
        // grad_x of -(x - y).nu_y / |x - y|^2
        let gx = -ny.re / r2 + 2.0 * dn * d.re / (r2 * r2);
        let gy = -ny.im / r2 + 2.0 * dn * d.im / (r2 * r2);
        acc += (gx * nu.re + gy * nu.im) * fq * fine.weight(q);
    }
    acc / (2.0 * PI)
}

fn neville(ts: &[f64], vs: &[f64]) -> f64 {
    let mut p = vs.to_vec();
    let n = ts.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (ts[i + k] * p[i] - ts[i] * p[i + 1]) / (ts[i + k] - ts[i]);
        }
    }
    p[0]
}

#[test]
fn hypersingular_against_off_boundary_extrapolation() {
    let density = |t: f64| (3.0 * t).cos() + 0.5 * t.sin() + 0.2 * (5.0 * t).sin();
    let mesh = ellipse_mesh(256);
    let fine = ellipse_mesh(8192);
    let f: Vec<f64> = mesh.angles().iter().map(|&t| density(t)).collect();
    let f_fine: Vec<f64> = fine.angles().iter().map(|&t| density(t)).collect();
    let h = hypersingular_matrix(&mesh);
    let hf = &h * DVector::from_vec(f);
    let ts = [0.010, 0.015, 0.020, 0.025, 0.030, 0.035];
    let mut worst: f64 = 0.0;
    for i in (0..256).step_by(16) {
        let (x0, nu) = (mesh.node(i), mesh.normal(i));
        let vals: Vec<f64> =
            ts.iter().map(|&t| normal_derivative_off_boundary(&fine, &f_fine, x0 + nu * t, nu)).collect();
        worst = worst.max((neville(&ts, &vals) - hf[i]).abs());
    }
    assert!(worst < 1e-4, "worst {worst}");
}

#[test]
fn perfect_conductor_ellipse_tensor() {
    for (a, b) in [(1.25, 0.75), (2.0, 1.0)] {
        let map = ConformalMap::ellipse(a, b).unwrap();
        let mesh = BoundaryMesh::discretize(&map, 256, Grading::None).unwrap();
        let t = polarization_perfect(&mesh).unwrap();
        // the map is normalized to unit capacity: semi-axes 2a/(a+b), 2b/(a+b)
        let (sa, sb) = (2.0 * a / (a + b), 2.0 * b / (a + b));
        let expected = [[-PI * (sa + sb) * sa, 0.0], [0.0, -PI * (sa + sb) * sb]];
        assert!(t.distance(&expected) < 1e-10, "{:?}", t.t);
    }
}

#[test]
fn perfect_conductor_droplet_tensor_converges() {
    let expected = [[-2.0 * PI * 1.25, 0.0], [0.0, -2.0 * PI * 0.75]];
    let drop = ConformalMap::droplet();
    let err = |n| {
        let m = BoundaryMesh::discretize(&drop, n, Grading::corner()).unwrap();
        polarization_perfect(&m).unwrap().distance(&expected)
    };
    let (e1, e2) = (err(256), err(1024));
    assert!(e2 < 1e-3, "{e2}");
    assert!(e2 < e1);
}

#[test]
fn neutral_circle_field_is_uniform() {
    let mesh = BoundaryMesh::discretize(&ConformalMap::identity(), 128, Grading::None).unwrap();
    let sol = solve_imperfect(&mesh, &vec![1.0; 128], [0.3, -0.8]).unwrap();
    for k in 0..20 {
        let x = Complex64::from_polar(1.5 + 0.2 * k as f64, 0.9 * k as f64);
        assert!(eval_perturbation(&mesh, &sol, x).unwrap().abs() < 1e-12);
    }
    assert!(sol.residual < 1e-14);
}

#[test]
fn zero_field_has_zero_density() {
    let p = InterfaceParameter::calibrated(&ConformalMap::droplet(), 128).unwrap();
    let mesh = BoundaryMesh::discretize(p.map(), 512, Grading::corner()).unwrap();
    let sol = solve_imperfect(&mesh, &beta_at_nodes(&mesh, &p).unwrap(), [0.0, 0.0]).unwrap();
    assert!(sol.psi.iter().all(|v| v.abs() <= 1e-10));
}

#[test]
fn input_validation() {
    let mesh = ellipse_mesh(64);
    assert!(ImperfectSystem::assemble(&mesh, &vec![0.0; 64]).is_err());
    assert!(ImperfectSystem::assemble(&mesh, &vec![f64::NAN; 64]).is_err());
    let mut negative = vec![1.0; 64];
    negative[3] = -1.0;
    assert!(ImperfectSystem::assemble(&mesh, &negative).is_err());
    let sol = solve_perfect(&mesh, [1.0, 0.0]).unwrap();
    assert!(matches!(eval_field(&mesh, &sol, Complex64::new(0.0, 0.0)), Err(Error::InvalidArgument(_))));
    let near = mesh.node(0) + mesh.normal(0) * 1e-3;
    assert!(matches!(eval_field(&mesh, &sol, near), Err(Error::TooClose { .. })));
}

#[test]
fn conditioning_is_moderate() {
    let p = InterfaceParameter::calibrated(&ConformalMap::ellipse(1.25, 0.75).unwrap(), 128).unwrap();
    let mesh = ellipse_mesh(512);
    let sys = ImperfectSystem::assemble(&mesh, &beta_at_nodes(&mesh, &p).unwrap()).unwrap();
    let perfect = PerfectSystem::assemble(&mesh).unwrap();
    assert!(sys.condition_estimate() < 1e4);
    // first-kind system: grows with n but stays far below the rejection level
    assert!(perfect.condition_estimate() < 1e7);
}
