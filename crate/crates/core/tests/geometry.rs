use approx::assert_relative_eq;
use polebridge::geometry::{hyperbolic_phi_closed_form, ChartPoint, GeometryModel, WarpedProfile};
use polebridge::verify::oracles::{fd_christoffel, fd_laplacian};
use polebridge::Error;

fn models() -> Vec<GeometryModel> {
    vec![
        GeometryModel::euclidean(3).unwrap(),
        GeometryModel::hyperbolic(2, 1.0).unwrap(),
        GeometryModel::hyperbolic(3, 0.5).unwrap(),
    ]
}

#[test]
fn metric_is_identity_at_the_pole_and_radial_eigenvalue_is_one() {
    for g in models() {
        let n = g.dim();
        let m = g.metric_at(&ChartPoint::pole(n)).unwrap();
        assert_relative_eq!(m, nalgebra::DMatrix::identity(n, n), epsilon = 1e-14);

        let mut x = vec![0.0; n];
        x[0] = 1.3;
        let m = g.metric_at(&ChartPoint::new(x)).unwrap();
        // normal coordinates: g(∂r, ∂r) = 1
        assert_relative_eq!(m[(0, 0)], 1.0, epsilon = 1e-12);
    }
}

#[test]
fn christoffel_symbols_match_finite_differences() {
    for g in models() {
        let n = g.dim();
        let x: Vec<f64> = (0..n).map(|i| 0.4 + 0.3 * i as f64).collect();
        let exact = g.christoffel_at(&ChartPoint::new(x.clone())).unwrap();
        let fd = fd_christoffel(&g, &x).unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!((exact.get(k, i, j) - fd.get(k, i, j)).abs() < 1e-6, "{} Γ^{k}_{i}{j}", g.label());
                }
            }
        }
    }
}

#[test]
fn heat_kernel_log_density_satisfies_the_radial_laplacian() {
    // Δ log J computed from radial data agrees with the coordinate Laplacian
    let g = GeometryModel::hyperbolic(3, 1.0).unwrap();
    let x = [0.7, -0.2, 0.4];
    let jd = g.jacobian_data(&ChartPoint::new(x.to_vec())).unwrap();
    let log_j = |y: &[f64]| g.radial_terms(polebridge::geometry::norm(y)).log_j;
    let fd = fd_laplacian(&g, &log_j, &x).unwrap();
    assert!((jd.lap_log_j - fd).abs() < 1e-5, "{} vs {fd}", jd.lap_log_j);
}

#[test]
fn phi_on_three_dimensional_hyperbolic_space_is_constant() {
    for r in [0.05, 0.5, 2.0, 6.0] {
        assert_relative_eq!(hyperbolic_phi_closed_form(3, 1.0, r), -0.5, epsilon = 1e-12);
    }
    let g = GeometryModel::hyperbolic(3, 0.25).unwrap();
    let at = |r: f64| g.phi(r);
    assert_relative_eq!(at(0.3), at(1.7), epsilon = 1e-12);
    assert_relative_eq!(at(1.7), hyperbolic_phi_closed_form(3, 0.25, 1.7), epsilon = 1e-12);
}

#[test]
fn flat_space_has_no_curvature_terms() {
    let g = GeometryModel::euclidean(2).unwrap();
    let x = ChartPoint::new(vec![0.3, 1.1]);
    assert_eq!(g.christoffel_at(&x).unwrap().max_abs(), 0.0);
    assert_eq!(g.ricci_sharp_at(&x).unwrap().abs().max(), 0.0);
    assert_eq!(g.phi(2.0), 0.0);
    assert_relative_eq!(g.log_k(0.5, 1.0), -1.0 - (std::f64::consts::PI).ln(), epsilon = 1e-12);
}

#[test]
fn warped_profiles_build_and_have_unit_radial_metric() {
    for p in [WarpedProfile::Flat, WarpedProfile::Cubic { kappa: 0.5 }, WarpedProfile::Sinh { c: 1.0 }] {
        let g = GeometryModel::warped(2, p).unwrap();
        let m = g.metric_at(&ChartPoint::new(vec![0.0, 0.8])).unwrap();
        assert_relative_eq!(m[(1, 1)], 1.0, epsilon = 1e-12);
    }
}

#[test]
fn invalid_models_are_rejected() {
    assert!(matches!(GeometryModel::euclidean(0), Err(Error::InvalidInput(_))));
    assert!(GeometryModel::hyperbolic(2, -1.0).is_err());
    assert!(GeometryModel::hyperbolic(2, f64::NAN).is_err());
    let g = GeometryModel::euclidean(2).unwrap();
    assert!(matches!(
        g.metric_at(&ChartPoint::new(vec![1.0, 0.0, 0.0])),
        Err(Error::DimensionMismatch { .. })
    ));
}
