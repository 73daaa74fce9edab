use polebridge::geometry::{ChartPoint, GeometryModel};
use polebridge::pathspace::{
    cm_basis, differential_along, divergence_direct, divergence_pair, endpoint_pairing,
    green_gradient_norm, CmDirection, CylinderFunctional, GreenKind,
};
use polebridge::rng::{path_stream, StreamPurpose};
use polebridge::sde::{make_time_grid, simulate_bridge, FramePathSample, Refinement};
use polebridge::Error;
use proptest::prelude::*;

fn bridge(geom: &GeometryModel, steps: usize, i: u64) -> FramePathSample {
    let grid = make_time_grid(steps, 1e-4, Refinement::DEFAULT).unwrap();
    let mut x0 = vec![0.0; geom.dim()];
    x0[0] = 1.0;
    simulate_bridge(geom, &ChartPoint::new(x0), &grid, &mut path_stream(3, StreamPurpose::Bridge, i)).unwrap()
}

#[test]
fn flat_differential_is_the_chart_derivative_along_h() {
    let geom = GeometryModel::euclidean(2).unwrap();
    let path = bridge(&geom, 200, 0);
    let f = CylinderFunctional::parse("coord(2,1,0.5)", 2).unwrap();
    let h = CmDirection::parse("sine(1,1)", 2).unwrap();
    // flat frames are the identity, so dF(h) is ∂_x F · h(0.5)
    let bound = f.bind(&path).unwrap();
    let x = path.point(bound.nodes[0])[0];
    let expected = 2.0 * x * h.eval(bound.times[0])[0];
    let got = differential_along(&f, &path, &h).unwrap();
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
}

#[test]
fn constant_functional_has_zero_differential_and_gradient() {
    let geom = GeometryModel::hyperbolic(2, 1.0).unwrap();
    let path = bridge(&geom, 100, 1);
    let one = CylinderFunctional::parse("one", 2).unwrap();
    let h = cm_basis(2, 1, 1).unwrap();
    assert_eq!(differential_along(&one, &path, &h).unwrap(), 0.0);
    assert_eq!(green_gradient_norm(&one, &path, GreenKind::Pinned).unwrap(), 0.0);
}

#[test]
fn pinned_green_norm_is_below_the_based_one() {
    let geom = GeometryModel::hyperbolic(3, 1.0).unwrap();
    for i in 0..5 {
        let path = bridge(&geom, 200, i);
        let f = CylinderFunctional::parse("prod(dist2(0.25),coord(1,2,0.75))", 3).unwrap();
        let based = green_gradient_norm(&f, &path, GreenKind::Based).unwrap();
        let pinned = green_gradient_norm(&f, &path, GreenKind::Pinned).unwrap();
        assert!(pinned >= 0.0 && pinned <= based + 1e-12);
    }
}

#[test]
fn zero_direction_has_zero_divergence() {
    let geom = GeometryModel::hyperbolic(2, 1.0).unwrap();
    let path = bridge(&geom, 100, 2);
    let d = divergence_direct(&geom, &path, &CmDirection::zero(2)).unwrap();
    assert_eq!(d.total, 0.0);
}

#[test]
fn divergence_representations_differ_by_the_endpoint_pairing() {
    let geom = GeometryModel::euclidean(2).unwrap();
    let h = CmDirection::parse("sine(1,1)", 2).unwrap();
    let mut residual = 0.0;
    let mut gap = 0.0;
    for i in 0..200 {
        let path = bridge(&geom, 1000, i);
        let pair = divergence_pair(&geom, &path, &h).unwrap();
        let y = endpoint_pairing(&geom, &path, &h, path.len() - 1);
        let g = pair.direct.total - pair.lemma1.total;
        gap += g.abs() / 200.0;
        residual += (g - y).abs() / 200.0;
    }
    assert!(residual < 0.5 * gap, "residual {residual} gap {gap}");
}

#[test]
fn parse_errors_name_the_registry() {
    let err = CylinderFunctional::parse("area(0.5)", 2).unwrap_err().to_string();
    for key in CylinderFunctional::REGISTRY {
        assert!(err.contains(key), "{err}");
    }
    assert!(matches!(CmDirection::parse("sine(1,3)", 2), Err(Error::InvalidInput(_))));
}

#[test]
fn functional_keys_round_trip() {
    for key in ["one", "dist2(0.5)", "coord(1,2,0.25)", "prod(coord(1,1,0.25),dist2(0.75))"] {
        let f = CylinderFunctional::parse(key, 2).unwrap();
        assert_eq!(CylinderFunctional::parse(&f.key(), 2).unwrap().key(), f.key());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn differential_is_linear_in_the_functional(a in -3.0f64..3.0, b in -3.0f64..3.0, i in 0u64..1000) {
        let geom = GeometryModel::hyperbolic(2, 1.0).unwrap();
        let path = bridge(&geom, 60, i);
        let h = CmDirection::parse("sine(2,1)", 2).unwrap();
        let f1 = CylinderFunctional::parse("dist2(0.5)", 2).unwrap();
        let f2 = CylinderFunctional::parse("coord(1,2,0.25)", 2).unwrap();
        let (c1, c2) = (f1.clone(), f2.clone());
        let times: Vec<f64> = vec![0.25, 0.5];
        let combo = CylinderFunctional::custom("combo", times, move |pts| {
            a * c1.value(&[0.5], &[pts[1]]) + b * c2.value(&[0.25], &[pts[0]])
        });
        let lhs = differential_along(&combo, &path, &h).unwrap();
        let rhs = a * differential_along(&f1, &path, &h).unwrap() + b * differential_along(&f2, &path, &h).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-5 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn green_kernels_are_symmetric(s in 0.0f64..1.0, t in 0.0f64..1.0) {
        for k in [GreenKind::Based, GreenKind::Pinned] {
            prop_assert_eq!(k.kernel(s, t), k.kernel(t, s));
        }
        prop_assert!(GreenKind::Pinned.kernel(s, t) >= 0.0);
    }
}
