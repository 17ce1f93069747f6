use std::sync::Arc;

use bicons_core::charts::{
    build_chart, build_flat_surface, param_jets, random_analytic, CurveProfile, FamilyKind,
    FamilySpec, FlatKind, ParamBox, Polynomial,
};
use bicons_core::linalg::det3;
use bicons_core::presets;
use bicons_core::Jet;
use bicons_core::shape::{
    flat_surface_flatness, frame::s3_left_invariant_frame, gauss_relation_along_e1, shape_data,
    slice_gaussian_curvature, Corruption, Engine, FrameSource, ShapeError,
};
use bicons_core::Ambient;

fn family3_identity() -> bicons_core::charts::Chart {
    build_chart(
        &FamilySpec::H4Family3 {
            a: 1.0,
            profile: Arc::new(Polynomial::identity()),
        },
        Some(ParamBox::new([1.0, -1.0, -1.0], [3.0, 1.0, 1.0])),
    )
    .unwrap()
}

#[test]
fn equator_is_totally_geodesic() {
    let ch = build_chart(&FamilySpec::EquatorS3, None).unwrap();
    let sd = shape_data(&ch, &[1.0, 1.2, 0.3]).unwrap();
    for k in sd.k {
        assert!(k.abs() < 1e-14);
    }
    assert!(sd.h.abs() < 1e-14 && sd.grad_norm < 1e-13);
    assert!(!sd.ordered);
    let e = Engine::default();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let k = e.sectional_curvature(&ch, &[1.0, 1.2, 0.3], i, j).unwrap();
        assert!((k - 1.0).abs() < 1e-12, "{k}");
    }
}

#[test]
fn small_sphere_is_umbilic() {
    let ch = build_chart(&FamilySpec::SmallSphereS3 { height: 0.6 }, None).unwrap();
    let sd = shape_data(&ch, &[1.0, 1.2, 0.3]).unwrap();
    for k in sd.k {
        assert!((k.abs() - 0.75).abs() < 1e-12, "{k}");
    }
    assert!((sd.h.abs() - 0.75).abs() < 1e-12);
}

#[test]
fn family3_identity_profile_values() {
    let ch = family3_identity();
    let sd = shape_data(&ch, &[2.0, 0.0, 0.0]).unwrap();
    assert!(sd.ordered);
    let sign = if sd.h < 0.0 { 1.0 } else { -1.0 };
    let k = sd.k.map(|v| sign * v);
    println!("{:?} H={} e1H={}", k, sd.h, sd.frame_derivative_of_h(0));
    assert!((sign * sd.h + 1.0 / 6.0).abs() < 1e-12);
    assert!(k[0].abs() < 1e-12);
    assert!((sd.frame_derivative_of_h(0) - 1.0 / 6.0).abs() < 1e-12);
    let (r, _) = sd.biconservative_residual();
    assert!((r - 1.0 / 24.0).abs() < 1e-12, "{r}");
    assert!((sd.trace_rule_residual().unwrap() - 0.5).abs() < 1e-12);
    println!("N = {:?}", sd.normal);
}

#[test]
fn random_charts_satisfy_structure_equations() {
    let e = Engine::default();
    for amb in [Ambient::Sphere, Ambient::Hyperbolic] {
        for seed in 0..5 {
            let ch = random_analytic(amb, seed, None).unwrap();
            let p = [0.1, -0.05, 0.2];
            let c = e.codazzi_residual(&ch, &p).unwrap();
            let g = e.gauss_residual(&ch, &p).unwrap();
            let sd = e.shape_data(&ch, &p).unwrap();
            assert!(c < 1e-9 && g < 1e-9, "{amb:?} {seed} codazzi {c} gauss {g}");
            assert!(sd.normal_defect() < 1e-10);
            assert!(sd.self_adjointness_defect() < 1e-10);
        }
    }
}

#[test]
fn corrupted_b_breaks_codazzi() {
    let ch = random_analytic(Ambient::Sphere, 3, None).unwrap();
    let e = Engine::default().with_corruption(Corruption {
        entry: (0, 0),
        amount: 1e-3,
        slope_axis: 1,
    });
    let c = e.codazzi_residual(&ch, &[0.0, 0.0, 0.0]).unwrap();
    assert!(c >= 1e-4, "{c}");
}

#[test]
fn cmc_chart() {
    let ch = build_chart(
        &FamilySpec::CmcFamily3 {
            a: 0.7,
            c: 1.3,
            radius: Arc::new(Polynomial::new(vec![0.5, 0.8])),
        },
        None,
    )
    .unwrap();
    let sd = shape_data(&ch, &[1.0, 0.4, 0.3]).unwrap();
    println!("{:?} grad {}", sd.k, sd.grad_norm);
    assert!(sd.grad_norm < 1e-10);
    assert!(matches!(
        sd.trace_rule_residual(),
        Err(ShapeError::UnorderedCurvatures { .. })
    ));
}

#[test]
fn flat_surfaces() {
    for (kind, a, b) in [
        (FlatKind::TorusS4, 2.0, 2.0),
        (FlatKind::BH1, 2.0, 2.0),
        (FlatKind::BH2, 0.5, 1.0),
        (FlatKind::BH3, 0.7, 1.3),
        (FlatKind::BH4, 0.5, 1.0),
    ] {
        let f = build_flat_surface(kind, a, b, None).unwrap();
        let k = flat_surface_flatness(&f, (-1.0, 1.0), (-1.0, 1.0), 10, 10).unwrap();
        assert!(k < 1e-12, "{kind:?} {k}");
    }
    let ch = build_chart(&FamilySpec::SmallSphereS3 { height: 0.6 }, None).unwrap();
    let k = slice_gaussian_curvature(&ch, std::f64::consts::FRAC_PI_2, 1.0, 0.5).unwrap();
    assert!((k - 1.5625).abs() < 1e-12, "{k}");
}

#[test]
fn equator_gauss_relation_report() {
    let ch = build_chart(&FamilySpec::EquatorS3, None).unwrap();
    let r = gauss_relation_along_e1(
        &Engine::default(),
        &ch,
        &[1.2, 1.4, 0.3],
        2,
        &s3_left_invariant_frame(),
    )
    .unwrap();
    println!("{r:?}");
    assert!(r.lhs.abs() < 1e-6);
    assert!((r.rhs_two_c + 2.0).abs() < 1e-8);
    assert!((r.rhs_one_c + 1.0).abs() < 1e-8);
    let _ = FrameSource::Principal;
}

/// Euclidean Gram determinant of the three coordinate tangents.
fn gram_det(x: &[Jet; 5]) -> f64 {
    let cols: Vec<[f64; 5]> = (0..3)
        .map(|k| std::array::from_fn(|c| x[c].gradient()[k]))
        .collect();
    let m: [[f64; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..5).map(|c| cols[i][c] * cols[j][c]).sum())
    });
    det3(&m)
}

/// Writing the rotational S⁴ family with `t` in both rotation blocks gives
/// a map of rank 2, so the second block has to use `u`.
#[test]
fn rotational_family_needs_both_angles() {
    let profile = presets::closure_profile(FamilyKind::S4Rotational).unwrap();
    let chart = presets::rotational_chart(FamilyKind::S4Rotational, profile.clone()).unwrap();
    for p in [[0.3, 0.2, -0.4], [0.6, -1.0, 0.7]] {
        let v = param_jets(&p, 1);
        let d = profile.derivs(p[0]).unwrap();
        let a: [Jet; 3] =
            std::array::from_fn(|c| v[0].compose([d[0][c], d[1][c], d[2][c], d[3][c]]));
        let t = v[1];
        let literal = [
            a[0],
            a[1] * t.cos(),
            a[1] * t.sin(),
            a[2] * t.cos(),
            a[2] * t.sin(),
        ];
        assert_eq!(gram_det(&literal), 0.0);
        assert!(gram_det(&chart.eval(&p, 1).unwrap()) > 1e-3);
    }
}
