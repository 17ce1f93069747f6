use std::f64::consts::PI;

use bicons_core::charts::{FamilyKind, Surface2};
use bicons_core::presets;
use bicons_core::profile::{
    close_biconservative_profile, constraint_defect, frenet, integrate_prescribed_curvature,
    predicted_frenet, ChartCurve, FnLaw, ProfileCurve, ProfileError,
};
use bicons_core::shape::{
    connection_forms, transverse_derivative_check, Engine, FrameSource, GridSpec,
};

const ROTATIONAL: [FamilyKind; 3] = [
    FamilyKind::S4Rotational,
    FamilyKind::H4Family1,
    FamilyKind::H4Family2,
];

#[test]
fn geodesic_on_s2_stays_in_its_plane() {
    let y0 = [1.0, 0.0, 0.0];
    let dy0 = [0.0, 0.6, 0.8];
    let law = FnLaw::constant(Surface2::S2, 0.0);
    let c = integrate_prescribed_curvature(&law, (y0, dy0), (0.0, 6.0), 1e-2).unwrap();
    let n = Surface2::S2.cross(&y0, &dy0);
    for r in &c.samples {
        assert!(Surface2::S2.inner(&r.y, &n).abs() < 1e-12);
    }
    assert!(c.max_drift < 1e-9);
}

#[test]
fn unit_geodesic_curvature_closes_after_latitude_period() {
    let law = FnLaw::constant(Surface2::S2, 1.0);
    let period = 2.0 * PI / 2f64.sqrt();
    let c = integrate_prescribed_curvature(
        &law,
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        (0.0, period),
        1e-2,
    )
    .unwrap();
    assert!(c.closing_gap() < 1e-6, "gap {}", c.closing_gap());
    // and not before
    let half = c.eval(0.5 * period).unwrap()[0];
    assert!((half[0] - 1.0).abs() > 0.1);
}

#[test]
fn hyperbolic_geodesic_keeps_constraint() {
    let law = FnLaw::constant(Surface2::H2, 0.0);
    let c =
        integrate_prescribed_curvature(&law, ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]), (0.0, 10.0), 1e-2)
            .unwrap();
    for r in &c.samples {
        assert!(constraint_defect(Surface2::H2, &r.y, &r.dy) < 1e-9);
        // y = (cosh s, 0, sinh s); coordinates lose about ε·|y|² to
        // cancellation, so compare only where that stays small
        if r.s <= 5.0 {
            let rel = (r.y[0] - r.s.cosh()).abs() / r.s.cosh();
            assert!(rel < 1e-9, "s={} rel {rel:e}", r.s);
        }
    }
    assert!(c.max_drift < 1e-9 * 10.0);
}

#[test]
fn csv_round_trip_preserves_interpolant() {
    let law = FnLaw::constant(Surface2::S2, 0.3);
    let c =
        integrate_prescribed_curvature(&law, ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), (0.0, 2.0), 1e-2)
            .unwrap();
    let mut buf = Vec::new();
    c.write_csv(&mut buf).unwrap();
    let back = ProfileCurve::read_csv(Surface2::S2, buf.as_slice()).unwrap();
    for s in [0.013, 0.77, 1.5] {
        let a = c.eval(s).unwrap();
        let b = back.eval(s).unwrap();
        for k in 0..4 {
            for i in 0..3 {
                assert!((a[k][i] - b[k][i]).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn cubic_csv_is_accepted() {
    let text =
        "s,y1,y2,y3,dy1,dy2,dy3\n0,1,0,0,0,1,0\n0.01,0.99995,0.0099998,0,-0.0099998,0.99995,0\n";
    let c = ProfileCurve::read_csv(Surface2::S2, text.as_bytes()).unwrap();
    assert_eq!(c.samples.len(), 2);
    assert!(ProfileCurve::read_csv(Surface2::S2, "s,y1\n0,1\n".as_bytes()).is_err());
}

#[test]
fn closure_profiles_satisfy_trace_rule_at_samples() {
    let eng = Engine::default();
    for fam in ROTATIONAL {
        let profile = presets::closure_profile(fam).unwrap();
        assert!(
            profile.max_drift < 1e-9,
            "{fam:?} drift {}",
            profile.max_drift
        );
        let chart = presets::rotational_chart(fam, profile.clone()).unwrap();
        let mut sign = 0.0;
        for r in profile
            .samples
            .iter()
            .filter(|r| chart.domain.contains(&[r.s, 0.0, 0.0]))
        {
            let sd = eng.shape_data(&chart, &[r.s, 0.0, 0.0]).unwrap();
            assert!(
                (sd.k[0] + 1.5 * sd.h).abs() < 1e-8,
                "{fam:?} s={} k1={} H={}",
                r.s,
                sd.k[0],
                sd.h
            );
            // H strictly monotone along the profile
            let dh = sd.dh[0];
            assert!(dh != 0.0);
            if sign != 0.0 {
                assert_eq!(dh.signum(), sign, "{fam:?} H' changes sign at {}", r.s);
            }
            sign = dh.signum();
        }
    }
}

#[test]
fn closure_charts_pass_structure_checks() {
    let eng = Engine::default();
    for fam in ROTATIONAL {
        let chart = presets::closure_chart(fam).unwrap();
        let grid = GridSpec::new([5, 3, 2], chart.domain);
        for p in grid.points() {
            assert!(eng.biconservative_residual(&chart, &p).unwrap().0 < 1e-6);
            assert!(eng.trace_rule_residual(&chart, &p).unwrap() < 1e-6);
            let tv = transverse_derivative_check(&eng, &chart, &p).unwrap();
            assert!(
                tv.iter().flatten().all(|v| v.abs() < 1e-6),
                "{fam:?} {p:?} {tv:?}"
            );
            let cf = connection_forms(&eng, &chart, &p, &FrameSource::Principal).unwrap();
            for (i, j, l) in [
                (0, 1, 0),
                (0, 2, 0),
                (0, 1, 2),
                (0, 2, 1),
                (1, 2, 0),
                (1, 2, 1),
                (1, 2, 2),
            ] {
                assert!(
                    cf.get(i, j, l).abs() < 1e-5,
                    "{fam:?} ω{}{}(e{}) = {}",
                    i + 1,
                    j + 1,
                    l + 1,
                    cf.get(i, j, l)
                );
            }
        }
    }
}

#[test]
fn e1_curves_match_frenet_predictions_and_are_congruent() {
    let eng = Engine::default();
    for fam in ROTATIONAL {
        let chart = presets::closure_chart(fam).unwrap();
        let (lo, hi) = (chart.domain.lo[0], chart.domain.hi[0]);
        for i in 0..10 {
            let s = lo + (i as f64 + 0.5) / 10.0 * (hi - lo);
            let a = frenet(
                &ChartCurve {
                    chart: &chart,
                    t0: 0.0,
                    u0: 0.0,
                },
                s,
            )
            .unwrap();
            let b = frenet(
                &ChartCurve {
                    chart: &chart,
                    t0: 1.3,
                    u0: -0.6,
                },
                s,
            )
            .unwrap();
            assert!((a.kappa - b.kappa).abs() < 1e-6 && (a.tau.abs() - b.tau.abs()).abs() < 1e-6);
            let sd = eng.shape_data(&chart, &[s, 0.0, 0.0]).unwrap();
            let (k, t) = predicted_frenet(chart.ambient, sd.h, sd.frame_derivative_of_h(0));
            assert!((a.kappa - k).abs() < 1e-5, "{fam:?} κ {} vs {k}", a.kappa);
            assert!((a.tau.abs() - t).abs() < 1e-4, "{fam:?} τ {} vs {t}", a.tau);
        }
    }
}

#[test]
fn closure_rejects_degenerate_starts() {
    // equal orbit radii make k_t = k_u and H' = 0
    let y = presets::surface_point(Surface2::S2, 0.4, 0.4);
    let dy = presets::unit_tangent(Surface2::S2, &y, &[1.0, 0.0, 0.0]);
    let r = close_biconservative_profile(FamilyKind::S4Rotational, (y, dy), (0.0, 1.0), 1e-2);
    assert!(
        matches!(r, Err(ProfileError::GradientVanishes { .. })),
        "{r:?}"
    );
    let r = close_biconservative_profile(FamilyKind::H4Family3, (y, dy), (0.0, 1.0), 1e-2);
    assert!(matches!(r, Err(ProfileError::NotRotational(_))));
}
