use bicons_core::charts::{build_chart, FamilySpec};
use bicons_core::jet::Jet;
use bicons_core::linalg::{cross4, det5, generalized_eig3, inner, Ambient, SymMat3, Vec5};
use proptest::prelude::*;

fn vec5() -> impl Strategy<Value = Vec5> {
    prop::array::uniform5(-2.0f64..2.0)
}

fn ambient() -> impl Strategy<Value = Ambient> {
    prop_oneof![Just(Ambient::Sphere), Just(Ambient::Hyperbolic)]
}

proptest! {
    #[test]
    fn cross4_represents_determinant(a in ambient(), v in prop::array::uniform4(vec5()), u in vec5()) {
        let w = cross4(&v, a);
        let d = det5(&[u, v[0], v[1], v[2], v[3]]);
        prop_assert!((inner(&w, &u, a) - d).abs() <= 1e-10 * (1.0 + d.abs()));
        for vi in &v {
            prop_assert!(inner(&w, vi, a).abs() <= 1e-10);
        }
    }

    #[test]
    fn generalized_eigenpairs(m in prop::array::uniform3(prop::array::uniform3(-1.0f64..1.0)),
                              b in prop::array::uniform6(-3.0f64..3.0)) {
        // g = MᵀM + I is positive definite
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = (0..3).map(|k| m[k][i] * m[k][j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
            }
        }
        let gs = SymMat3::from_full(&g);
        let bs = SymMat3(b);
        let bf = bs.to_full();
        let e = generalized_eig3(&gs, &bs).unwrap();
        prop_assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
        let scale = 1.0 + e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..3 {
            let v = e.vectors[i];
            for r in 0..3 {
                let bv: f64 = (0..3).map(|c| bf[r][c] * v[c]).sum();
                let gv: f64 = (0..3).map(|c| g[r][c] * v[c]).sum();
                prop_assert!((bv - e.values[i] * gv).abs() <= 1e-9 * scale);
            }
            for j in 0..3 {
                let gij: f64 = (0..3).flat_map(|r| (0..3).map(move |c| (r, c)))
                    .map(|(r, c)| e.vectors[i][r] * g[r][c] * e.vectors[j][c]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gij - want).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn jets_match_finite_differences(x in -1.0f64..1.0, y in 0.5f64..1.5) {
        let f = |a: Jet, b: Jet| -> Jet {
            (a * b).sin() * b.sqrt().unwrap() + a.cosh() * b.recip().unwrap()
        };
        let fv = |a: f64, b: f64| (a * b).sin() * b.sqrt() + a.cosh() / b;
        let j = f(Jet::variable(x, 0, 2, 2), Jet::variable(y, 1, 2, 2));
        prop_assert!((j.value() - fv(x, y)).abs() < 1e-14);
        let h = 1e-4;
        let dx = (fv(x + h, y) - fv(x - h, y)) / (2.0 * h);
        let dy = (fv(x, y + h) - fv(x, y - h)) / (2.0 * h);
        let dxy = (fv(x + h, y + h) - fv(x + h, y - h) - fv(x - h, y + h) + fv(x - h, y - h)) / (4.0 * h * h);
        prop_assert!((j.extract(&[1, 0]).unwrap() - dx).abs() < 1e-6 * (1.0 + dx.abs()));
        prop_assert!((j.extract(&[0, 1]).unwrap() - dy).abs() < 1e-6 * (1.0 + dy.abs()));
        prop_assert!((j.extract(&[1, 1]).unwrap() - dxy).abs() < 1e-5 * (1.0 + dxy.abs()));
    }

    #[test]
    fn random_charts_lie_in_their_space_form(a in ambient(), seed in 0u64..1000,
                                             p in prop::array::uniform3(-0.24f64..0.24)) {
        let chart = build_chart(&FamilySpec::RandomAnalytic { ambient: a, seed }, None).unwrap();
        prop_assert!(chart.membership_defect(&p).unwrap() <= 1e-12);
    }
}
