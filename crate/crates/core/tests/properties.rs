use mcflab::catalog::{bowl_profile, OvalAt};
use mcflab::diagnostics::{gaussian_density, rigidity_series};
use mcflab::engine::{step, BlowDownLabel, SupportFlow};
use mcflab::geometry::{embed, measure};
use mcflab::SupportFunction;
use proptest::prelude::*;

fn ellipse() -> impl Strategy<Value = (f64, f64)> {
    (0.5f64..3.0, 0.5f64..3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn widths_scale_and_ignore_translation((a, b) in ellipse(), lambda in 0.2f64..5.0, cx in -3.0f64..3.0, cy in -3.0f64..3.0) {
        let h = SupportFunction::ellipse(128, a, b).unwrap();
        let m = measure(&h).unwrap();
        let moved = measure(&h.translated([cx, cy])).unwrap();
        let scaled = measure(&h.scaled(lambda)).unwrap();
        prop_assert!((moved.width_min - m.width_min).abs() < 1e-9);
        prop_assert!((moved.width_max - m.width_max).abs() < 1e-9);
        prop_assert!((scaled.width_max - lambda * m.width_max).abs() < 1e-9 * lambda.max(1.0));
        prop_assert!(m.width_min <= m.width_max + 1e-12);
        prop_assert!(m.inradius <= m.circumradius + 1e-9);
        prop_assert!(m.diameter <= 2.0 * m.circumradius + 1e-9);
    }

    #[test]
    fn embedded_normals_are_unit_and_curvature_positive((a, b) in ellipse()) {
        let s = embed(&SupportFunction::ellipse(64, a, b).unwrap()).unwrap();
        for (n, k) in s.normals.iter().zip(&s.curvature) {
            prop_assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-12);
            prop_assert!(*k > 0.0);
        }
    }

    #[test]
    fn a_step_never_grows_the_support((a, b) in ellipse(), frac in 0.01f64..1.0) {
        let h = SupportFunction::ellipse(128, a, b).unwrap();
        let rho = h.discrete_convexity().into_iter().fold(f64::INFINITY, f64::min);
        let next = step(&h, frac * 0.25 * rho * rho).unwrap();
        prop_assert!(next.values().iter().zip(h.values()).all(|(n, o)| n < o));
        prop_assert!(next.check_convex().is_ok());
    }

    #[test]
    fn density_is_invariant_under_parabolic_rescaling((a, b) in ellipse(), lambda in 0.3f64..3.0) {
        let mut s = embed(&SupportFunction::ellipse(256, a, b).unwrap()).unwrap();
        s.time = -1.0;
        let mut scaled = s.scaled(lambda);
        scaled.time = -lambda * lambda;
        let t0 = gaussian_density(&s, [0.0, 0.0], 0.0).unwrap();
        let t1 = gaussian_density(&scaled, [0.0, 0.0], 0.0).unwrap();
        prop_assert!((t0 - t1).abs() < 1e-12);
    }

    #[test]
    fn labels_are_nearest_targets(theta in 0.0f64..3.0) {
        let label = BlowDownLabel::classify(theta);
        let near = |v: f64| (theta - v).abs() <= 0.05;
        let expected = if near(1.0) {
            BlowDownLabel::PlaneMult1
        } else if near((2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt()) {
            BlowDownLabel::Circle
        } else if near(2.0) {
            BlowDownLabel::PlaneMult2
        } else {
            BlowDownLabel::Inconclusive
        };
        prop_assert_eq!(label, expected);
    }

    #[test]
    fn oval_points_solve_the_implicit_equation(t in -30.0f64..-0.05, theta in 0.0f64..std::f64::consts::TAU) {
        let oval = OvalAt::new(t).unwrap();
        let p = oval.point(theta);
        // The flat sides are conditioned by e^{-t}.
        let scale = p[1].cosh() * (-t).exp();
        prop_assert!(OvalAt::implicit(p[0], p[1], t).abs() / scale < 1e-14);
        prop_assert!(p[0].abs() < std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn rigidity_channels_follow_ellipse_rotation((a, b) in ellipse(), k in 0usize..64) {
        let h = SupportFunction::ellipse(128, a, b).unwrap();
        let flow = SupportFlow::from_frames(vec![-1.0], vec![h.clone()]).unwrap();
        let turned = SupportFlow::from_frames(vec![-1.0], vec![h.rotated(k)]).unwrap();
        let (x, y) = (rigidity_series(&flow).unwrap(), rigidity_series(&turned).unwrap());
        for name in ["width_min", "width_max", "inradius"] {
            prop_assert!((x.channel(name).unwrap()[0] - y.channel(name).unwrap()[0]).abs() < 1e-8);
        }
    }
}

#[test]
fn bowl_slopes_increase() {
    for n in [2, 3, 4] {
        let p = bowl_profile(n, 30.0, 1e-2).unwrap();
        assert!(p.slopes.windows(2).all(|w| w[1] > w[0]));
        assert!(p.heights.windows(2).all(|w| w[1] > w[0]));
    }
}
