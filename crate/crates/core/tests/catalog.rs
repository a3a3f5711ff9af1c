use approx::assert_relative_eq;
use mcflab::catalog::*;
use mcflab::geometry::embed;
use mcflab::Error;

#[test]
fn shrinking_circle_examples() {
    let h = shrinking_circle(128, -0.5).unwrap();
    assert!(h.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
    let s = embed(&h).unwrap();
    assert!(s.curvature.iter().all(|k| (k - 1.0).abs() < 1e-12));
    assert!(shrinking_circle(128, -2.0).unwrap().values().iter().all(|v| (v - 2.0).abs() < 1e-15));
    assert!(matches!(shrinking_circle(128, 0.0), Err(Error::DomainError(_))));
}

#[test]
fn shrinker_radius_examples() {
    assert_relative_eq!(shrinker_radius(2, 1, -0.5).unwrap(), 1.0);
    assert_relative_eq!(shrinker_radius(3, 0, -1.0).unwrap(), 2.449489742783178, epsilon = 1e-15);
    assert!(shrinker_radius(2, 1, -1e-12).unwrap() < 1e-5);
    assert!(shrinker_radius(2, 2, -1.0).is_err());
    assert!(shrinker_radius(2, 1, 1.0).is_err());
}

#[test]
fn grim_reaper_examples() {
    let s = grim_reaper(0.0, &[-1.0, 0.0, 1.0]).unwrap();
    assert_eq!(s.points[1], [0.0, 0.0]);
    assert_relative_eq!(s.curvature[1], 1.0);
    assert_relative_eq!(s.curvature[0], 0.5403023058681398, epsilon = 1e-15);
    assert_relative_eq!(s.curvature[2], 0.5403023058681398, epsilon = 1e-15);
    for (n, k) in s.normals.iter().zip(&s.curvature) {
        assert_relative_eq!(n[1], -k, epsilon = 1e-15);
    }
    assert!(matches!(grim_reaper(0.0, &[2.0]), Err(Error::DomainError(_))));
}

#[test]
fn oval_examples() {
    let oval = OvalAt::new(-1.0).unwrap();
    assert_relative_eq!(oval.tip_height(), 1.6574544541530771, epsilon = 1e-14);
    let s = angenent_oval(-1.0, 256).unwrap();
    for p in &s.points {
        assert!(p[0].abs() < std::f64::consts::FRAC_PI_2);
        assert!(OvalAt::implicit(p[0], p[1], -1.0).abs() < 1e-12);
    }
    let tiny = angenent_oval(-1e-8, 64).unwrap();
    assert!(tiny.points.iter().all(|p| p[0].hypot(p[1]) < 1e-3));
    assert!(angenent_oval(0.0, 64).is_err());
}

/// Moves each boundary point along its normal to the curve at `t ± Δt`; the
/// displacement rate must equal the curvature.
#[test]
fn oval_satisfies_the_flow() {
    let t: f64 = -2.0;
    let dt = 1e-4 * t.abs();
    let oval = OvalAt::new(t).unwrap();
    let crossing = |p: [f64; 2], n: [f64; 2], time: f64| {
        // Newton on s ↦ F(p + s n, time).
        let mut s = 0.0;
        for _ in 0..30 {
            let (x, y) = (p[0] + s * n[0], p[1] + s * n[1]);
            let f = OvalAt::implicit(x, y, time);
            let df = (-time).exp() * x.sin() * n[0] + y.sinh() * n[1];
            s -= f / df;
        }
        s
    };
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let theta = std::f64::consts::TAU * (k as f64 + 0.5) / 200.0;
        let p = oval.point(theta);
        let n = [theta.cos(), theta.sin()];
        let speed = -(crossing(p, n, t + dt) - crossing(p, n, t - dt)) / (2.0 * dt);
        worst = worst.max((speed - oval.curvature(theta)).abs());
    }
    assert!(worst < 1e-6, "flow residual {worst}");
}

#[test]
fn oval_width_approaches_pi_monotonically() {
    let widths: Vec<f64> = [-0.5, -1.0, -2.0, -5.0, -10.0, -40.0]
        .iter()
        .map(|&t| 2.0 * OvalAt::new(t).unwrap().half_width())
        .collect();
    // At t = -40 the width agrees with π to rounding.
    assert!(widths[..5].iter().all(|w| *w < std::f64::consts::PI));
    assert!(widths.windows(2).all(|w| w[1] >= w[0] - 1e-4));
    assert!(std::f64::consts::PI - widths[5] < 1e-10);
}

#[test]
fn bowl_examples() {
    let p = bowl_profile(2, 100.0, 1e-2).unwrap();
    assert_eq!((p.heights[0], p.slopes[0]), (0.0, 0.0));
    assert!((p.heights[10] - 0.0025).abs() < 1e-5);
    let far = p.heights.last().unwrap() / 1e4;
    assert!((far - 0.5).abs() < 0.005, "{far}");
    assert!(p.ode_residual() < 1e-8);
    assert!(p.slopes.windows(2).all(|w| w[1] > w[0]));
    assert!(p.radii.windows(2).all(|w| w[1] > w[0]));
    // Two resolutions agree on the far field.
    let fine = bowl_profile(2, 100.0, 5e-3).unwrap();
    assert_relative_eq!(fine.heights.last().unwrap(), p.heights.last().unwrap(), max_relative = 1e-9);
    assert!(bowl_profile(1, 10.0, 1e-2).is_err());
    assert!(bowl_profile(2, 0.5, 1e-2).is_err());
    assert!(bowl_profile(2, 10.0, 0.1).is_err());
}
