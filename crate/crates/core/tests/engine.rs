use approx::assert_relative_eq;
use mcflab::catalog::{angenent_oval_support, shrinking_circle};
use mcflab::engine::*;
use mcflab::geometry::{measure, parabolic_rescale};
use mcflab::{Error, SupportFunction};

fn circle_flow() -> SupportFlow {
    let h0 = shrinking_circle(256, -2.0).unwrap();
    evolve(&h0, -2.0, -0.1, &StepPolicy::default()).unwrap()
}

fn oval_history() -> SupportFlow {
    SupportFlow::from_ancient(AncientSolution::oval(), 256, log_cadence(-200.0, -1.0, 100.0)).unwrap()
}

#[test]
fn constant_support_stays_constant() {
    let h = SupportFunction::constant(96, 1.7).unwrap();
    let next = step(&h, 1e-3).unwrap();
    let first = next.values()[0];
    assert!(next.values().iter().all(|v| *v == first));
}

#[test]
fn ellipse_step_rounds_the_curve() {
    let h = SupportFunction::from_fn(256, |t| (4.0 * t.cos().powi(2) + t.sin().powi(2)).sqrt()).unwrap();
    let ratio = |h: &SupportFunction| {
        let m = measure(h).unwrap();
        m.width_max / m.width_min
    };
    let next = step(&h, 1e-4).unwrap();
    assert!(ratio(&next) < ratio(&h) - 1e-8);
}

#[test]
fn circle_flow_follows_radius_law() {
    let flow = circle_flow();
    for (t, f) in flow.times().iter().zip(flow.frames()) {
        let r = (-2.0 * t).sqrt();
        assert!(f.values().iter().all(|h| (h / r - 1.0).abs() < 1e-4));
    }
}

/// Fixed-step global error of the radius law for a given step count.
fn radius_error(steps: usize) -> f64 {
    let (t0, t1) = (-1.0, -0.25);
    let dt = (t1 - t0) / steps as f64;
    let mut h = shrinking_circle(32, t0).unwrap();
    for _ in 0..steps {
        h = step(&h, dt).unwrap();
    }
    (h.values()[0] - (-2.0f64 * t1).sqrt()).abs()
}

#[test]
fn halving_the_step_quarters_the_error() {
    let (coarse, fine) = (radius_error(200), radius_error(400));
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.1, "observed order {order}");
}

#[test]
fn frames_shrink_and_stay_convex() {
    let h0 = SupportFunction::ellipse(256, 2.0 * 2f64.sqrt(), 2f64.sqrt()).unwrap();
    let flow = evolve(&h0, -2.0, -0.2, &StepPolicy::default()).unwrap();
    for w in flow.frames().windows(2) {
        assert!(w[0].values().iter().zip(w[1].values()).all(|(a, b)| b < a));
        assert!(w[1].check_convex().is_ok());
    }
}

#[test]
fn nested_initial_data_stay_nested() {
    let policy = StepPolicy::default();
    let inner = SupportFunction::ellipse(128, 2.0, 1.0).unwrap();
    let outer = SupportFunction::constant(128, 2.5).unwrap();
    let a = evolve(&inner, -4.0, -3.2, &policy).unwrap();
    let b = evolve(&outer, -4.0, -3.2, &policy).unwrap();
    assert_eq!(a.times(), b.times());
    for (fa, fb) in a.frames().iter().zip(b.frames()) {
        assert!(fa.values().iter().zip(fb.values()).all(|(x, y)| x <= y));
    }
}

#[test]
fn engine_matches_catalog_oval() {
    let h0 = angenent_oval_support(256, -5.0).unwrap();
    let flow = evolve(&h0, -5.0, -1.0, &StepPolicy::default()).unwrap();
    for (t, f) in flow.times().iter().zip(flow.frames()) {
        let exact = angenent_oval_support(256, *t).unwrap();
        let gap = f.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-3, "t = {t}: {gap}");
    }
}

#[test]
fn evolve_rejects_reversed_interval() {
    let h = shrinking_circle(64, -2.0).unwrap();
    assert!(matches!(evolve(&h, -1.0, -2.0, &StepPolicy::default()), Err(Error::DomainError(_))));
}

#[test]
fn blow_down_of_circle_and_oval() {
    let circle = blow_down(&circle_flow(), &[1.0, 0.9, 0.8, 0.75]).unwrap();
    assert_eq!(circle.label, BlowDownLabel::Circle);
    for (_, theta) in &circle.samples {
        assert_relative_eq!(*theta, circle_density(), epsilon = 1e-3);
    }
    let oval = blow_down(&oval_history(), &[0.5, 0.2, 0.1, 200f64.sqrt().recip()]).unwrap();
    assert_eq!(oval.label, BlowDownLabel::PlaneMult2);
}

#[test]
fn blow_down_needs_history_and_ordered_scales() {
    let flow = circle_flow();
    assert!(matches!(blow_down(&flow, &[0.1]), Err(Error::InsufficientHistory { .. })));
    assert!(matches!(blow_down(&flow, &[0.8, 0.9]), Err(Error::DomainError(_))));
    assert!(matches!(blow_down(&flow, &[1.5]), Err(Error::DomainError(_))));
}

#[test]
fn asymptotic_translators() {
    let flow = circle_flow();
    let times: Vec<f64> = flow.times()[..3].to_vec();
    let frames = asymptotic_translator(&flow, [1.0, 0.0], &times).unwrap();
    for f in &frames {
        assert_relative_eq!(f.speed, 1.0 / (-2.0 * f.time).sqrt(), max_relative = 1e-4);
        assert!(f.slice.points[0][0].abs() < 1e-12);
    }
    let oval = oval_history();
    let tip = asymptotic_translator(&oval, [0.0, 1.0], &[-200.0]).unwrap();
    assert!(grim_tip_distance(&tip[0], [0.0, 1.0], 1.0) < 1e-2);
    assert!((0.95..=1.0).contains(&tip[0].speed));
    let side = asymptotic_translator(&oval, [1.0, 0.0], &[-200.0, -50.0, -10.0]).unwrap();
    assert!(side.iter().all(|f| f.speed < 1e-4));
    assert!(matches!(
        asymptotic_translator(&flow, [1.0, 0.0], &[-10.0]),
        Err(Error::InsufficientHistory { .. })
    ));
}

#[test]
fn circle_arrival_time() {
    let flow = circle_flow();
    for k in 0..50 {
        let r = 0.5 + 1.4 * k as f64 / 49.0;
        let a = 0.37 * k as f64;
        let u = arrival_time(&flow, [r * a.cos(), r * a.sin()]).unwrap();
        assert!((u + 0.5 * r * r).abs() < 1e-4);
    }
    assert!(matches!(arrival_time(&flow, [2.5, 0.0]), Err(Error::OutOfSweep(..))));
    assert!(matches!(arrival_time(&flow, [0.1, 0.0]), Err(Error::OutOfSweep(..))));
    let field = arrival_time_field(&flow, &[[1.0, 0.2], [-0.8, 0.9]], 0.05).unwrap();
    for st in &field {
        assert_relative_eq!(st.hessian[0][0], -1.0, epsilon = 5e-3);
        assert_relative_eq!(st.hessian[1][1], -1.0, epsilon = 5e-3);
        assert!(st.hessian[0][1].abs() < 5e-3);
    }
    assert!(matches!(arrival_time_field(&flow, &[[1.0, 0.0]], 1e-3), Err(Error::StencilFailure(_))));
}

#[test]
fn oval_arrival_time_is_concave_along_segments() {
    let flow = oval_history();
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for k in 0..100 {
        let s = k as f64;
        let a = [1.4 * (0.7 * s).sin(), 30.0 * (1.3 * s).cos()];
        let b = [1.4 * (1.1 * s + 0.5).cos(), 30.0 * (0.9 * s).sin()];
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (ua, ub, um) = (arrival_time(&flow, a), arrival_time(&flow, b), arrival_time(&flow, mid));
        if let (Ok(ua), Ok(ub), Ok(um)) = (ua, ub, um) {
            worst = worst.min(um - 0.5 * (ua + ub));
            checked += 1;
        }
    }
    assert!(checked >= 50, "only {checked} segments inside the sweep");
    assert!(worst >= -1e-6, "{worst}");
}

#[test]
fn rescaling_maps_the_oval_to_itself() {
    let flow = oval_history();
    let scaled = parabolic_rescale(&flow, 0.5).unwrap();
    assert_relative_eq!(scaled.times()[0], -50.0);
    let a = flow.slice_at(-8.0, 0.0).unwrap();
    let b = scaled.slice_at(-2.0, 0.0).unwrap();
    for (p, q) in a.points.iter().zip(&b.points) {
        assert_relative_eq!(0.5 * p[0], q[0], epsilon = 1e-12);
        assert_relative_eq!(0.5 * p[1], q[1], epsilon = 1e-12);
    }
}
