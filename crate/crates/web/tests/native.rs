use mcflab_web::{oval_points, Bowl, EllipseFlow};

#[test]
fn ellipse_flow_rounds_off_with_decreasing_density() {
    let flow = EllipseFlow::run(2.0, 1.0, 128).unwrap();
    let n = flow.frame_count();
    assert!(n > 10);
    assert_eq!(flow.times().len(), n);
    assert_eq!(flow.outline(0).len(), 2 * 128);
    assert!(flow.outline(n).is_empty());
    let theta = flow.theta();
    assert!(theta.windows(2).all(|w| w[1] <= w[0] + 1e-8));
    let extent = |pts: &[f64], k: usize| pts.iter().skip(k).step_by(2).fold(0.0f64, |m, v| m.max(v.abs()));
    let last = flow.outline(n - 1);
    assert!(extent(&last, 0) / extent(&last, 1) < 2.0);
}

#[test]
fn rejects_bad_input() {
    assert!(EllipseFlow::run(-1.0, 1.0, 128).is_err());
    assert!(EllipseFlow::run(1.0, 1.0, 8).is_err());
    assert!(oval_points(0.5, 64).is_err());
    assert!(oval_points(-1.0, 2).is_err());
    assert!(Bowl::solve(5, 100.0).is_err());
}

#[test]
fn oval_stays_in_its_slab() {
    let pts = oval_points(-20.0, 256).unwrap();
    assert_eq!(pts.len(), 512);
    assert!(pts.iter().step_by(2).all(|x| x.abs() <= std::f64::consts::FRAC_PI_2));
}

#[test]
fn bowl_blows_down_to_the_cylinder() {
    let bowl = Bowl::solve(2, 200.0).unwrap();
    assert_eq!(bowl.radii().len(), bowl.heights().len());
    assert!((bowl.cylinder_ratio() - 1.0).abs() < 0.05);
}
