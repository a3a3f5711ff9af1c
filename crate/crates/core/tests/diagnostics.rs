use approx::assert_relative_eq;
use mcflab::catalog::shrinking_circle;
use mcflab::diagnostics::*;
use mcflab::engine::*;
use mcflab::geometry::{embed, Timeslice};
use mcflab::{Error, SupportFunction};
use rand::{rngs::StdRng, Rng, SeedableRng};

fn at_time(h: &SupportFunction, t: f64) -> Timeslice {
    let mut s = embed(h).unwrap();
    s.time = t;
    s
}

fn line(offset: f64, t: f64) -> Timeslice {
    let n = 20001;
    let half = 60.0;
    let dy = 2.0 * half / (n - 1) as f64;
    let points = (0..n).map(|i| [offset, -half + i as f64 * dy]).collect();
    let mut weights = vec![dy; n];
    weights[0] *= 0.5;
    weights[n - 1] *= 0.5;
    Timeslice::new(t, points, vec![[1.0, 0.0]; n], vec![0.0; n], weights).unwrap()
}

fn circle_flow() -> SupportFlow {
    let h0 = shrinking_circle(256, -2.0).unwrap();
    evolve(&h0, -2.0, -0.1, &StepPolicy::default()).unwrap()
}

fn ellipse_flow() -> SupportFlow {
    let h0 = SupportFunction::ellipse(256, 2.0 * 2f64.sqrt(), 2f64.sqrt()).unwrap();
    evolve(&h0, -2.0, -0.2, &StepPolicy::default()).unwrap()
}

fn oval_flow() -> SupportFlow {
    SupportFlow::from_ancient(AncientSolution::oval(), 256, log_cadence(-200.0, -1.0, 100.0)).unwrap()
}

#[test]
fn density_fixtures() {
    assert_relative_eq!(gaussian_density(&line(0.0, -1.0), [0.0, 0.0], 0.0).unwrap(), 1.0, epsilon = 1e-10);
    let circle = at_time(&shrinking_circle(256, -1.0).unwrap(), -1.0);
    assert_relative_eq!(gaussian_density(&circle, [0.0, 0.0], 0.0).unwrap(), 1.520_346_901_066_281, epsilon = 1e-12);
    assert!(gaussian_density(&circle, [0.0, 10.0 * 2f64.sqrt()], 0.0).unwrap() < 1e-8);
    // Two parallel lines much closer than the Gaussian scale look like a double plane.
    let pair = line(-0.01, -1.0).union(&line(0.01, -1.0));
    let theta = gaussian_density(&pair, [0.0, 0.0], 0.0).unwrap();
    assert_eq!(BlowDownLabel::classify(theta), BlowDownLabel::PlaneMult2);
    assert!(matches!(gaussian_density(&circle, [0.0, 0.0], -1.0), Err(Error::DomainError(_))));
}

#[test]
fn ellipse_density_and_deficit_match_quadrature_oracle() {
    let s = at_time(&SupportFunction::ellipse(512, 2.0, 1.0).unwrap(), -1.0);
    assert_relative_eq!(gaussian_density(&s, [0.0, 0.0], 0.0).unwrap(), 1.6033502303743197, epsilon = 1e-9);
    let deficit = density_deficit(&s, [0.0, 0.0], 0.0).unwrap();
    assert!(deficit > 1e-3);
    assert_relative_eq!(deficit, 0.16167897632464437, epsilon = 1e-9);
}

#[test]
fn deficit_vanishes_exactly_on_centred_shrinkers() {
    let t = -0.7;
    let r = (-2.0f64 * t).sqrt();
    let exact = at_time(&SupportFunction::constant(256, r).unwrap(), t);
    assert!(density_deficit(&exact, [0.0, 0.0], 0.0).unwrap() < 1e-10);
    let wrong_radius = at_time(&SupportFunction::constant(256, 1.01 * r).unwrap(), t);
    assert!(density_deficit(&wrong_radius, [0.0, 0.0], 0.0).unwrap() > 1e-10);
    let offset = at_time(&SupportFunction::constant(256, r).unwrap().translated([1.0, 0.0]), t);
    assert!(density_deficit(&offset, [0.0, 0.0], 0.0).unwrap() > 1e-10);
}

#[test]
fn density_is_rotation_invariant_and_additive() {
    let h = SupportFunction::ellipse(256, 2.0, 1.0).unwrap().translated([0.3, -0.2]);
    let theta = gaussian_density(&at_time(&h, -1.0), [0.0, 0.0], 0.0).unwrap();
    for k in [1, 7, 64] {
        let rotated = gaussian_density(&at_time(&h.rotated(k), -1.0), [0.0, 0.0], 0.0).unwrap();
        assert!((rotated - theta).abs() < 1e-10);
    }
    let a = at_time(&SupportFunction::constant(128, 1.0).unwrap(), -1.0);
    let b = at_time(&SupportFunction::constant(128, 0.5).unwrap().translated([5.0, 0.0]), -1.0);
    let sum = gaussian_density(&a, [0.0, 0.0], 0.0).unwrap() + gaussian_density(&b, [0.0, 0.0], 0.0).unwrap();
    assert_relative_eq!(gaussian_density(&a.union(&b), [0.0, 0.0], 0.0).unwrap(), sum, epsilon = 1e-14);
}

#[test]
fn monotonicity_on_engine_flows() {
    let circle = circle_flow();
    let (x0, t0) = circle.extinction().unwrap();
    let theta = density_profile(&circle, x0, t0).unwrap();
    assert!(theta.windows(2).all(|w| (w[1] - w[0]).abs() < 1e-8));

    let ellipse = ellipse_flow();
    let (x0, t0) = ellipse.extinction().unwrap();
    assert!(monotonicity_check(&ellipse, x0, t0).unwrap() <= 1e-8);
    let theta = density_profile(&ellipse, x0, t0).unwrap();
    assert!(theta[0] - theta[theta.len() - 1] > 1e-3);
    assert!(theta.iter().all(|v| *v >= 1.0 - 1e-6));
    assert!(monotonicity_identity(&ellipse, x0, t0).unwrap() < 2e-3);

    let mut reversed: Vec<Timeslice> = (0..ellipse.len()).map(|m| ellipse.slice(m).unwrap()).collect();
    reversed.reverse();
    assert!(monotonicity_check_slices(&reversed, x0, t0).unwrap() > 0.0);
}

#[test]
fn rescaled_volume_bound() {
    let bound = gaussian_bound();
    assert_relative_eq!(bound, 11.254441528406731, epsilon = 1e-12);
    let taus = [0.1, 1.0, 10.0];
    let unit = embed(&SupportFunction::constant(256, 1.0).unwrap()).unwrap();
    let (sup, b) = gaussian_bound_check(&unit, &taus).unwrap();
    assert!(sup <= b);
    let (sup, _) = gaussian_bound_check(&line(0.0, 0.0), &taus).unwrap();
    assert_relative_eq!(sup, std::f64::consts::PI.sqrt(), epsilon = 1e-9);
    let ellipse = embed(&SupportFunction::ellipse(256, 2.0, 1.0).unwrap()).unwrap();
    assert!(gaussian_bound_check(&ellipse, &taus).unwrap().0 <= bound);
    assert!(gaussian_bound_check(&unit, &[0.0]).is_err());
}

#[test]
fn harnack_on_ancient_flows() {
    let circle = circle_flow();
    let t = circle.times();
    let expected = ((-2.0 * t[1]).powf(-0.5) - (-2.0 * t[0]).powf(-0.5)) / (t[1] - t[0]);
    let min = harnack_min(&circle).unwrap();
    assert!(min > 0.0);
    assert_relative_eq!(min, expected, max_relative = 1e-4);
    assert!(harnack_min(&oval_flow()).unwrap() >= -1e-8);
}

fn random_oval_samples(count: usize) -> Vec<[f64; 2]> {
    let mut rng = StdRng::seed_from_u64(7);
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen_range(-150.0..-1.5);
            let x: f64 = rng.gen_range(-1.45..1.45);
            let reach = (x.cos().ln() - u).acosh();
            [x, reach * rng.gen_range(-0.95..0.95)]
        })
        .collect()
}

#[test]
fn arrival_time_hessian_is_negative_semidefinite() {
    let circle = circle_flow();
    let mut rng = StdRng::seed_from_u64(3);
    let samples: Vec<[f64; 2]> = (0..100)
        .map(|_| {
            let r: f64 = rng.gen_range(0.6..1.85);
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let report = arrival_hessian_check(&circle, &samples, 0.05).unwrap();
    assert_relative_eq!(report.max_eigenvalue, -1.0, epsilon = 1e-3);
    assert!(report.max_discrepancy < 5e-3);

    let oval = oval_flow();
    let report = arrival_hessian_check(&oval, &random_oval_samples(100), 1e-2).unwrap();
    assert!(report.max_eigenvalue <= 1e-6);
    assert!(report.max_eigenvalue_stencil <= 1e-6);
    assert!(report.max_discrepancy < 5e-3, "{report:?}");
}

#[test]
fn level_set_equation() {
    let field = arrival_time_field(&oval_flow(), &random_oval_samples(60), 1e-2).unwrap();
    assert!(level_set_residual(&field).unwrap() <= 5e-3);
    let ancient_circle = SupportFlow::from_ancient(AncientSolution::circle(), 64, vec![-4.0, -1.0]).unwrap();
    let centre = arrival_time_field(&ancient_circle, &[[0.0, 0.0]], 1e-2).unwrap();
    assert!(matches!(level_set_residual(&centre), Err(Error::DegenerateGradient(_))));
}

#[test]
fn rigidity_channels() {
    let series = rigidity_series(&circle_flow()).unwrap();
    let check = |name: &str, target: f64, tol: f64| {
        let values = series.channel(name).unwrap();
        assert_eq!(values.len(), series.times.len());
        assert!(values.iter().all(|v| (v - target).abs() <= tol), "{name}");
    };
    check("rescaled_diam", 2.0 * 2f64.sqrt(), 1e-4);
    check("typeI", 0.5f64.sqrt(), 1e-4);
    check("eccentricity", 1.0, 1e-6);
    check("pinching", 1.0, 0.0);

    let oval = rigidity_series(&oval_flow()).unwrap();
    assert!(oval.channel("rescaled_diam").unwrap()[0] > 10.0);
}

#[test]
fn rigidity_channels_are_rotation_and_scale_invariant() {
    let policy = StepPolicy::default();
    let h0 = SupportFunction::ellipse(256, 2.0, 1.0).unwrap();
    let base = rigidity_series(&evolve(&h0, -2.0, -1.3, &policy).unwrap()).unwrap();
    let turned = rigidity_series(&evolve(&h0.rotated(32), -2.0, -1.3, &policy).unwrap()).unwrap();
    let scaled = rigidity_series(&mcflab::geometry::parabolic_rescale(&evolve(&h0, -2.0, -1.3, &policy).unwrap(), 2.0).unwrap()).unwrap();
    for name in ["typeI", "rescaled_diam", "eccentricity"] {
        for (a, b) in base.channel(name).unwrap().iter().zip(turned.channel(name).unwrap()) {
            assert_relative_eq!(a, b, max_relative = 1e-6);
        }
        for (a, b) in base.channel(name).unwrap().iter().zip(scaled.channel(name).unwrap()) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }
    for (a, b) in base.channel("width_min").unwrap().iter().zip(scaled.channel("width_min").unwrap()) {
        assert_relative_eq!(2.0 * a, b, max_relative = 1e-12);
    }
}

#[test]
fn wang_dichotomy_on_the_oval() {
    let oval = oval_flow();
    let widths = rigidity_series(&oval).unwrap();
    assert!(widths.channel("width_min").unwrap().iter().all(|w| *w <= std::f64::consts::PI));
    let report = wang_claim1_check(&oval, [1.0, 0.0]).unwrap();
    assert!(report.alpha_hat > 0.0);
    assert!(report.early_deviation < 0.1);
    let slack = gradient_estimate_check(&oval, [1.0, 0.0], -50.0, 50).unwrap();
    assert_eq!(slack.len(), 50);
    assert!(slack.iter().all(|s| *s >= 0.0));
    assert!(matches!(wang_claim1_check(&circle_flow(), [1.0, 0.0]), Err(Error::NotSlabLike(_))));
}

#[test]
fn density_series_channels_share_the_time_axis() {
    let series = density_series(&ellipse_flow()).unwrap();
    for name in ["gaussian_density", "density_deficit", "harnack_min"] {
        assert_eq!(series.channel(name).unwrap().len(), series.times.len());
    }
}
