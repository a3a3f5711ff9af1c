//! Executes a scenario and collects its flow, diagnostics and summary values.

use std::collections::BTreeMap;

use mcflab::catalog::{angenent_oval_support, bowl_profile, grim_reaper, shrinking_circle, RadialProfile};
use mcflab::diagnostics::*;
use mcflab::engine::*;
use mcflab::translator::*;
use mcflab::{Result, SupportFunction};
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::config::{Initial, ScenarioConfig};

/// Everything a run persists.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub flow: Option<SupportFlow>,
    pub series: DiagnosticSeries,
    /// Header and rows of `profile.csv` for the translators.
    pub profile: Option<(Vec<&'static str>, Vec<Vec<f64>>)>,
    pub labels: BTreeMap<String, String>,
    pub constants: BTreeMap<String, f64>,
}

impl Outcome {
    fn constant(&mut self, key: &str, value: f64) {
        self.constants.insert(key.to_string(), value);
    }

    fn label(&mut self, key: &str, value: impl ToString) {
        self.labels.insert(key.to_string(), value.to_string());
    }
}

pub fn execute(config: &ScenarioConfig) -> Result<Outcome> {
    let n = config.resolution;
    let policy = StepPolicy { frames_per_decade: config.cadence, ..StepPolicy::default() };
    let mut out = Outcome::default();
    match &config.initial {
        Initial::Grim => return grim(out),
        Initial::Bowl { n, r_max } => return bowl(out, *n, *r_max),
        Initial::Oval { t0, engine: false } => {
            let flow = SupportFlow::from_ancient(AncientSolution::oval(), n, log_cadence(*t0, config.t_end, config.cadence))?;
            flow_constants(&mut out, &flow)?;
            oval_constants(&mut out, &flow, *t0)?;
            out.flow = Some(flow);
        }
        Initial::Oval { t0, engine: true } => {
            let flow = evolve(&angenent_oval_support(n, *t0)?, *t0, config.t_end, &policy)?;
            flow_constants(&mut out, &flow)?;
            let deviation = flow
                .times()
                .iter()
                .zip(flow.frames())
                .map(|(t, f)| {
                    let exact = angenent_oval_support(n, *t)?;
                    Ok(f.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            out.constant("catalog_deviation", deviation);
            out.flow = Some(flow);
        }
        Initial::Circle { t0 } => {
            let flow = evolve(&shrinking_circle(n, *t0)?, *t0, config.t_end, &policy)?;
            flow_constants(&mut out, &flow)?;
            circle_constants(&mut out, &flow, *t0, config.t_end)?;
            out.flow = Some(flow);
        }
        Initial::Ellipse { a, b, t0 } => {
            let flow = evolve(&SupportFunction::ellipse(n, *a, *b)?, *t0, config.t_end, &policy)?;
            flow_constants(&mut out, &flow)?;
            out.flow = Some(flow);
        }
        Initial::CustomSupport { values, t0 } => {
            let h0 = SupportFunction::new(values.clone())?;
            h0.check_convex()?;
            let flow = evolve(&h0, *t0, config.t_end, &policy)?;
            flow_constants(&mut out, &flow)?;
            out.flow = Some(flow);
        }
    }
    Ok(out)
}

/// Scales from 1 down to the smallest one the history supports.
fn blow_down_scales(flow: &SupportFlow, t_ext: f64) -> Vec<f64> {
    let smallest = (t_ext - flow.times()[0]).sqrt().recip() * (1.0 + 1e-9);
    let mut scales: Vec<f64> = Vec::new();
    for l in [1.0, 4.0 * smallest, 2.0 * smallest, smallest] {
        if l <= 1.0 && l >= smallest && scales.last().is_none_or(|prev| l < *prev) {
            scales.push(l);
        }
    }
    scales
}

fn flow_constants(out: &mut Outcome, flow: &SupportFlow) -> Result<()> {
    let (x0, t0) = flow.extinction()?;
    out.constant("extinction_time", t0);
    out.constant("extinction_x", x0[0]);
    out.constant("extinction_y", x0[1]);
    out.constant("frames", flow.len() as f64);
    let theta = density_profile(flow, x0, t0)?;
    out.constant("theta_initial", theta[0]);
    out.constant("theta_final", theta[theta.len() - 1]);
    out.constant("theta_drift", theta.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max));
    out.constant("max_increase", monotonicity_check(flow, x0, t0)?);
    if flow.len() >= 5 {
        out.constant("identity_mismatch", monotonicity_identity(flow, x0, t0)?);
    }
    out.constant("harnack_min", harnack_min(flow)?);
    let scales = blow_down_scales(flow, t0);
    if !scales.is_empty() {
        let b = blow_down(flow, &scales)?;
        out.constant("blowdown_theta", b.samples[b.samples.len() - 1].1);
        out.constant("blowdown_lambda", b.samples[b.samples.len() - 1].0);
        out.label("blowdown", b.label);
    }
    let mut series = rigidity_series(flow)?;
    series.merge(density_series(flow)?)?;
    let channel = |name: &str| series.channel(name).unwrap_or(&[]).to_vec();
    let (diam, type_one, ecc, width) = (channel("rescaled_diam"), channel("typeI"), channel("eccentricity"), channel("width_min"));
    out.constant("rescaled_diam_initial", diam[0]);
    out.constant("rescaled_diam_final", diam[diam.len() - 1]);
    out.constant("typeI_final", type_one[type_one.len() - 1]);
    out.constant("eccentricity_final", ecc[ecc.len() - 1]);
    out.constant("width_min_max", width.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    out.series = series;
    Ok(())
}

fn circle_constants(out: &mut Outcome, flow: &SupportFlow, t0: f64, t_end: f64) -> Result<()> {
    let mut radius_error: f64 = 0.0;
    for (t, f) in flow.times().iter().zip(flow.frames()) {
        let r = (-2.0 * t).sqrt();
        radius_error = f.values().iter().fold(radius_error, |e, h| e.max((h / r - 1.0).abs()));
    }
    out.constant("radius_error", radius_error);
    let (r_first, r_last) = ((-2.0 * t0).sqrt(), (-2.0 * t_end).sqrt());
    if 1.2 * r_last >= 0.93 * r_first {
        return Ok(());
    }
    let mut rng = StdRng::seed_from_u64(3);
    let samples: Vec<[f64; 2]> = (0..100)
        .map(|_| {
            let r = rng.gen_range(1.2 * r_last..0.93 * r_first);
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let closed_form = samples
        .iter()
        .map(|p| arrival_time(flow, *p).map(|u| (u + 0.5 * (p[0] * p[0] + p[1] * p[1])).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.constant("arrival_closed_form_error", closed_form);
    arrival_constants(out, flow, &samples, 0.05)
}

fn arrival_constants(out: &mut Outcome, flow: &SupportFlow, samples: &[[f64; 2]], spacing: f64) -> Result<()> {
    let report = arrival_hessian_check(flow, samples, spacing)?;
    out.constant("arrival_max_eigenvalue", report.max_eigenvalue);
    out.constant("arrival_samples", report.samples as f64);
    out.constant("level_set_residual", level_set_residual(&arrival_time_field(flow, samples, spacing)?)?);
    Ok(())
}

fn oval_constants(out: &mut Outcome, flow: &SupportFlow, t0: f64) -> Result<()> {
    match wang_claim1_check(flow, [1.0, 0.0]) {
        Ok(report) => {
            out.label("wang", "SlabLike");
            out.constant("wang_alpha", report.alpha_hat);
            out.constant("wang_early_deviation", report.early_deviation);
            let slack = gradient_estimate_check(flow, [1.0, 0.0], 0.25 * t0, 50)?;
            out.constant("gradient_slack_min", slack.iter().copied().fold(f64::INFINITY, f64::min));
        }
        // Too short a history to look like a slab; the claim does not apply.
        Err(mcflab::Error::NotSlabLike(_)) => out.label("wang", "NotSlabLike"),
        Err(e) => return Err(e),
    }
    let tip = asymptotic_translator(flow, [0.0, 1.0], &[t0])?;
    out.constant("tip_grim_distance", grim_tip_distance(&tip[0], [0.0, 1.0], 1.0));
    out.constant("tip_speed", tip[0].speed);
    let t_last = flow.times()[flow.len() - 1];
    if 0.75 * t0 >= 1.5 * t_last {
        return Ok(());
    }
    let mut rng = StdRng::seed_from_u64(7);
    let samples: Vec<[f64; 2]> = (0..100)
        .map(|_| {
            let u = rng.gen_range(0.75 * t0..1.5 * t_last);
            let x: f64 = rng.gen_range(-1.45..1.45);
            let reach = (x.cos().ln() - u).acosh();
            [x, reach * rng.gen_range(-0.95..0.95)]
        })
        .collect();
    arrival_constants(out, flow, &samples, 1e-2)
}

fn grim(mut out: Outcome) -> Result<Outcome> {
    let xs: Vec<f64> = (0..601).map(|i| -1.5 + 3.0 * i as f64 / 600.0).collect();
    let slice = grim_reaper(0.0, &xs)?;
    out.constant("translator_residual", translator_residual(&slice, [0.0, 1.0]));
    out.profile = Some((vec!["x", "y"], slice.points.iter().map(|p| p.to_vec()).collect()));
    let sample = TranslatorSample::new(mcflab::catalog::grim_reaper_by_height(0.0, 40.0, 0.1)?, [0.0, 1.0])?;
    let class = slab_classify(&sample, SLAB_HORIZON)?;
    out.constant("slab_width", class.width());
    out.label("slab", match class {
        SlabClass::Entire => "Entire",
        SlabClass::Slab(_) => "Slab",
    });
    let theta = grim_blowdown_density(0.02)?;
    out.constant("blowdown_theta", theta);
    out.label("blowdown", BlowDownLabel::classify(theta));
    Ok(out)
}

fn bowl_residual(p: &RadialProfile) -> Result<f64> {
    Ok(match p.dimension {
        2 => translator_residual(&revolve::<3>(p)?, [0.0, 0.0, 1.0]),
        3 => translator_residual(&revolve::<4>(p)?, [0.0, 0.0, 0.0, 1.0]),
        _ => translator_residual(&revolve::<5>(p)?, [0.0, 0.0, 0.0, 0.0, 1.0]),
    })
}

fn bowl_entire(p: &RadialProfile) -> Result<SlabClass> {
    Ok(match p.dimension {
        2 => slab_classify(&TranslatorSample::new(revolve::<3>(p)?, [0.0, 0.0, 1.0])?, SLAB_HORIZON)?,
        3 => slab_classify(&TranslatorSample::new(revolve::<4>(p)?, [0.0, 0.0, 0.0, 1.0])?, SLAB_HORIZON)?,
        _ => slab_classify(&TranslatorSample::new(revolve::<5>(p)?, [0.0, 0.0, 0.0, 0.0, 1.0])?, SLAB_HORIZON)?,
    })
}

fn bowl(mut out: Outcome, n: usize, r_max: f64) -> Result<Outcome> {
    let p = bowl_profile(n, r_max, 1e-2)?;
    out.constant("translator_residual", bowl_residual(&p)?);
    out.constant("ode_residual", p.ode_residual());
    let far = p.heights[p.heights.len() - 1] / (r_max * r_max);
    out.constant("far_field", far);
    out.constant("far_field_error", far * 2.0 * (n as f64 - 1.0) - 1.0);
    let class = bowl_entire(&p)?;
    out.constant("slab_width", class.width());
    out.label("slab", match class {
        SlabClass::Entire => "Entire",
        SlabClass::Slab(_) => "Slab",
    });
    let b = translator_blowdown(&p, 10.0 / r_max)?;
    out.constant("blowdown_ratio", b.ratio);
    out.constant("blowdown_lambda", b.lambda);
    out.label("blowdown", b.label);
    let rows = (0..p.radii.len()).map(|j| vec![p.radii[j], p.heights[j], p.slopes[j]]).collect();
    out.profile = Some((vec!["r", "u", "du"], rows));
    Ok(out)
}
