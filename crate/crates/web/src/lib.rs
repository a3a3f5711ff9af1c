//! Browser bindings: an evolving ellipse with its Gaussian density, the
//! Angenent oval at a chosen time and the bowl soliton profile.

use mcflab::catalog::{bowl_profile, OvalAt};
use mcflab::diagnostics::density_profile;
use mcflab::engine::{evolve, StepPolicy};
use mcflab::geometry::embed;
use mcflab::translator::translator_blowdown;
use mcflab::SupportFunction;
use wasm_bindgen::prelude::*;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Curve shortening flow of an ellipse until just before it vanishes near
/// `t = -1`.
#[wasm_bindgen]
pub struct EllipseFlow {
    times: Vec<f64>,
    outlines: Vec<Vec<f64>>,
    theta: Vec<f64>,
}

impl EllipseFlow {
    pub fn run(a: f64, b: f64, n: usize) -> Result<Self, String> {
        if !(a > 0.0 && b > 0.0 && a.max(b) / a.min(b) <= 6.0) {
            return Err(format!("axes must be positive with ratio at most 6, got {a} and {b}"));
        }
        if !(64..=1024).contains(&n) {
            return Err(format!("grid size must lie in 64..=1024, got {n}"));
        }
        let lifespan = 0.5 * a * b;
        let t0 = -1.0 - lifespan;
        let policy = StepPolicy { frames_per_decade: 400.0, ..StepPolicy::default() };
        let h0 = SupportFunction::ellipse(n, a, b).map_err(|e| e.to_string())?;
        let flow = evolve(&h0, t0, t0 + 0.97 * lifespan, &policy).map_err(|e| e.to_string())?;
        let (x0, t_ext) = flow.extinction().map_err(|e| e.to_string())?;
        let theta = density_profile(&flow, x0, t_ext).map_err(|e| e.to_string())?;
        let outlines = flow
            .frames()
            .iter()
            .map(|h| embed(h).map(|s| s.points.iter().flatten().copied().collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Self { times: flow.times().to_vec(), outlines, theta })
    }
}

#[wasm_bindgen]
impl EllipseFlow {
    #[wasm_bindgen(constructor)]
    pub fn new(a: f64, b: f64, n: usize) -> Result<EllipseFlow, JsError> {
        Self::run(a, b, n).map_err(js)
    }

    pub fn frame_count(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    /// Interleaved `x, y` coordinates of frame `m`; empty past the last frame.
    pub fn outline(&self, m: usize) -> Vec<f64> {
        self.outlines.get(m).cloned().unwrap_or_default()
    }

    /// Gaussian density about the extinction point, one value per frame.
    pub fn theta(&self) -> Vec<f64> {
        self.theta.clone()
    }
}

pub fn oval_points(t: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(8..=4096).contains(&samples) {
        return Err(format!("sample count must lie in 8..=4096, got {samples}"));
    }
    let oval = OvalAt::new(t).map_err(|e| e.to_string())?;
    Ok((0..samples)
        .flat_map(|k| oval.point(std::f64::consts::TAU * k as f64 / samples as f64))
        .collect())
}

/// Interleaved `x, y` samples of the Angenent oval at time `t < 0`.
#[wasm_bindgen]
pub fn oval_outline(t: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    oval_points(t, samples).map_err(js)
}

/// Bowl soliton over `ℝⁿ` together with its blow-down.
#[wasm_bindgen]
pub struct Bowl {
    radii: Vec<f64>,
    heights: Vec<f64>,
    ratio: f64,
}

impl Bowl {
    pub fn solve(n: usize, r_max: f64) -> Result<Self, String> {
        if !(2..=4).contains(&n) || !(20.0..=500.0).contains(&r_max) {
            return Err(format!("need n in 2..=4 and r_max in [20, 500], got {n} and {r_max}"));
        }
        let p = bowl_profile(n, r_max, 1e-2).map_err(|e| e.to_string())?;
        let ratio = translator_blowdown(&p, 10.0 / r_max).map_err(|e| e.to_string())?.ratio;
        Ok(Self { radii: p.radii, heights: p.heights, ratio })
    }
}

#[wasm_bindgen]
impl Bowl {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, r_max: f64) -> Result<Bowl, JsError> {
        Self::solve(n, r_max).map_err(js)
    }

    pub fn radii(&self) -> Vec<f64> {
        self.radii.clone()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.heights.clone()
    }

    /// Blow-down neck radius over the cylinder radius; 1 for the cylinder.
    pub fn cylinder_ratio(&self) -> f64 {
        self.ratio
    }
}
