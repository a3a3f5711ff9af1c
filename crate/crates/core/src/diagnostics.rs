//! Gaussian density, monotonicity, Harnack, arrival-time and rigidity
//! measurements over slices and flows.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use crate::catalog::OvalAt;
use crate::engine::{self, arrival_time_field, blow_down, AncientKind, ArrivalStencil, BlowDownLabel, SupportFlow};
use crate::error::{Error, Result};
use crate::geometry::{dot, measure_frame, DerivativeMode, Timeslice};

/// Named per-frame scalar channels sharing one time axis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticSeries {
    pub times: Vec<f64>,
    pub channels: BTreeMap<String, Vec<f64>>,
}

impl DiagnosticSeries {
    pub fn new(times: Vec<f64>) -> Self {
        Self { times, channels: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::InvalidGrid(format!(
                "channel {name} has {} values for {} times",
                values.len(),
                self.times.len()
            )));
        }
        self.channels.insert(name.to_string(), values);
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.get(name).map(Vec::as_slice)
    }

    /// Adds the channels of `other`, which must share the time axis.
    pub fn merge(&mut self, other: DiagnosticSeries) -> Result<()> {
        if other.times != self.times {
            return Err(Error::InvalidGrid("series have different time axes".into()));
        }
        self.channels.extend(other.channels);
        Ok(())
    }
}

fn backward_heat_kernel<const D: usize>(p: &[f64; D], x0: &[f64; D], tau: f64) -> f64 {
    let n = (D - 1) as f64;
    let r2: f64 = (0..D).map(|k| (p[k] - x0[k]).powi(2)).sum();
    (4.0 * PI * tau).powf(-0.5 * n) * (-r2 / (4.0 * tau)).exp()
}

fn check_before(time: f64, t0: f64) -> Result<f64> {
    if time >= t0 {
        return Err(Error::DomainError(format!("slice time {time} is not before basepoint time {t0}")));
    }
    Ok(t0 - time)
}

/// Gaussian area `Θ = ∫ Φ` of a slice about the space-time point `(x0, t0)`.
pub fn gaussian_density<const D: usize>(s: &Timeslice<D>, x0: [f64; D], t0: f64) -> Result<f64> {
    let tau = check_before(s.time, t0)?;
    Ok(s.points.iter().zip(&s.weights).map(|(p, w)| w * backward_heat_kernel(p, &x0, tau)).sum())
}

/// `∫ |H⃗ + (p - x0)^⊥ / (2(t0 - t))|² Φ`, the integrand of the monotonicity formula.
pub fn density_deficit<const D: usize>(s: &Timeslice<D>, x0: [f64; D], t0: f64) -> Result<f64> {
    let tau = check_before(s.time, t0)?;
    Ok((0..s.len())
        .map(|i| {
            let p = &s.points[i];
            let rel: [f64; D] = std::array::from_fn(|k| p[k] - x0[k]);
            let term = -s.curvature[i] + dot(&rel, &s.normals[i]) / (2.0 * tau);
            s.weights[i] * term * term * backward_heat_kernel(p, &x0, tau)
        })
        .sum())
}

/// `Θ(t_m)` for every frame of a flow.
pub fn density_profile(flow: &SupportFlow, x0: [f64; 2], t0: f64) -> Result<Vec<f64>> {
    (0..flow.len()).map(|m| gaussian_density(&flow.slice(m)?, x0, t0)).collect()
}

/// Largest increase `Θ(t_{m+1}) - Θ(t_m)` along the flow; never positive for
/// a curve shortening flow.
pub fn monotonicity_check(flow: &SupportFlow, x0: [f64; 2], t0: f64) -> Result<f64> {
    let slices = (0..flow.len()).map(|m| flow.slice(m)).collect::<Result<Vec<_>>>()?;
    monotonicity_check_slices(&slices, x0, t0)
}

/// As [`monotonicity_check`], for slices given in time order.
pub fn monotonicity_check_slices(slices: &[Timeslice], x0: [f64; 2], t0: f64) -> Result<f64> {
    let theta = slices.iter().map(|s| gaussian_density(s, x0, t0)).collect::<Result<Vec<_>>>()?;
    Ok(theta.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max))
}

/// Compares the five-point time derivative of `Θ` with `-deficit` at interior
/// frames. Returns the largest mismatch relative to the largest deficit, or
/// the absolute mismatch when the deficit is at rounding level.
pub fn monotonicity_identity(flow: &SupportFlow, x0: [f64; 2], t0: f64) -> Result<f64> {
    let theta = density_profile(flow, x0, t0)?;
    let deficit = (0..flow.len())
        .map(|m| density_deficit(&flow.slice(m)?, x0, t0))
        .collect::<Result<Vec<_>>>()?;
    let t = flow.times();
    if t.len() < 5 {
        return Err(Error::InsufficientHistory { needed: 5.0, available: t.len() as f64 });
    }
    let scale = deficit.iter().copied().fold(0.0, f64::max);
    let mismatch = (2..t.len() - 2)
        .map(|m| {
            let nodes = &t[m - 2..=m + 2];
            let d: f64 = lagrange_slope(nodes, 2).iter().zip(&theta[m - 2..=m + 2]).map(|(w, v)| w * v).sum();
            (d + deficit[m]).abs()
        })
        .fold(0.0, f64::max);
    Ok(if scale > 1e-10 { mismatch / scale } else { mismatch })
}

/// Weights of the derivative at `nodes[at]` of the interpolating polynomial.
fn lagrange_slope(nodes: &[f64], at: usize) -> Vec<f64> {
    let x = nodes[at];
    (0..nodes.len())
        .map(|j| {
            if j == at {
                return (0..nodes.len()).filter(|&k| k != at).map(|k| 1.0 / (x - nodes[k])).sum();
            }
            let num: f64 = (0..nodes.len()).filter(|&k| k != j && k != at).map(|k| x - nodes[k]).product();
            let den: f64 = (0..nodes.len()).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product();
            num / den
        })
        .collect()
}

/// `c_1 Σ (i+1) e^{-i²}` with `c_1 = 2π`, the rescaled volume bound for curves.
pub fn gaussian_bound() -> f64 {
    TAU * (0..20).map(|i| (i + 1) as f64 * (-((i * i) as f64)).exp()).sum::<f64>()
}

/// Largest `τ^{-1/2} ∫ e^{-|y|²/τ}` over the τ grid, with the bound it must obey.
pub fn gaussian_bound_check(s: &Timeslice, tau_grid: &[f64]) -> Result<(f64, f64)> {
    if tau_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::DomainError("τ must be positive".into()));
    }
    let sup = tau_grid
        .iter()
        .map(|&tau| {
            let integral: f64 =
                s.points.iter().zip(&s.weights).map(|(p, w)| w * (-(p[0] * p[0] + p[1] * p[1]) / tau).exp()).sum();
            integral / tau.sqrt()
        })
        .fold(0.0, f64::max);
    Ok((sup, gaussian_bound()))
}

/// Smallest forward difference quotient of curvature in time at fixed normal.
pub fn harnack_min(flow: &SupportFlow) -> Result<f64> {
    if flow.len() < 2 {
        return Err(Error::InsufficientHistory { needed: 2.0, available: flow.len() as f64 });
    }
    let kappa = (0..flow.len()).map(|m| flow.curvature(m)).collect::<Result<Vec<_>>>()?;
    let t = flow.times();
    Ok((0..flow.len() - 1)
        .flat_map(|m| {
            let dt = t[m + 1] - t[m];
            kappa[m].iter().zip(&kappa[m + 1]).map(move |(a, b)| (b - a) / dt)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Largest eigenvalue of a symmetric 2×2 matrix.
fn max_eigenvalue(m: [[f64; 2]; 2]) -> f64 {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let diff = 0.5 * (m[0][0] - m[1][1]);
    mean + (diff * diff + m[0][1] * m[1][0]).sqrt()
}

/// Local curve data at the point where the flow passes through `p`:
/// outward normal angle, `κ`, `∂_θκ` and `∂_tκ` at fixed normal.
struct LocalCurvature {
    angle: f64,
    kappa: f64,
    kappa_theta: f64,
    kappa_time: f64,
}

fn local_curvature(flow: &SupportFlow, p: [f64; 2], u: f64) -> Result<LocalCurvature> {
    if let Some(sol) = flow.exact() {
        let lam = sol.scale;
        let q = [p[0] / lam, p[1] / lam];
        let tb = u / (lam * lam);
        return Ok(match sol.kind {
            AncientKind::ShrinkingCircle => {
                let r = (-2.0 * tb).sqrt();
                LocalCurvature { angle: q[1].atan2(q[0]), kappa: 1.0 / r, kappa_theta: 0.0, kappa_time: r.powi(-3) }
            }
            AncientKind::AngenentOval => {
                let oval = OvalAt::new(tb)?;
                let angle = oval.normal_angle(q);
                LocalCurvature {
                    angle,
                    kappa: oval.curvature(angle),
                    kappa_theta: oval.curvature_theta(angle),
                    kappa_time: oval.curvature_time(angle),
                }
            }
        });
    }
    // Recorded flows: nearest frame and nearest normal, centered differences.
    let m = flow.nearest_frame(u).clamp(1, flow.len().saturating_sub(2));
    if flow.len() < 3 {
        return Err(Error::StencilFailure("need three frames for time differences".into()));
    }
    let frame = &flow.frames()[m];
    let n = frame.len();
    let i = (0..n)
        .max_by(|&a, &b| {
            let g = |j: usize| {
                let (s, c) = frame.theta(j).sin_cos();
                p[0] * c + p[1] * s - frame.values()[j]
            };
            g(a).total_cmp(&g(b))
        })
        .expect("grid is not empty");
    let kappa = flow.curvature(m)?;
    let before = flow.curvature(m - 1)?;
    let after = flow.curvature(m + 1)?;
    let t = flow.times();
    let step = frame.theta_step();
    Ok(LocalCurvature {
        angle: frame.theta(i),
        kappa: kappa[i],
        kappa_theta: (kappa[(i + 1) % n] - kappa[(i + n - 1) % n]) / (2.0 * step),
        kappa_time: (after[i] - before[i]) / (t[m + 1] - t[m - 1]),
    })
}

/// `D²u` from curvature data in the (tangent, normal) frame, rotated to
/// ambient coordinates.
fn hessian_from_curvature(c: &LocalCurvature) -> [[f64; 2]; 2] {
    let mixed = c.kappa_theta / c.kappa;
    // ∂_tκ along normal trajectories adds κ_s²/κ to the fixed-normal rate.
    let normal = -(c.kappa_time + c.kappa * c.kappa_theta * c.kappa_theta) / c.kappa.powi(3);
    let local = [[-1.0, mixed], [mixed, normal]];
    let (s, co) = c.angle.sin_cos();
    let frame = [[-s, co], [co, s]]; // rows: tangent, normal
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| frame[i][a] * local[i][j] * frame[j][b])
                .sum();
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct HessianReport {
    /// Largest eigenvalue of the curvature-formula Hessian over the samples.
    pub max_eigenvalue: f64,
    /// Largest eigenvalue of the finite-difference Hessian.
    pub max_eigenvalue_stencil: f64,
    /// Largest entrywise difference between the two estimators.
    pub max_discrepancy: f64,
    pub samples: usize,
}

/// Negative semidefiniteness of the arrival time Hessian at the samples,
/// assembled from curvature data and cross-checked against stencils.
pub fn arrival_hessian_check(flow: &SupportFlow, samples: &[[f64; 2]], spacing: f64) -> Result<HessianReport> {
    let stencils = arrival_time_field(flow, samples, spacing)?;
    let mut report = HessianReport {
        max_eigenvalue: f64::NEG_INFINITY,
        max_eigenvalue_stencil: f64::NEG_INFINITY,
        max_discrepancy: 0.0,
        samples: samples.len(),
    };
    for st in &stencils {
        let local = local_curvature(flow, st.point, st.u)?;
        let formula = hessian_from_curvature(&local);
        report.max_eigenvalue = report.max_eigenvalue.max(max_eigenvalue(formula));
        report.max_eigenvalue_stencil = report.max_eigenvalue_stencil.max(max_eigenvalue(st.hessian));
        for a in 0..2 {
            for b in 0..2 {
                report.max_discrepancy = report.max_discrepancy.max((formula[a][b] - st.hessian[a][b]).abs());
            }
        }
    }
    Ok(report)
}

/// Largest residual of `div(Du/|Du|) + 1/|Du| = 0` over the stencils.
pub fn level_set_residual(field: &[ArrivalStencil]) -> Result<f64> {
    field.iter().try_fold(0.0f64, |worst, st| {
        let [ux, uy] = st.gradient;
        let g = (ux * ux + uy * uy).sqrt();
        if g < 0.1 {
            return Err(Error::DegenerateGradient(g));
        }
        let [[uxx, uxy], [_, uyy]] = st.hessian;
        let div = ((uxx + uyy) * g * g - (ux * ux * uxx + 2.0 * ux * uy * uxy + uy * uy * uyy)) / g.powi(3);
        Ok(worst.max((div + 1.0 / g).abs()))
    })
}

/// Type-I quantity, rescaled diameter, eccentricity, pinching and the basic
/// measurements for every frame. Times are measured from the extinction
/// estimate.
pub fn rigidity_series(flow: &SupportFlow) -> Result<DiagnosticSeries> {
    let (_, t_ext) = flow.extinction()?;
    let mut series = DiagnosticSeries::new(flow.times().to_vec());
    let mut cols: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for m in 0..flow.len() {
        let slice = flow.slice(m)?;
        let meas = measure_frame(&flow.frames()[m], &slice);
        let kmax = flow.curvature(m)?.into_iter().fold(0.0, f64::max);
        let remaining = t_ext - flow.times()[m];
        if !(remaining > 0.0) {
            return Err(Error::DomainError(format!("frame {m} is at or past extinction")));
        }
        let root = remaining.sqrt();
        let row = [
            ("typeI", root * kmax),
            ("rescaled_diam", meas.diameter / root),
            ("eccentricity", meas.eccentricity()),
            ("pinching", 1.0),
            ("width_min", meas.width_min),
            ("width_max", meas.width_max),
            ("diameter", meas.diameter),
            ("inradius", meas.inradius),
            ("circumradius", meas.circumradius),
        ];
        for (name, value) in row {
            cols.entry(name).or_default().push(value);
        }
    }
    for (name, values) in cols {
        series.insert(name, values)?;
    }
    Ok(series)
}

/// Gaussian density, deficit and Harnack channels about the extinction point.
pub fn density_series(flow: &SupportFlow) -> Result<DiagnosticSeries> {
    let (x0, t0) = flow.extinction()?;
    let mut series = DiagnosticSeries::new(flow.times().to_vec());
    let mut theta = Vec::with_capacity(flow.len());
    let mut deficit = Vec::with_capacity(flow.len());
    for m in 0..flow.len() {
        let s = flow.slice(m)?;
        theta.push(gaussian_density(&s, x0, t0)?);
        deficit.push(density_deficit(&s, x0, t0)?);
    }
    series.insert("gaussian_density", theta)?;
    series.insert("density_deficit", deficit)?;
    let kappa = (0..flow.len()).map(|m| flow.curvature(m)).collect::<Result<Vec<_>>>()?;
    let t = flow.times();
    let harnack: Vec<f64> = (0..flow.len())
        .map(|m| {
            let (a, b) = if m + 1 < flow.len() { (m, m + 1) } else { (m.saturating_sub(1), m) };
            if a == b {
                return f64::NAN;
            }
            kappa[a].iter().zip(&kappa[b]).map(|(x, y)| (y - x) / (t[b] - t[a])).fold(f64::INFINITY, f64::min)
        })
        .collect();
    series.insert("harnack_min", harnack)?;
    Ok(series)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WangReport {
    /// `inf_t d(t)·v(0,t)/(-t)`.
    pub alpha_hat: f64,
    /// `d(t)·v(0,t)/(-t)` per frame.
    pub alpha: Vec<f64>,
    /// Largest relative deviation from π over the earliest half of frames.
    pub early_deviation: f64,
}

/// Width `v(0,t)` along the slab normal through the extinction point and the
/// distance `d(t)` from that point to the boundary in the orthogonal
/// direction, combined as `d·v/(-t)`.
pub fn wang_claim1_check(flow: &SupportFlow, slab_normal: [f64; 2]) -> Result<WangReport> {
    require_slab(flow)?;
    let (x0, t0) = flow.extinction()?;
    let perp = [-slab_normal[1], slab_normal[0]];
    let alpha = (0..flow.len())
        .map(|m| {
            let s = flow.slice(m)?;
            let (v, d) = width_and_reach(&s, x0, slab_normal, perp)?;
            Ok(d * v / (t0 - flow.times()[m]))
        })
        .collect::<Result<Vec<f64>>>()?;
    let alpha_hat = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    let half = alpha.len().div_ceil(2);
    let early_deviation = alpha[..half].iter().map(|a| (a - PI).abs() / PI).fold(0.0, f64::max);
    Ok(WangReport { alpha_hat, alpha, early_deviation })
}

fn width_and_reach(s: &Timeslice, x0: [f64; 2], normal: [f64; 2], perp: [f64; 2]) -> Result<(f64, f64)> {
    let miss = || Error::DomainError("centre lies outside the slice".into());
    let v = s.chord(x0, normal).ok_or_else(miss)?;
    let up = s.ray_exit(x0, perp).ok_or_else(miss)?;
    let down = s.ray_exit(x0, [-perp[0], -perp[1]]).ok_or_else(miss)?;
    Ok((v, up.min(down)))
}

fn require_slab(flow: &SupportFlow) -> Result<()> {
    let (_, t0) = flow.extinction()?;
    let lam_min = 1.0 / (t0 - flow.times()[0]).sqrt();
    let lambdas: Vec<f64> = [4.0, 2.0, 1.0].iter().map(|k| (k * lam_min).min(1.0)).collect();
    let mut lambdas = lambdas;
    lambdas.dedup();
    let label = blow_down(flow, &lambdas)?.label;
    if label != BlowDownLabel::PlaneMult2 {
        return Err(Error::NotSlabLike(format!("blow-down is {label}")));
    }
    Ok(())
}

/// Slack `v(y)/(d - |y|) - |∂_y v(y)|` of the width gradient estimate at
/// `samples` evenly spread offsets `|y| ≤ 0.9 d`, at the frame nearest `t`.
pub fn gradient_estimate_check(flow: &SupportFlow, slab_normal: [f64; 2], t: f64, samples: usize) -> Result<Vec<f64>> {
    require_slab(flow)?;
    let (x0, _) = flow.extinction()?;
    let s = match flow.exact() {
        Some(_) => flow.slice_at(t, 0.0)?,
        None => flow.slice(flow.nearest_frame(t))?,
    };
    let perp = [-slab_normal[1], slab_normal[0]];
    let (_, d) = width_and_reach(&s, x0, slab_normal, perp)?;
    let width = |y: f64| -> Result<f64> {
        let c = [x0[0] + y * perp[0], x0[1] + y * perp[1]];
        s.chord(c, slab_normal).ok_or_else(|| Error::DomainError(format!("offset {y} leaves the slice")))
    };
    let delta = 0.5f64.min(0.01 * d);
    (0..samples)
        .map(|k| {
            let y = -0.9 * d + 1.8 * d * k as f64 / (samples - 1).max(1) as f64;
            let v = width(y)?;
            let dv = (width(y + delta)? - width(y - delta)?) / (2.0 * delta);
            Ok(v / (d - y.abs()) - dv.abs())
        })
        .collect()
}

/// Derivative mode used for curvature of recorded frames.
pub const FRAME_DERIVATIVES: DerivativeMode = engine::ENGINE_DERIVATIVES;
