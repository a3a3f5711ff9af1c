//! Curve shortening flow in the Gauss map parametrisation.
//!
//! The support function of a convex curve moving by curve shortening flow
//! satisfies `∂_t h = -1/(h + h'')`. The engine integrates this with an
//! L-stable two-stage SDIRK scheme; second differences in θ are centered,
//! so each Newton iteration is a cyclic tridiagonal solve.

use std::f64::consts::{PI, TAU};

use crate::catalog::{self, OvalAt};
use crate::diagnostics::gaussian_density;
use crate::error::{Error, Result};
use crate::geometry::{embed, embed_with, DerivativeMode, SupportFunction, Timeslice};

const GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    /// Largest admissible step is `cfl · min(h + h'')²`.
    pub cfl: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Consecutive step halvings tolerated before a rejection is escalated.
    pub max_halvings: usize,
    /// Recorded frames per decade of `-t`.
    pub frames_per_decade: f64,
    /// Evolution stops once `min h` falls below this value.
    pub extinction_floor: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            cfl: 0.25,
            rtol: 1e-7,
            atol: 1e-9,
            max_halvings: 40,
            frames_per_decade: 100.0,
            extinction_floor: 1e-3,
        }
    }
}

/// Explicit ancient solutions that a flow can carry alongside its frames.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AncientKind {
    ShrinkingCircle,
    AngenentOval,
}

/// An explicit ancient solution, parabolically rescaled by `scale`:
/// `M^λ_t = λ M_{t/λ²}`. Both are extinct at the space-time origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AncientSolution {
    pub kind: AncientKind,
    pub scale: f64,
}

impl AncientSolution {
    pub fn circle() -> Self {
        Self { kind: AncientKind::ShrinkingCircle, scale: 1.0 }
    }

    pub fn oval() -> Self {
        Self { kind: AncientKind::AngenentOval, scale: 1.0 }
    }

    fn base_time(&self, t: f64) -> f64 {
        t / (self.scale * self.scale)
    }

    pub fn point(&self, theta: f64, t: f64) -> Result<[f64; 2]> {
        let tb = self.base_time(t);
        let p = match self.kind {
            AncientKind::ShrinkingCircle => {
                let r = (-2.0 * tb).sqrt();
                [r * theta.cos(), r * theta.sin()]
            }
            AncientKind::AngenentOval => OvalAt::new(tb)?.point(theta),
        };
        Ok([self.scale * p[0], self.scale * p[1]])
    }

    pub fn support(&self, theta: f64, t: f64) -> Result<f64> {
        let tb = self.base_time(t);
        let h = match self.kind {
            AncientKind::ShrinkingCircle => (-2.0 * tb).sqrt(),
            AncientKind::AngenentOval => OvalAt::new(tb)?.support(theta),
        };
        Ok(self.scale * h)
    }

    pub fn curvature(&self, theta: f64, t: f64) -> Result<f64> {
        let tb = self.base_time(t);
        let k = match self.kind {
            AncientKind::ShrinkingCircle => 1.0 / (-2.0 * tb).sqrt(),
            AncientKind::AngenentOval => OvalAt::new(tb)?.curvature(theta),
        };
        Ok(k / self.scale)
    }

    pub fn support_grid(&self, n: usize, t: f64) -> Result<SupportFunction> {
        let tb = self.base_time(t);
        if tb >= 0.0 {
            return Err(Error::DomainError(format!("time {t} is not before extinction")));
        }
        let base = match self.kind {
            AncientKind::ShrinkingCircle => catalog::shrinking_circle(n, tb)?,
            AncientKind::AngenentOval => catalog::angenent_oval_support(n, tb)?,
        };
        Ok(base.scaled(self.scale))
    }

    /// Boundary samples at time `t`, with `angle_samples` normal directions.
    pub fn slice(&self, t: f64, angle_samples: usize) -> Result<Timeslice> {
        let tb = self.base_time(t);
        let base = match self.kind {
            AncientKind::ShrinkingCircle => {
                let h = catalog::shrinking_circle(angle_samples.max(16).div_ceil(2) * 2, tb)?;
                embed(&h)?
            }
            AncientKind::AngenentOval => OvalAt::new(tb)?.slice(angle_samples)?,
        };
        let mut s = base.scaled(self.scale);
        s.time = t;
        Ok(s)
    }

    /// Exact arrival time `u(p)` (the time at which `p` lies on the curve).
    pub fn arrival_time(&self, p: [f64; 2]) -> Option<f64> {
        let q = [p[0] / self.scale, p[1] / self.scale];
        let u = match self.kind {
            AncientKind::ShrinkingCircle => Some(-0.5 * (q[0] * q[0] + q[1] * q[1])),
            AncientKind::AngenentOval => OvalAt::arrival_time(q),
        }?;
        Some(u * self.scale * self.scale)
    }
}

/// A curve shortening flow recorded as support-function frames at
/// increasing times. Flows built from an explicit solution keep it, so that
/// slices and curvatures can be evaluated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportFlow {
    times: Vec<f64>,
    frames: Vec<SupportFunction>,
    exact: Option<AncientSolution>,
}

impl SupportFlow {
    pub fn from_frames(times: Vec<f64>, frames: Vec<SupportFunction>) -> Result<Self> {
        if times.is_empty() || times.len() != frames.len() {
            return Err(Error::InvalidGrid("flow needs one frame per time".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("flow times must increase".into()));
        }
        let n = frames[0].len();
        if frames.iter().any(|f| f.len() != n) {
            return Err(Error::InvalidGrid("flow frames differ in resolution".into()));
        }
        Ok(Self { times, frames, exact: None })
    }

    /// Samples an explicit ancient solution at the given times.
    pub fn from_ancient(solution: AncientSolution, resolution: usize, times: Vec<f64>) -> Result<Self> {
        let frames = times
            .iter()
            .map(|&t| solution.support_grid(resolution, t))
            .collect::<Result<Vec<_>>>()?;
        let mut flow = Self::from_frames(times, frames)?;
        flow.exact = Some(solution);
        Ok(flow)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[SupportFunction] {
        &self.frames
    }

    pub fn exact(&self) -> Option<&AncientSolution> {
        self.exact.as_ref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.frames[0].len()
    }

    pub(crate) fn rescaled(&self, lambda: f64) -> Self {
        Self {
            times: self.times.iter().map(|t| lambda * lambda * t).collect(),
            frames: self.frames.iter().map(|f| f.scaled(lambda)).collect(),
            exact: self.exact.map(|s| AncientSolution { scale: s.scale * lambda, ..s }),
        }
    }

    /// Boundary samples of frame `m`.
    pub fn slice(&self, m: usize) -> Result<Timeslice> {
        match &self.exact {
            Some(sol) => sol.slice(self.times[m], self.resolution()),
            None => {
                let mut s = embed_with(&self.frames[m], ENGINE_DERIVATIVES)?;
                s.time = self.times[m];
                Ok(s)
            }
        }
    }

    /// Boundary samples at time `t`: exact for explicit solutions, otherwise
    /// the frame closest in time (which must lie within `rel_tol·|t|`).
    pub fn slice_at(&self, t: f64, rel_tol: f64) -> Result<Timeslice> {
        if let Some(sol) = &self.exact {
            return sol.slice(t, self.resolution());
        }
        let m = self.nearest_frame(t);
        if (self.times[m] - t).abs() > rel_tol * t.abs() {
            return Err(Error::InsufficientHistory { needed: t, available: self.times[0] });
        }
        self.slice(m)
    }

    pub fn nearest_frame(&self, t: f64) -> usize {
        (0..self.len())
            .min_by(|&a, &b| (self.times[a] - t).abs().total_cmp(&(self.times[b] - t).abs()))
            .expect("flow is never empty")
    }

    /// Curvature on the θ grid of frame `m`.
    pub fn curvature(&self, m: usize) -> Result<Vec<f64>> {
        let frame = &self.frames[m];
        match &self.exact {
            Some(sol) => (0..frame.len()).map(|i| sol.curvature(frame.theta(i), self.times[m])).collect(),
            None => {
                let rho = frame.radius_of_curvature(ENGINE_DERIVATIVES);
                Ok(rho.iter().map(|r| 1.0 / r).collect())
            }
        }
    }

    /// Estimated extinction point and time. Explicit solutions are extinct
    /// at the space-time origin. Otherwise the point is the centroid of the
    /// last frame and the time follows from the area law `dA/dt = -2π`.
    pub fn extinction(&self) -> Result<([f64; 2], f64)> {
        if self.exact.is_some() {
            return Ok(([0.0, 0.0], 0.0));
        }
        let last = self.frames.last().expect("flow is never empty");
        let slice = embed_with(last, ENGINE_DERIVATIVES)?;
        let t = self.times.last().copied().unwrap_or_default();
        Ok((slice.centroid(), t + last.area_with(ENGINE_DERIVATIVES) / TAU))
    }

    /// Largest pointwise support decrease between consecutive frames.
    pub fn max_frame_displacement(&self) -> f64 {
        self.frames
            .windows(2)
            .flat_map(|w| w[0].values().iter().zip(w[1].values()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// One step of size `dt` with the default policy.
pub fn step(h: &SupportFunction, dt: f64) -> Result<SupportFunction> {
    step_with(h, dt, &StepPolicy::default()).map(|(next, _)| next)
}

/// One SDIRK step; also returns the embedded error estimate per sample.
pub fn step_with(h: &SupportFunction, dt: f64, policy: &StepPolicy) -> Result<(SupportFunction, Vec<f64>)> {
    if !(dt > 0.0) {
        return Err(Error::StepRejected(format!("time step must be positive, got {dt}")));
    }
    let rho = h.discrete_convexity();
    let rho_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    if !(rho_min > crate::geometry::CONVEXITY_FLOOR) {
        h.check_convex()?;
    }
    let bound = policy.cfl * rho_min * rho_min;
    if dt > bound {
        return Err(Error::StepRejected(format!("dt = {dt:e} exceeds stability bound {bound:e}")));
    }
    let step = h.theta_step();
    let velocity = |y: &[f64]| -> Vec<f64> { centered_rho(y, step).iter().map(|r| -1.0 / r).collect() };
    let h0 = h.values();
    let y1 = solve_stage(h0, h0, dt * GAMMA, step)?;
    let k1 = velocity(&y1);
    let base: Vec<f64> = h0.iter().zip(&k1).map(|(v, k)| v + dt * (1.0 - GAMMA) * k).collect();
    let y2 = solve_stage(&base, &y1, dt * GAMMA, step)?;
    let k2 = velocity(&y2);
    let err = k1.iter().zip(&k2).map(|(a, b)| dt * (1.0 - GAMMA) * (a - b)).collect();
    let next = SupportFunction::new(y2)?;
    next.check_convex()?;
    Ok((next, err))
}

/// Fourth-order centered weights of the second difference, offsets 0, 1, 2.
const SECOND: [f64; 3] = [-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

fn centered_rho(y: &[f64], step: f64) -> Vec<f64> {
    let n = y.len() as isize;
    let inv = 1.0 / (step * step);
    let at = |i: isize| y[i.rem_euclid(n) as usize];
    (0..n)
        .map(|i| {
            let d2 = SECOND[0] * at(i) + SECOND[1] * (at(i - 1) + at(i + 1)) + SECOND[2] * (at(i - 2) + at(i + 2));
            at(i) + d2 * inv
        })
        .collect()
}

/// Solves `Y = base + a·f(Y)` with `f(Y) = -1/(Y + Y'')` by Newton's method.
fn solve_stage(base: &[f64], guess: &[f64], a: f64, step: f64) -> Result<Vec<f64>> {
    let n = base.len();
    let inv = 1.0 / (step * step);
    let mut y = guess.to_vec();
    let mut previous = f64::INFINITY;
    for _ in 0..50 {
        let rho = centered_rho(&y, step);
        if let Some(i) = rho.iter().position(|r| !(*r > crate::geometry::CONVEXITY_FLOOR)) {
            return Err(Error::StepRejected(format!("stage lost convexity at sample {i}")));
        }
        let residual: Vec<f64> = (0..n).map(|i| -(y[i] - base[i] + a / rho[i])).collect();
        let bands: Vec<[f64; 5]> = rho
            .iter()
            .map(|r| {
                let w = a / (r * r);
                let far = -w * SECOND[2] * inv;
                let near = -w * SECOND[1] * inv;
                [far, near, 1.0 - w * (1.0 + SECOND[0] * inv), near, far]
            })
            .collect();
        let delta = solve_cyclic_banded(&bands, &residual);
        let size = delta.iter().map(|d| d.abs()).fold(0.0, f64::max);
        let scale = 1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        y.iter_mut().zip(&delta).for_each(|(v, d)| *v += d);
        if !size.is_finite() {
            break;
        }
        // Converged, or stalled at rounding level.
        if size <= 1e-14 * scale || (size <= 1e-11 * scale && size >= 0.5 * previous) {
            return Ok(y);
        }
        previous = size;
    }
    Err(Error::StepRejected("Newton iteration did not converge".into()))
}

/// Solves a cyclic pentadiagonal system; row `i` of `bands` holds the
/// coefficients of `x[i-2..=i+2]` (indices modulo `n`). The wrapped corner
/// entries are handled by the Woodbury identity on top of a banded LU.
fn solve_cyclic_banded(bands: &[[f64; 5]], rhs: &[f64]) -> Vec<f64> {
    let n = bands.len();
    let corner_rows = [0, 1, n - 2, n - 1];
    // Corner entries per corner row: (column, value).
    let corners: Vec<Vec<(usize, f64)>> = corner_rows
        .iter()
        .map(|&i| {
            (0..5)
                .filter_map(|k| {
                    let j = i as isize + k as isize - 2;
                    (j < 0 || j >= n as isize).then(|| (j.rem_euclid(n as isize) as usize, bands[i][k]))
                })
                .collect()
        })
        .collect();
    let lu = BandLu::new(bands);
    let y = lu.solve(rhs.to_vec());
    let z: Vec<Vec<f64>> = corner_rows
        .iter()
        .map(|&r| {
            let mut e = vec![0.0; n];
            e[r] = 1.0;
            lu.solve(e)
        })
        .collect();
    let apply_v = |v: &[f64], r: usize| corners[r].iter().map(|&(j, c)| c * v[j]).sum::<f64>();
    let mut small = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            small[r][c] = f64::from(u8::from(r == c)) + apply_v(&z[c], r);
        }
    }
    let vy: [f64; 4] = std::array::from_fn(|r| apply_v(&y, r));
    let coef = solve_small(small, vy);
    (0..n).map(|i| y[i] - (0..4).map(|c| coef[c] * z[c][i]).sum::<f64>()).collect()
}

/// LU factors (no pivoting) of the pentadiagonal part of a banded matrix.
struct BandLu {
    rows: Vec<[f64; 5]>,
}

impl BandLu {
    fn new(bands: &[[f64; 5]]) -> Self {
        let n = bands.len();
        let mut rows = bands.to_vec();
        for k in 0..n {
            for i in k + 1..(k + 3).min(n) {
                let l = rows[i][k + 2 - i] / rows[k][2];
                rows[i][k + 2 - i] = l;
                for j in k + 1..(k + 3).min(n) {
                    rows[i][j + 2 - i] -= l * rows[k][j + 2 - k];
                }
            }
        }
        Self { rows }
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for i in 0..n {
            for j in i.saturating_sub(2)..i {
                b[i] -= self.rows[i][j + 2 - i] * b[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..(i + 3).min(n) {
                b[i] -= self.rows[i][j + 2 - i] * b[j];
            }
            b[i] /= self.rows[i][2];
        }
        b
    }
}

/// Gaussian elimination with partial pivoting for a 4×4 system.
fn solve_small(mut m: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for k in 0..4 {
        let p = (k..4).max_by(|&a, &c| m[a][k].abs().total_cmp(&m[c][k].abs())).unwrap_or(k);
        m.swap(k, p);
        b.swap(k, p);
        for i in k + 1..4 {
            let l = m[i][k] / m[k][k];
            for j in k..4 {
                m[i][j] -= l * m[k][j];
            }
            b[i] -= l * b[k];
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        x[i] = (b[i] - (i + 1..4).map(|j| m[i][j] * x[j]).sum::<f64>()) / m[i][i];
    }
    x
}

/// Frame times uniformly spaced in `log(-t)` between `t0` and `t1`.
pub fn log_cadence(t0: f64, t1: f64, per_decade: f64) -> Vec<f64> {
    let (u0, u1) = ((-t0).log10(), (-t1).log10());
    let count = ((u0 - u1) * per_decade).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..=count)
        .map(|k| -(10f64).powf(u0 - (u0 - u1) * k as f64 / count as f64))
        .collect();
    times[0] = t0;
    times[count] = t1;
    times
}

/// Evolves `h0` from `t0` to `t1` with adaptive steps, recording frames on a
/// logarithmic cadence in `-t`.
pub fn evolve(h0: &SupportFunction, t0: f64, t1: f64, policy: &StepPolicy) -> Result<SupportFlow> {
    if !(t0 < t1 && t1 < 0.0) {
        return Err(Error::DomainError(format!("need t0 < t1 < 0, got t0 = {t0}, t1 = {t1}")));
    }
    h0.check_convex()?;
    let targets = log_cadence(t0, t1, policy.frames_per_decade);
    let mut times = vec![t0];
    let mut frames = vec![h0.clone()];
    let mut h = h0.clone();
    let mut t = t0;
    let mut dt = 1e-3 * (t1 - t0);
    let mut failures = 0;
    for &target in &targets[1..] {
        while t < target {
            let rho_min = h.discrete_convexity().into_iter().fold(f64::INFINITY, f64::min);
            let bound = policy.cfl * rho_min * rho_min;
            let last = dt.min(bound * 0.999) >= target - t;
            let trial = if last { target - t } else { dt.min(bound * 0.999) };
            match step_with(&h, trial, policy) {
                Ok((next, err)) => {
                    let norm = err
                        .iter()
                        .zip(next.values())
                        .map(|(e, v)| e.abs() / (policy.atol + policy.rtol * v.abs()))
                        .fold(0.0, f64::max);
                    if norm > 1.0 {
                        dt = trial * (0.9 / norm.sqrt()).max(0.2);
                        failures += 1;
                    } else {
                        failures = 0;
                        if next.min() < policy.extinction_floor {
                            return Err(Error::ExtinctionReached { time: t });
                        }
                        h = next;
                        t = if last { target } else { t + trial };
                        let grow = if norm == 0.0 { 2.0 } else { (0.9 / norm.sqrt()).min(2.0) };
                        dt = trial * grow.max(1.0);
                    }
                }
                Err(Error::StepRejected(_)) | Err(Error::ConvexityLost { .. }) => {
                    dt = trial * 0.5;
                    failures += 1;
                }
                Err(other) => return Err(other),
            }
            if failures > policy.max_halvings {
                return Err(Error::StepRejected(format!("step size collapsed at t = {t}")));
            }
        }
        times.push(target);
        frames.push(h.clone());
    }
    SupportFlow::from_frames(times, frames)
}

/// Self-similar limits of convex ancient solutions, identified by their
/// Gaussian density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowDownLabel {
    PlaneMult1,
    Circle,
    PlaneMult2,
    Inconclusive,
}

impl BlowDownLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PlaneMult1 => "PlaneMult1",
            Self::Circle => "Circle",
            Self::PlaneMult2 => "PlaneMult2",
            Self::Inconclusive => "Inconclusive",
        }
    }

    /// Nearest target density (1, √(2π/e), 2) within `BLOWDOWN_BAND`.
    pub fn classify(theta: f64) -> Self {
        let targets = [(1.0, Self::PlaneMult1), (circle_density(), Self::Circle), (2.0, Self::PlaneMult2)];
        targets
            .iter()
            .find(|(v, _)| (theta - v).abs() <= BLOWDOWN_BAND)
            .map_or(Self::Inconclusive, |(_, l)| *l)
    }
}

impl std::fmt::Display for BlowDownLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const BLOWDOWN_BAND: f64 = 0.05;

/// Gaussian density of the shrinking circle, `√(2π/e)`.
pub fn circle_density() -> f64 {
    (TAU / std::f64::consts::E).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowDown {
    /// `(λ, Θ_λ)` for each requested scale.
    pub samples: Vec<(f64, f64)>,
    pub label: BlowDownLabel,
}

/// Gaussian area at `t = -1` of the rescalings `λ(M_{t*+λ⁻²t} - x*)` about the
/// extinction point `(x*, t*)`.
pub fn blow_down(flow: &SupportFlow, lambdas: &[f64]) -> Result<BlowDown> {
    if lambdas.is_empty()
        || lambdas.iter().any(|l| !(*l > 0.0 && *l <= 1.0))
        || lambdas.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::DomainError("scales must decrease within (0, 1]".into()));
    }
    let (x0, t0) = flow.extinction()?;
    let mut samples = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let t = t0 - 1.0 / (lambda * lambda);
        if flow.exact().is_none() && t < flow.times()[0] * (1.0 + 1e-9) - 1e-12 {
            return Err(Error::InsufficientHistory { needed: t, available: flow.times()[0] });
        }
        let slice = match flow.exact() {
            Some(_) => flow.slice_at(t, 0.0)?,
            None => flow.slice(flow.nearest_frame(t))?,
        };
        samples.push((lambda, gaussian_density(&slice, x0, t0)?));
    }
    let labels: Vec<BlowDownLabel> = samples.iter().map(|(_, th)| BlowDownLabel::classify(*th)).collect();
    let label = match labels.as_slice() {
        [.., a, b] if a == b => *b,
        [only] => *only,
        _ => BlowDownLabel::Inconclusive,
    };
    Ok(BlowDown { samples, label })
}

/// Frame of an asymptotic translator sequence: the curve at time `s`
/// translated so that the point with normal `e` is at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslatorFrame {
    pub time: f64,
    pub slice: Timeslice,
    /// Curvature at the point with normal `e`.
    pub speed: f64,
}

pub fn asymptotic_translator(flow: &SupportFlow, e: [f64; 2], times: &[f64]) -> Result<Vec<TranslatorFrame>> {
    let angle = e[1].atan2(e[0]).rem_euclid(TAU);
    let first = flow.times()[0];
    let last = *flow.times().last().expect("flow is never empty");
    times
        .iter()
        .map(|&s| {
            if s < first * (1.0 + 1e-12) - 1e-12 || s > last {
                return Err(Error::InsufficientHistory { needed: s, available: first });
            }
            let (slice, tip, speed) = match flow.exact() {
                Some(sol) => (flow.slice_at(s, 0.0)?, sol.point(angle, s)?, sol.curvature(angle, s)?),
                None => {
                    let slice = flow.slice_at(s, 1e-9)?;
                    let m = flow.nearest_frame(s);
                    let i = ((angle / flow.frames()[m].theta_step()).round() as usize) % flow.resolution();
                    let kappa = flow.curvature(m)?[i];
                    (slice.clone(), slice.points[i], kappa)
                }
            };
            Ok(TranslatorFrame { time: s, slice: slice.translated([-tip[0], -tip[1]]), speed })
        })
        .collect()
}

/// Sup over `|a| <= half_width` of the distance between a recentred frame
/// near its tip in direction `e` and the Grim Reaper with tip at the origin.
pub fn grim_tip_distance(frame: &TranslatorFrame, e: [f64; 2], half_width: f64) -> f64 {
    let perp = [-e[1], e[0]];
    frame
        .slice
        .points
        .iter()
        .zip(&frame.slice.normals)
        .filter(|(_, n)| n[0] * e[0] + n[1] * e[1] > 0.0)
        .filter_map(|(p, _)| {
            let a = p[0] * perp[0] + p[1] * perp[1];
            let b = p[0] * e[0] + p[1] * e[1];
            (a.abs() <= half_width).then(|| (-b - catalog::grim_reaper_height(a, 0.0)).abs())
        })
        .fold(0.0, f64::max)
}

/// Arrival time `u(p)`: the time at which the flow passes through `p`.
pub fn arrival_time(flow: &SupportFlow, p: [f64; 2]) -> Result<f64> {
    let first = flow.times()[0];
    let (_, t_ext) = flow.extinction()?;
    if let Some(sol) = flow.exact() {
        return match sol.arrival_time(p) {
            Some(u) if u >= first && u <= t_ext => Ok(u),
            _ => Err(Error::OutOfSweep(p[0], p[1])),
        };
    }
    let phi: Vec<f64> = flow.frames().iter().map(|f| support_distance(f, p)).collect();
    let last = phi.len() - 1;
    if phi[0] > 0.0 || phi[last] <= 0.0 {
        return Err(Error::OutOfSweep(p[0], p[1]));
    }
    let m = (0..last).find(|&m| phi[m] <= 0.0 && phi[m + 1] > 0.0).ok_or(Error::OutOfSweep(p[0], p[1]))?;
    // Cubic Lagrange interpolation of the support distance in time.
    let lo = m.saturating_sub(1).min(last.saturating_sub(3));
    let idx: Vec<usize> = (lo..=(lo + 3).min(last)).collect();
    let ts = flow.times();
    let interp = |t: f64| -> f64 {
        idx.iter()
            .map(|&j| {
                let basis: f64 = idx.iter().filter(|&&k| k != j).map(|&k| (t - ts[k]) / (ts[j] - ts[k])).product();
                basis * phi[j]
            })
            .sum()
    };
    let (mut a, mut b) = (ts[m], ts[m + 1]);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if interp(mid) <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `max_θ (⟨p, ν(θ)⟩ - h(θ))`, refined by a parabola through the discrete
/// maximum; negative inside the body, zero on the boundary.
pub fn support_distance(h: &SupportFunction, p: [f64; 2]) -> f64 {
    let n = h.len();
    let g: Vec<f64> = (0..n)
        .map(|i| {
            let (s, c) = h.theta(i).sin_cos();
            p[0] * c + p[1] * s - h.values()[i]
        })
        .collect();
    let i = (0..n).max_by(|&a, &b| g[a].total_cmp(&g[b])).expect("grid is not empty");
    let (gm, g0, gp) = (g[(i + n - 1) % n], g[i], g[(i + 1) % n]);
    let curv = 2.0 * g0 - gm - gp;
    if curv > 0.0 {
        g0 + (gp - gm).powi(2) / (8.0 * curv)
    } else {
        g0
    }
}

/// Arrival time with its fourth-order finite-difference gradient and Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrivalStencil {
    pub point: [f64; 2],
    pub u: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

/// Samples the arrival time around each point with a 5-point stencil of the
/// given spacing. For recorded flows the spacing must be at least twice the
/// largest boundary displacement between consecutive frames.
pub fn arrival_time_field(flow: &SupportFlow, points: &[[f64; 2]], spacing: f64) -> Result<Vec<ArrivalStencil>> {
    if flow.exact().is_none() {
        let needed = 2.0 * flow.max_frame_displacement();
        if spacing < needed {
            return Err(Error::StencilFailure(format!(
                "stencil spacing {spacing:e} is below twice the frame displacement {needed:e}"
            )));
        }
    }
    let d = spacing;
    points
        .iter()
        .map(|&p| {
            let u = |dx: f64, dy: f64| arrival_time(flow, [p[0] + dx, p[1] + dy]);
            let u0 = u(0.0, 0.0)?;
            let axis = |e: [f64; 2]| -> Result<(f64, f64)> {
                let f = |k: f64| u(k * d * e[0], k * d * e[1]);
                let (m2, m1, p1, p2) = (f(-2.0)?, f(-1.0)?, f(1.0)?, f(2.0)?);
                let first = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * d);
                let second = (-m2 + 16.0 * m1 - 30.0 * u0 + 16.0 * p1 - p2) / (12.0 * d * d);
                Ok((first, second))
            };
            let (ux, uxx) = axis([1.0, 0.0])?;
            let (uy, uyy) = axis([0.0, 1.0])?;
            let uxy = (u(d, d)? - u(d, -d)? - u(-d, d)? + u(-d, -d)?) / (4.0 * d * d);
            Ok(ArrivalStencil { point: p, u: u0, gradient: [ux, uy], hessian: [[uxx, uxy], [uxy, uyy]] })
        })
        .collect()
}

/// Width of the Angenent oval slab, the limit of its horizontal extent.
pub const OVAL_SLAB_WIDTH: f64 = PI;

/// Derivative mode used by the engine's convexity checks.
pub const ENGINE_DERIVATIVES: DerivativeMode = DerivativeMode::Centered;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cyclic_banded_solver_matches_product() {
        let n = 11;
        let bands: Vec<[f64; 5]> = (0..n)
            .map(|i| {
                let s = i as f64;
                [0.05 + 0.01 * s, -0.3 - 0.02 * s, 2.0 + 0.1 * s, -0.25 + 0.01 * s, 0.04]
            })
            .collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.3).sin()).collect();
        let rhs: Vec<f64> = (0..n)
            .map(|i| (0..5).map(|k| bands[i][k] * x[(i + n + k - 2) % n]).sum())
            .collect();
        let got = solve_cyclic_banded(&bands, &rhs);
        for (a, b) in got.iter().zip(&x) {
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn circle_step_follows_radius_law() {
        let h = SupportFunction::constant(64, 1.0).unwrap();
        let next = step(&h, 1e-4).unwrap();
        let exact = (1.0f64 - 2e-4).sqrt();
        for v in next.values() {
            assert!((v - exact).abs() < 1e-8);
        }
        let spread = next.values().iter().fold(0.0f64, |m, v| m.max((v - next.values()[0]).abs()));
        assert_eq!(spread, 0.0);
    }

    #[test]
    fn step_rejects_oversized_dt() {
        let h = SupportFunction::constant(64, 1.0).unwrap();
        assert!(matches!(step(&h, 0.3), Err(Error::StepRejected(_))));
        assert!(matches!(step(&h, -1.0), Err(Error::StepRejected(_))));
    }

    #[test]
    fn log_cadence_endpoints() {
        let t = log_cadence(-200.0, -1.0, 10.0);
        assert_eq!(t[0], -200.0);
        assert_eq!(*t.last().unwrap(), -1.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn evolve_validates_interval() {
        let h = SupportFunction::constant(64, 1.0).unwrap();
        let p = StepPolicy::default();
        assert!(matches!(evolve(&h, -1.0, -2.0, &p), Err(Error::DomainError(_))));
        assert!(matches!(evolve(&h, -1.0, 0.5, &p), Err(Error::DomainError(_))));
    }

    #[test]
    fn evolve_reports_extinction() {
        let h = SupportFunction::constant(64, 1.0).unwrap();
        // Radius 1 at t = -1 is extinct at t = -0.5.
        let err = evolve(&h, -1.0, -0.1, &StepPolicy::default()).unwrap_err();
        match err {
            Error::ExtinctionReached { time } => assert!(time < -0.5 && time > -0.51),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn labels_classify_by_nearest_target() {
        assert_eq!(BlowDownLabel::classify(1.01), BlowDownLabel::PlaneMult1);
        assert_eq!(BlowDownLabel::classify(1.52), BlowDownLabel::Circle);
        assert_eq!(BlowDownLabel::classify(1.97), BlowDownLabel::PlaneMult2);
        assert_eq!(BlowDownLabel::classify(1.3), BlowDownLabel::Inconclusive);
    }

    #[test]
    fn support_distance_is_signed() {
        let h = SupportFunction::constant(256, 2.0).unwrap();
        assert_relative_eq!(support_distance(&h, [0.0, 0.0]), -2.0, epsilon = 1e-12);
        assert_relative_eq!(support_distance(&h, [0.3, 3.0]), 0.09f64.mul_add(1.0, 9.0).sqrt() - 2.0, epsilon = 1e-7);
    }
}
