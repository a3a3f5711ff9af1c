//! Explicit ancient solutions and translators used as initial data and oracles.
//!
//! Conventions: the Grim Reaper `y = t - log cos x` moves with unit speed in
//! `+e₂`; the bowl is the graph of a radial function `u` opening upward and
//! moving in `+e_{n+1}`. The Angenent oval is `cosh y = e^{-t} cos x`, which
//! lies in the slab `|x| < π/2` and becomes extinct at the origin at `t = 0`.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::geometry::{SupportFunction, Timeslice};
use crate::ode::{dopri5, Tolerance};

fn require_negative(t: f64) -> Result<()> {
    if t < 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("ancient solution is only defined for t < 0, got {t}")))
    }
}

/// Support function of the shrinking circle of radius `√(-2t)`.
pub fn shrinking_circle(grid_size: usize, t: f64) -> Result<SupportFunction> {
    require_negative(t)?;
    SupportFunction::constant(grid_size, (-2.0 * t).sqrt())
}

/// Radius of the spherical factor of the shrinking cylinder `ℝᵏ × S^{n-k}`.
pub fn shrinker_radius(n: usize, k: usize, t: f64) -> Result<f64> {
    require_negative(t)?;
    if n == 0 || k >= n {
        return Err(Error::DomainError(format!("need 0 <= k < n, got n = {n}, k = {k}")));
    }
    Ok((-2.0 * (n - k) as f64 * t).sqrt())
}

/// Height of the Grim Reaper above `x` at time `t`.
pub fn grim_reaper_height(x: f64, t: f64) -> f64 {
    t - x.cos().ln()
}

/// Grim Reaper samples at the abscissae `xs` (strictly inside the slab).
///
/// Normals point out of the convex region above the graph, so
/// `⟨ν, e₂⟩ = -cos x`, and the curvature is `cos x`.
pub fn grim_reaper(t: f64, xs: &[f64]) -> Result<Timeslice> {
    if let Some(x) = xs.iter().find(|x| !(x.abs() < FRAC_PI_2)) {
        return Err(Error::DomainError(format!("Grim Reaper abscissa {x} outside (-π/2, π/2)")));
    }
    let n = xs.len();
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let (s, c) = x.sin_cos();
        points.push([x, grim_reaper_height(x, t)]);
        normals.push([s, -c]);
        curvature.push(c);
        // Trapezoid in x with arclength density sec x.
        let left = if i > 0 { x - xs[i - 1] } else { 0.0 };
        let right = if i + 1 < n { xs[i + 1] - x } else { 0.0 };
        weights.push(0.5 * (left + right) / c);
    }
    Timeslice::new(t, points, normals, curvature, weights)
}

/// Grim Reaper sampled by height above its tip, from the tip up to
/// `height_max`, so that the nearly vertical branches are resolved.
pub fn grim_reaper_by_height(t: f64, height_max: f64, dy: f64) -> Result<Timeslice> {
    if !(dy > 0.0) || !(height_max > 1.0) {
        return Err(Error::DomainError("need dy > 0 and height_max > 1".into()));
    }
    // Cap |x| <= arccos(e^{-1}) sampled in x, branches sampled in height.
    let cap_edge = (-1.0f64).exp().acos();
    let cap_n = (2.0 * cap_edge / dy).ceil().max(16.0) as usize;
    let mut right: Vec<(f64, f64)> = Vec::new(); // (x, relative height) with x >= 0
    for i in 0..=cap_n / 2 {
        let x = cap_edge * i as f64 / (cap_n / 2) as f64;
        right.push((x, -x.cos().ln()));
    }
    let mut y = 1.0 + dy;
    while y <= height_max {
        right.push(((-y).exp().acos(), y));
        y += dy;
    }
    let mut ordered: Vec<(f64, f64)> = right.iter().rev().map(|(x, y)| (-x, *y)).collect();
    ordered.extend(right.iter().skip(1).copied());
    let mut points = Vec::with_capacity(ordered.len());
    let mut normals = Vec::with_capacity(ordered.len());
    let mut curvature = Vec::with_capacity(ordered.len());
    for &(x, rel) in &ordered {
        // cos x = e^{-rel} exactly on the curve.
        let c = (-rel).exp();
        let s = x.signum() * (-(-2.0 * rel).exp_m1()).sqrt();
        points.push([x, t + rel]);
        normals.push([s, -c]);
        curvature.push(c);
    }
    let weights = chord_weights(&points, false);
    Timeslice::new(t, points, normals, curvature, weights)
}

/// Trapezoid weights from chord lengths between consecutive samples.
pub(crate) fn chord_weights(points: &[[f64; 2]], closed: bool) -> Vec<f64> {
    let n = points.len();
    let len = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    (0..n)
        .map(|i| {
            let left = if i > 0 {
                len(points[i], points[i - 1])
            } else if closed {
                len(points[0], points[n - 1])
            } else {
                0.0
            };
            let right = if i + 1 < n {
                len(points[i], points[i + 1])
            } else if closed {
                len(points[n - 1], points[0])
            } else {
                0.0
            };
            0.5 * (left + right)
        })
        .collect()
}

/// `ln cosh y` without overflow.
pub(crate) fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (0.5 * (1.0 + (-2.0 * a).exp())).ln()
}

/// `ln sinh y` for `y > 0`.
fn ln_sinh(y: f64) -> f64 {
    if y < 20.0 {
        y.sinh().ln()
    } else {
        y + (0.5 * (-(-2.0 * y).exp_m1())).ln()
    }
}

/// `asinh(e^{ln_mag} · sign)`, evaluated in log space for large arguments.
fn asinh_from_log(ln_mag: f64, sign: f64) -> f64 {
    if ln_mag > 18.0 {
        sign * (ln_mag + std::f64::consts::LN_2 + 0.25 * (-2.0 * ln_mag).exp())
    } else {
        (sign * ln_mag.exp()).asinh()
    }
}

/// The Angenent oval `cosh y = e^{-t} cos x` at a fixed time, in the Gauss
/// map parametrisation: the boundary point with outward normal
/// `(cos θ, sin θ)` is `(asin(c cos θ), asinh(s sin θ))` with
/// `c = √(1 - e^{2t})`, `s = e^{-t} c`, and the curvature is
/// `κ² = (sin²θ + e^{2t} cos²θ) / (1 - e^{2t})`.
#[derive(Clone, Copy, Debug)]
pub struct OvalAt {
    pub time: f64,
    eps2: f64,
    c: f64,
    ln_s: f64,
}

impl OvalAt {
    pub fn new(t: f64) -> Result<Self> {
        require_negative(t)?;
        let one_minus = -(2.0 * t).exp_m1();
        Ok(Self { time: t, eps2: (2.0 * t).exp(), c: one_minus.sqrt(), ln_s: -t + 0.5 * one_minus.ln() })
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        // sin π is not exactly zero in floating point, and e^{-t} amplifies it.
        let y = if s.abs() < 1e-15 { 0.0 } else { asinh_from_log(self.ln_s + s.abs().ln(), s.signum()) };
        [(self.c * c).asin(), y]
    }

    pub fn support(&self, theta: f64) -> f64 {
        let p = self.point(theta);
        let (s, c) = theta.sin_cos();
        p[0] * c + p[1] * s
    }

    pub fn curvature(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        (s * s + self.eps2 * c * c).sqrt() / self.c
    }

    /// `∂κ/∂θ`.
    pub fn curvature_theta(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        s * c / self.curvature(theta)
    }

    /// `∂κ/∂t` at fixed normal direction.
    pub fn curvature_time(&self, theta: f64) -> f64 {
        self.eps2 / (self.c.powi(4) * self.curvature(theta))
    }

    /// Outward normal angle at a boundary point `p`.
    pub fn normal_angle(&self, p: [f64; 2]) -> f64 {
        let cos_t = p[0].sin() / self.c;
        let sin_t = if p[1] == 0.0 { 0.0 } else { p[1].signum() * (ln_sinh(p[1].abs()) - self.ln_s).exp() };
        sin_t.atan2(cos_t)
    }

    /// Height of the tips `(0, ±y_tip)`.
    pub fn tip_height(&self) -> f64 {
        asinh_from_log(self.ln_s, 1.0)
    }

    /// Half width `arcsin c` at `y = 0`.
    pub fn half_width(&self) -> f64 {
        self.c.asin()
    }

    /// Boundary point on the right flank at height `y` (`0 <= y < y_tip`),
    /// with its normal angle sine and cosine.
    fn flank(&self, y: f64) -> ([f64; 2], f64, f64) {
        let arg = (self.time + ln_cosh(y)).exp().min(1.0);
        let sin_t = if y == 0.0 { 0.0 } else { (ln_sinh(y) - self.ln_s).exp().min(1.0) };
        let cos_t = (1.0 - sin_t * sin_t).sqrt();
        ([arg.acos(), y], sin_t, cos_t)
    }

    /// Samples of the closed curve, counter-clockwise from the rightmost point.
    ///
    /// `angle_samples` uniform normal angles are taken (rounded up to a
    /// multiple of four). The nearly flat flanks, which a uniform angle grid
    /// misses for very negative times, are filled with extra samples spaced
    /// `0.02·max(1, √-t)` in height.
    pub fn slice(&self, angle_samples: usize) -> Result<Timeslice> {
        let m = angle_samples.max(16).div_ceil(4) * 4;
        let quarter = m / 4;
        let dtheta = TAU / m as f64;
        // First quadrant, from θ = 0 to θ = π/2 inclusive: (point, sin θ, cos θ).
        let mut q1: Vec<([f64; 2], f64, f64)> = vec![self.flank(0.0)];
        let first_height = self.point(dtheta)[1];
        let dy = 0.02 * (-self.time).sqrt().max(1.0);
        let mut y = dy;
        while y < first_height - 0.5 * dy {
            q1.push(self.flank(y));
            y += dy;
        }
        for k in 1..=quarter {
            let theta = k as f64 * dtheta;
            let (s, c) = theta.sin_cos();
            let (s, c) = if k == quarter { (1.0, 0.0) } else { (s, c) };
            let p = if k == quarter { [0.0, self.tip_height()] } else { self.point(theta) };
            q1.push((p, s, c));
        }
        let l = q1.len();
        let mut samples: Vec<([f64; 2], f64, f64)> = Vec::with_capacity(4 * (l - 1));
        samples.extend(q1.iter().copied());
        samples.extend(q1[..l - 1].iter().rev().map(|&(p, s, c)| ([-p[0], p[1]], s, -c)));
        samples.extend(q1[1..].iter().map(|&(p, s, c)| ([-p[0], -p[1]], -s, -c)));
        samples.extend(q1[1..l - 1].iter().rev().map(|&(p, s, c)| ([p[0], -p[1]], -s, c)));
        let points: Vec<[f64; 2]> = samples.iter().map(|x| x.0).collect();
        let normals = samples.iter().map(|&(_, s, c)| [c, s]).collect();
        let curvature = samples
            .iter()
            .map(|&(_, s, c)| (s * s + self.eps2 * c * c).sqrt() / self.c)
            .collect();
        let weights = chord_weights(&points, true);
        Timeslice::new(self.time, points, normals, curvature, weights)
    }

    /// `cosh y - e^{-t} cos x`, negative inside the oval.
    pub fn implicit(x: f64, y: f64, t: f64) -> f64 {
        y.cosh() - (-t).exp() * x.cos()
    }

    /// Arrival time `u(x, y) = ln cos x - ln cosh y` inside the slab.
    pub fn arrival_time(p: [f64; 2]) -> Option<f64> {
        (p[0].abs() < FRAC_PI_2).then(|| p[0].cos().ln() - ln_cosh(p[1]))
    }
}

/// Angenent oval samples at time `t`; see [`OvalAt::slice`].
pub fn angenent_oval(t: f64, sample_count: usize) -> Result<Timeslice> {
    OvalAt::new(t)?.slice(sample_count)
}

/// Exact support function of the Angenent oval on an `n`-point grid.
pub fn angenent_oval_support(n: usize, t: f64) -> Result<SupportFunction> {
    let oval = OvalAt::new(t)?;
    SupportFunction::from_fn(n, |theta| oval.support(theta))
}

/// Rotationally symmetric graph `x_{n+1} = u(|x|)` over `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub dimension: usize,
    pub radii: Vec<f64>,
    pub heights: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Three samples past the last radius, used by the derivative stencils.
    tail: [(f64, f64); 3],
}

/// Sixth-order central first-derivative weights for offsets 1, 2, 3.
const D6: [f64; 3] = [45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0];

impl RadialProfile {
    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("profile is never empty")
    }

    fn step(&self) -> f64 {
        self.radii[1] - self.radii[0]
    }

    /// `u''` from sixth-order differences of the stored slopes. `u'` is odd,
    /// which supplies the stencil across the axis.
    pub fn second_derivative(&self) -> Vec<f64> {
        let n = self.slopes.len();
        let slope = |j: isize| -> f64 {
            if j < 0 {
                -self.slopes[(-j) as usize]
            } else if (j as usize) < n {
                self.slopes[j as usize]
            } else {
                self.tail[j as usize - n].1
            }
        };
        let h = self.step();
        (0..n as isize)
            .map(|j| {
                D6.iter()
                    .enumerate()
                    .map(|(k, w)| w * (slope(j + k as isize + 1) - slope(j - k as isize - 1)))
                    .sum::<f64>()
                    / h
            })
            .collect()
    }

    /// Pointwise residual of `u''/(1+u'²) + (n-1)u'/r - 1` for `r >= step`.
    pub fn ode_residual(&self) -> f64 {
        let upp = self.second_derivative();
        let nm1 = (self.dimension - 1) as f64;
        (1..self.radii.len())
            .map(|j| {
                let (r, p) = (self.radii[j], self.slopes[j]);
                (upp[j] / (1.0 + p * p) + nm1 * p / r - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Radius where the profile reaches `height`, by cubic Hermite
    /// interpolation; `None` beyond the profile.
    pub fn radius_at_height(&self, height: f64) -> Option<f64> {
        let j = self.heights.iter().position(|&u| u >= height)?;
        if j == 0 {
            return Some(0.0);
        }
        let (r0, r1) = (self.radii[j - 1], self.radii[j]);
        let (u0, u1) = (self.heights[j - 1], self.heights[j]);
        let (p0, p1) = (self.slopes[j - 1], self.slopes[j]);
        let dr = r1 - r0;
        let hermite = |s: f64| {
            let (s2, s3) = (s * s, s * s * s);
            (2.0 * s3 - 3.0 * s2 + 1.0) * u0
                + (s3 - 2.0 * s2 + s) * dr * p0
                + (-2.0 * s3 + 3.0 * s2) * u1
                + (s3 - s2) * dr * p1
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if hermite(mid) < height {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(r0 + 0.5 * (lo + hi) * dr)
    }
}

/// Bowl soliton profile: solves `u''/(1+u'²) + (n-1)u'/r = 1` from the axis.
///
/// On `[0, step]` the series `u = r²/(2n) + r⁴/(4n³(n+2))` is used; beyond,
/// adaptive Dormand–Prince stepping with dense output on the uniform grid.
pub fn bowl_profile(n: usize, r_max: f64, step: f64) -> Result<RadialProfile> {
    if n < 2 {
        return Err(Error::DomainError(format!("bowl needs n >= 2, got {n}")));
    }
    if !(r_max >= 1.0) || !(step > 0.0 && step <= 1e-2) {
        return Err(Error::DomainError(format!(
            "need r_max >= 1 and 0 < step <= 1e-2, got r_max = {r_max}, step = {step}"
        )));
    }
    let nf = n as f64;
    let quartic = 1.0 / (nf.powi(3) * (nf + 2.0));
    let series = |r: f64| [r * r / (2.0 * nf) + quartic * r.powi(4) / 4.0, r / nf + quartic * r.powi(3)];
    let count = (r_max / step).round() as usize;
    let grid: Vec<f64> = (0..=count + 3).map(|j| j as f64 * step).collect();
    let rhs = |r: f64, y: &[f64; 2]| [y[1], (1.0 + y[1] * y[1]) * (1.0 - (nf - 1.0) * y[1] / r)];
    let tol = Tolerance { rtol: 1e-13, atol: 1e-13, max_steps: 5_000_000 };
    let mut states = vec![[0.0, 0.0], series(step)];
    states.extend(dopri5(rhs, step, series(step), &grid[2..], &tol)?);
    let radii = grid[..=count].to_vec();
    let heights = states[..=count].iter().map(|s| s[0]).collect();
    let slopes = states[..=count].iter().map(|s| s[1]).collect();
    let tail = [0, 1, 2].map(|k| (states[count + 1 + k][0], states[count + 1 + k][1]));
    Ok(RadialProfile { dimension: n, radii, heights, slopes, tail })
}
