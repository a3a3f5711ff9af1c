//! Support-function representation of strictly convex planar curves.
//!
//! A compact strictly convex curve is stored through its support function
//! `h(θ) = max ⟨x, (cos θ, sin θ)⟩` sampled on a uniform grid of the Gauss map
//! angle. The curve itself is recovered with the inverse Gauss map
//! `X(θ) = h(θ) ν(θ) + h'(θ) τ(θ)` and has radius of curvature `h + h''`.

use std::f64::consts::TAU;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::engine::SupportFlow;
use crate::error::{Error, Result};

/// Radius of curvature below which a sample is treated as a corner.
pub const CONVEXITY_FLOOR: f64 = 1e-9;

/// How derivatives of a sampled support function are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Fourier differentiation, only available for power-of-two grids.
    Spectral,
    /// Fourth-order centered differences.
    Centered,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportFunction {
    values: Vec<f64>,
}

impl SupportFunction {
    /// Wraps samples `h(2πi/N)`. The grid must be even with at least 16 points.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "support grid needs an even number of samples >= 16, got {n}"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite support value at {i}")));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let step = TAU / n as f64;
        Self::new((0..n).map(|i| f(i as f64 * step)).collect())
    }

    pub fn constant(n: usize, radius: f64) -> Result<Self> {
        Self::new(vec![radius; n])
    }

    /// Support function of the ellipse `x²/a² + y²/b² = 1`.
    pub fn ellipse(n: usize, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(n, |t| (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn theta_step(&self) -> f64 {
        TAU / self.len() as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.theta_step()
    }

    pub fn default_mode(&self) -> DerivativeMode {
        if self.len().is_power_of_two() {
            DerivativeMode::Spectral
        } else {
            DerivativeMode::Centered
        }
    }

    /// First or second derivative in θ.
    pub fn derivative(&self, order: u32, mode: DerivativeMode) -> Vec<f64> {
        assert!(order == 1 || order == 2, "only first and second derivatives");
        match mode {
            DerivativeMode::Spectral if self.len().is_power_of_two() => {
                spectral_derivative(&self.values, order)
            }
            _ => centered_derivative(&self.values, self.theta_step(), order),
        }
    }

    /// `h + h''`, the radius of curvature at each normal direction.
    pub fn radius_of_curvature(&self, mode: DerivativeMode) -> Vec<f64> {
        self.derivative(2, mode)
            .iter()
            .zip(&self.values)
            .map(|(d2, h)| h + d2)
            .collect()
    }

    /// `h_i + (h_{i+1} - 2h_i + h_{i-1}) / Δθ²`, the discrete convexity quantity.
    pub fn discrete_convexity(&self) -> Vec<f64> {
        let n = self.len();
        let inv = 1.0 / (self.theta_step() * self.theta_step());
        let v = &self.values;
        (0..n).map(|i| v[i] + (v[(i + 1) % n] - 2.0 * v[i] + v[(i + n - 1) % n]) * inv).collect()
    }

    pub fn check_convex(&self) -> Result<()> {
        first_corner(&self.discrete_convexity()).map_or(Ok(()), Err)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self { values: self.values.iter().map(|h| lambda * h).collect() }
    }

    /// Support function of the body translated by `c`.
    pub fn translated(&self, c: [f64; 2]) -> Self {
        let step = self.theta_step();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let t = i as f64 * step;
                h + c[0] * t.cos() + c[1] * t.sin()
            })
            .collect();
        Self { values }
    }

    /// Body rotated by `k` grid angles.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.len();
        Self { values: (0..n).map(|i| self.values[(i + n - k % n) % n]).collect() }
    }

    /// Widths `h(θ) + h(θ + π)` for θ in the first half of the grid.
    pub fn widths(&self) -> Vec<f64> {
        let half = self.len() / 2;
        (0..half).map(|i| self.values[i] + self.values[i + half]).collect()
    }

    /// Enclosed area `½ ∫ h (h + h'') dθ`.
    pub fn area(&self) -> f64 {
        self.area_with(self.default_mode())
    }

    /// `½ ∫ h (h + h'') dθ` with the given derivative mode.
    pub fn area_with(&self, mode: DerivativeMode) -> f64 {
        let rho = self.radius_of_curvature(mode);
        0.5 * self.theta_step() * self.values.iter().zip(&rho).map(|(h, r)| h * r).sum::<f64>()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the boundary along the direction `dir`, measured
    /// on the polygon cut out by the halfplanes `⟨x, ν_i⟩ <= h_i`.
    pub fn ray_exit(&self, p: [f64; 2], dir: [f64; 2]) -> f64 {
        let step = self.theta_step();
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, h)| {
                let (s, c) = (i as f64 * step).sin_cos();
                let along = dir[0] * c + dir[1] * s;
                (along > 1e-14).then(|| (h - p[0] * c - p[1] * s) / along)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn first_corner(rho: &[f64]) -> Option<Error> {
    rho.iter()
        .position(|r| !(*r > CONVEXITY_FLOOR))
        .map(|index| Error::ConvexityLost { index, value: rho[index] })
}

fn centered_derivative(v: &[f64], step: f64, order: u32) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let at = |k: isize| v[(i as isize + k).rem_euclid(n as isize) as usize];
            if order == 1 {
                (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * step)
            } else {
                (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * step * step)
            }
        })
        .collect()
}

fn spectral_derivative(v: &[f64], order: u32) -> Vec<f64> {
    let n = v.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let wave = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        *c = if order == 1 {
            // The Nyquist mode has no odd counterpart.
            if k == n / 2 {
                Complex::new(0.0, 0.0)
            } else {
                *c * Complex::new(0.0, wave)
            }
        } else {
            *c * (-wave * wave)
        };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Sampled hypersurface at one time: positions, outward unit normals, mean
/// curvature and the quadrature weight (measure element) of each sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Timeslice<const D: usize = 2> {
    pub time: f64,
    pub points: Vec<[f64; D]>,
    pub normals: Vec<[f64; D]>,
    pub curvature: Vec<f64>,
    pub weights: Vec<f64>,
}

impl<const D: usize> Timeslice<D> {
    pub fn new(
        time: f64,
        points: Vec<[f64; D]>,
        normals: Vec<[f64; D]>,
        curvature: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = points.len();
        if normals.len() != n || curvature.len() != n || weights.len() != n {
            return Err(Error::InvalidGrid("timeslice channels differ in length".into()));
        }
        if let Some(i) = normals.iter().position(|v| (norm(v) - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidGrid(format!("normal {i} is not a unit vector")));
        }
        Ok(Self { time, points, normals, curvature, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension of the hypersurface (one less than the ambient dimension).
    pub fn dimension(&self) -> usize {
        D - 1
    }

    pub fn translated(&self, c: [f64; D]) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            for k in 0..D {
                p[k] += c[k];
            }
        }
        out
    }

    /// Homothety `x ↦ λx`: curvature scales by `1/λ`, the measure by `λ^n`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            for x in p.iter_mut() {
                *x *= lambda;
            }
        }
        out.curvature.iter_mut().for_each(|k| *k /= lambda);
        let measure = lambda.powi(D as i32 - 1);
        out.weights.iter_mut().for_each(|w| *w *= measure);
        out
    }

    /// Disjoint union of two slices at the same time.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.points.extend_from_slice(&other.points);
        out.normals.extend_from_slice(&other.normals);
        out.curvature.extend_from_slice(&other.curvature);
        out.weights.extend_from_slice(&other.weights);
        out
    }
}

impl Timeslice<2> {
    /// Closed polygon through the samples; assumes counter-clockwise order.
    pub fn polygon_area(&self) -> f64 {
        let n = self.len();
        0.5 * (0..n)
            .map(|i| {
                let (p, q) = (self.points[i], self.points[(i + 1) % n]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
    }

    /// Area centroid of the closed sample polygon.
    pub fn centroid(&self) -> [f64; 2] {
        let n = self.len();
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (p, q) = (self.points[i], self.points[(i + 1) % n]);
            let cross = p[0] * q[1] - q[0] * p[1];
            a += cross;
            cx += (p[0] + q[0]) * cross;
            cy += (p[1] + q[1]) * cross;
        }
        [cx / (3.0 * a), cy / (3.0 * a)]
    }

    /// Rotation about the origin by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = |v: [f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        let mut out = self.clone();
        out.points.iter_mut().for_each(|p| *p = rot(*p));
        out.normals.iter_mut().for_each(|v| *v = rot(*v));
        out
    }

    /// Distance from `origin` to the closed sample polygon along `dir`
    /// (unit vector), if the ray leaves through an edge.
    pub fn ray_exit(&self, origin: [f64; 2], dir: [f64; 2]) -> Option<f64> {
        let n = self.len();
        let mut best: Option<f64> = None;
        for i in 0..n {
            let a = sub(self.points[i], origin);
            let b = sub(self.points[(i + 1) % n], origin);
            let e = sub(b, a);
            let denom = cross(dir, e);
            if denom.abs() < 1e-300 {
                continue;
            }
            // origin + s·dir = a + r·e
            let s = cross(a, e) / denom;
            let r = cross(a, dir) / denom;
            if s >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&r) {
                best = Some(best.map_or(s, |v: f64| v.max(s)));
            }
        }
        best
    }

    /// Length of the chord through `origin` in direction `dir`.
    pub fn chord(&self, origin: [f64; 2], dir: [f64; 2]) -> Option<f64> {
        Some(self.ray_exit(origin, dir)? + self.ray_exit(origin, [-dir[0], -dir[1]])?)
    }
}

pub(crate) fn norm<const D: usize>(v: &[f64; D]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Realises the inverse Gauss map with the default derivative mode.
pub fn embed(h: &SupportFunction) -> Result<Timeslice> {
    embed_with(h, h.default_mode())
}

pub fn embed_with(h: &SupportFunction, mode: DerivativeMode) -> Result<Timeslice> {
    let rho = h.radius_of_curvature(mode);
    if let Some(err) = first_corner(&rho) {
        return Err(err);
    }
    let dh = h.derivative(1, mode);
    let step = h.theta_step();
    let n = h.len();
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        let (s, c) = h.theta(i).sin_cos();
        let v = h.values()[i];
        points.push([v * c - dh[i] * s, v * s + dh[i] * c]);
        normals.push([c, s]);
    }
    let curvature = rho.iter().map(|r| 1.0 / r).collect();
    let weights = rho.iter().map(|r| r * step).collect();
    Timeslice::new(0.0, points, normals, curvature, weights)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurements {
    pub width_min: f64,
    pub width_max: f64,
    pub diameter: f64,
    pub inradius: f64,
    pub circumradius: f64,
}

impl Measurements {
    /// `ρ₊ / ρ₋`.
    pub fn eccentricity(&self) -> f64 {
        self.circumradius / self.inradius
    }
}

pub fn measure(h: &SupportFunction) -> Result<Measurements> {
    let slice = embed(h)?;
    Ok(measure_frame(h, &slice))
}

/// Measurements from a support grid plus sampled boundary points of the same
/// body. Widths and inradius come from the halfplane description, diameter
/// and circumradius from the points.
pub fn measure_frame(h: &SupportFunction, slice: &Timeslice) -> Measurements {
    let widths = h.widths();
    let width_min = widths.iter().copied().fold(f64::INFINITY, f64::min);
    let width_max = widths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Measurements {
        width_min,
        width_max,
        diameter: polygon_diameter(&slice.points),
        inradius: chebyshev_radius(h),
        circumradius: enclosing_circle(&slice.points).1,
    }
}

/// Diameter of a convex polygon (counter-clockwise vertices) by rotating calipers.
pub fn polygon_diameter(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    if n < 4 {
        return brute_diameter(points);
    }
    let area = |i: usize, j: usize, k: usize| {
        cross(sub(points[j % n], points[i % n]), sub(points[k % n], points[i % n])).abs()
    };
    let mut best: f64 = 0.0;
    let mut j = 1;
    for i in 0..n {
        let mut guard = 0;
        while guard < n && area(i, i + 1, j + 1) >= area(i, i + 1, j) {
            j += 1;
            guard += 1;
            best = best.max(dist(points[i], points[j % n]));
        }
        best = best
            .max(dist(points[i], points[j % n]))
            .max(dist(points[(i + 1) % n], points[j % n]));
    }
    best
}

fn brute_diameter(points: &[[f64; 2]]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(dist(*p, *q));
        }
    }
    best
}

/// Smallest enclosing circle (incremental Welzl with a fixed shuffle).
pub fn enclosing_circle(points: &[[f64; 2]]) -> ([f64; 2], f64) {
    if points.is_empty() {
        return ([0.0, 0.0], 0.0);
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut StdRng::seed_from_u64(0x5eed));
    let slack = 1e-12 * (1.0 + pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max));
    let inside = |c: [f64; 2], r: f64, p: [f64; 2]| dist(c, p) <= r + slack;
    let (mut c, mut r) = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(c, r, pts[i]) {
            continue;
        }
        c = pts[i];
        r = 0.0;
        for j in 0..i {
            if inside(c, r, pts[j]) {
                continue;
            }
            c = [(pts[i][0] + pts[j][0]) / 2.0, (pts[i][1] + pts[j][1]) / 2.0];
            r = dist(c, pts[i]);
            for k in 0..j {
                if inside(c, r, pts[k]) {
                    continue;
                }
                if let Some(cc) = circumcenter(pts[i], pts[j], pts[k]) {
                    c = cc;
                    r = dist(c, pts[i]);
                }
            }
        }
    }
    (c, r)
}

fn circumcenter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<[f64; 2]> {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Some([a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d])
}

/// Radius of the largest disk inside `⋂ {⟨x, ν_i⟩ <= h_i}`.
///
/// The depth `min_i (h_i - ⟨x, ν_i⟩)` is concave, so nested golden-section
/// searches converge to its maximum.
pub fn chebyshev_radius(h: &SupportFunction) -> f64 {
    chebyshev_center(h).1
}

pub fn chebyshev_center(h: &SupportFunction) -> ([f64; 2], f64) {
    let n = h.len();
    let trig: Vec<(f64, f64)> = (0..n).map(|i| h.theta(i).sin_cos()).collect();
    let depth = |x: f64, y: f64| {
        h.values()
            .iter()
            .zip(&trig)
            .map(|(v, (s, c))| v - x * c - y * s)
            .fold(f64::INFINITY, f64::min)
    };
    let half = n / 2;
    let quarter = n / 4;
    let xr = (-h.values()[half], h.values()[0]);
    let yr = (-h.values()[(half + quarter) % n], h.values()[quarter]);
    let best_y = |x: f64| golden_max(|y| depth(x, y), yr.0, yr.1);
    let x = golden_max(|x| best_y(x).1, xr.0, xr.1).0;
    let (y, r) = best_y(x);
    ([x, y], r)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..90 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Parabolic rescaling `h_λ(θ, t) = λ h(θ, λ⁻² t)`: frame times become `λ² t`.
pub fn parabolic_rescale(flow: &SupportFlow, lambda: f64) -> Result<SupportFlow> {
    if !(lambda > 0.0) {
        return Err(Error::DomainError(format!("rescaling factor must be positive, got {lambda}")));
    }
    if let Some(t) = flow.times().iter().find(|t| **t >= 0.0) {
        return Err(Error::DomainError(format!("rescaling needs negative times, found {t}")));
    }
    Ok(flow.rescaled(lambda))
}
