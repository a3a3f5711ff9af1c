//! Translating solitons: residual of `H = ⟨e, ν⟩`, blow-downs and the
//! entire/slab dichotomy for the Grim Reaper and the bowl.

use std::f64::consts::PI;

use crate::catalog::{self, RadialProfile};
use crate::diagnostics::gaussian_density;
use crate::error::{Error, Result};
use crate::geometry::{dot, Timeslice};

/// Default horizon of [`slab_classify`]: ten times the Grim Reaper width.
pub const SLAB_HORIZON: f64 = 10.0 * PI;

/// Relative width change tolerated between half and full height of a slab.
const SLAB_STABILITY: f64 = 1e-3;

/// Samples of a translator together with its direction of motion.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslatorSample<const D: usize = 2> {
    pub slice: Timeslice<D>,
    pub direction: [f64; D],
}

impl<const D: usize> TranslatorSample<D> {
    pub fn new(slice: Timeslice<D>, direction: [f64; D]) -> Result<Self> {
        let len = dot(&direction, &direction).sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::DomainError(format!("translation direction has length {len}")));
        }
        Ok(Self { slice, direction })
    }

    /// Width of the slab containing the sample; infinite when entire.
    pub fn slab_width(&self, horizon: f64) -> Result<f64> {
        slab_classify(self, horizon).map(|c| c.width())
    }
}

/// `max |H - |⟨e, ν⟩||` over the samples. The absolute value makes the
/// residual independent of the normal orientation.
pub fn translator_residual<const D: usize>(s: &Timeslice<D>, e: [f64; D]) -> f64 {
    s.curvature
        .iter()
        .zip(&s.normals)
        .map(|(h, n)| (h - dot(&e, n).abs()).abs())
        .fold(0.0, f64::max)
}

/// Meridian samples `(r, 0, …, 0, u(r))` of the rotationally symmetric graph
/// in `ℝ^D`, `D = n + 1`. Normals point down, out of the convex region above
/// the graph; weights carry the `|S^{n-1}| r^{n-1}` volume factor so that
/// integrals over the slice are integrals over the hypersurface.
pub fn revolve<const D: usize>(profile: &RadialProfile) -> Result<Timeslice<D>> {
    let n = profile.dimension;
    if D != n + 1 {
        return Err(Error::DomainError(format!("profile of dimension {n} needs ambient dimension {}", n + 1)));
    }
    let upp = profile.second_derivative();
    let nm1 = (n - 1) as f64;
    let sphere = sphere_measure(n - 1);
    let count = profile.radii.len();
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    let mut curvature = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for j in 0..count {
        let (r, u, p) = (profile.radii[j], profile.heights[j], profile.slopes[j]);
        let root = (1.0 + p * p).sqrt();
        let mut x = [0.0; D];
        x[0] = r;
        x[D - 1] = u;
        let mut nu = [0.0; D];
        nu[0] = p / root;
        nu[D - 1] = -1.0 / root;
        // At the axis u'/r tends to u''.
        let radial = if r == 0.0 { upp[j] } else { p / r };
        points.push(x);
        normals.push(nu);
        curvature.push(upp[j] / root.powi(3) + nm1 * radial / root);
        let left = if j > 0 { r - profile.radii[j - 1] } else { 0.0 };
        let right = if j + 1 < count { profile.radii[j + 1] - r } else { 0.0 };
        weights.push(0.5 * (left + right) * root * sphere * r.powi(n as i32 - 1));
    }
    Timeslice::new(0.0, points, normals, curvature, weights)
}

/// Surface measure of the unit `k`-sphere.
fn sphere_measure(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_measure(k - 2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslatorLabel {
    Cylinder,
    Inconclusive,
}

impl std::fmt::Display for TranslatorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Cylinder => "Cylinder",
            Self::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslatorBlowdown {
    pub lambda: f64,
    /// Rescaled neck radius over the cylinder radius `√(2(n-1))`.
    pub ratio: f64,
    pub label: TranslatorLabel,
}

/// Blow-down of the translating bowl: the slice `λ(Σ - λ⁻² e)` at `t = -1`
/// crosses height zero at radius `λR` with `u(R) = λ⁻²`, which is compared
/// with the shrinking cylinder radius.
pub fn translator_blowdown(profile: &RadialProfile, lambda: f64) -> Result<TranslatorBlowdown> {
    if !(lambda > 0.0) {
        return Err(Error::DomainError(format!("scale must be positive, got {lambda}")));
    }
    if profile.r_max() < 10.0 / lambda {
        return Err(Error::InsufficientProfile(format!(
            "profile ends at r = {} but λ = {lambda} needs r >= {}",
            profile.r_max(),
            10.0 / lambda
        )));
    }
    let radius = profile
        .radius_at_height(1.0 / (lambda * lambda))
        .ok_or_else(|| Error::InsufficientProfile("profile never reaches the blow-down height".into()))?;
    let ratio = lambda * radius / (2.0 * (profile.dimension as f64 - 1.0)).sqrt();
    let label = if (ratio - 1.0).abs() <= 0.05 { TranslatorLabel::Cylinder } else { TranslatorLabel::Inconclusive };
    Ok(TranslatorBlowdown { lambda, ratio, label })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlabClass {
    Entire,
    Slab(f64),
}

impl SlabClass {
    pub fn width(&self) -> f64 {
        match self {
            Self::Entire => f64::INFINITY,
            Self::Slab(w) => *w,
        }
    }
}

impl std::fmt::Display for SlabClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Entire => f.write_str("Entire"),
            Self::Slab(w) => write!(f, "Slab({w})"),
        }
    }
}

/// Horizontal extent of the samples at most `height` along the direction of
/// motion. Planar samples use both sides; higher-dimensional samples are
/// meridians of a rotationally symmetric graph, so twice the largest radius.
fn extent_below<const D: usize>(s: &TranslatorSample<D>, height: f64) -> f64 {
    let e = &s.direction;
    let below = s.slice.points.iter().filter(|p| dot(p, e) <= height);
    if D == 2 {
        let perp = [-e[1], e[0]];
        let (lo, hi) = below
            .map(|p| p[0] * perp[0] + p[1] * perp[1])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        (hi - lo).max(0.0)
    } else {
        let radius = below
            .map(|p| {
                let along = dot(p, e);
                (dot(p, p) - along * along).max(0.0).sqrt()
            })
            .fold(0.0, f64::max);
        2.0 * radius
    }
}

/// Entire when the horizontal extent passes `horizon`; a slab when the width
/// at the top of the sample agrees with the width at half height.
pub fn slab_classify<const D: usize>(s: &TranslatorSample<D>, horizon: f64) -> Result<SlabClass> {
    if s.slice.is_empty() {
        return Err(Error::Inconclusive("empty sample".into()));
    }
    let heights: Vec<f64> = s.slice.points.iter().map(|p| dot(p, &s.direction)).collect();
    let bottom = heights.iter().copied().fold(f64::INFINITY, f64::min);
    let top = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let full = extent_below(s, top);
    if full > horizon {
        return Ok(SlabClass::Entire);
    }
    let half = extent_below(s, 0.5 * (bottom + top));
    if full > 0.0 && (full - half).abs() <= SLAB_STABILITY * full {
        return Ok(SlabClass::Slab(full));
    }
    Err(Error::Inconclusive(format!("width {full} at the top, {half} at half height, horizon {horizon}")))
}

/// Gaussian area of the Grim Reaper blow-down `λ M_{λ⁻² t}` at `t = -1`,
/// about the space-time origin on the tip trajectory.
pub fn grim_blowdown_density(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::DomainError(format!("scale must be positive, got {lambda}")));
    }
    let t = -1.0 / (lambda * lambda);
    // Heights past 12√(-t) above the origin carry no Gaussian weight.
    let height_max = -t + 12.0 * (-t).sqrt();
    let dy = 0.05 * (-t).sqrt().min(20.0);
    let slice = catalog::grim_reaper_by_height(t, height_max, dy)?;
    gaussian_density(&slice, [0.0, 0.0], 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vertical_line_is_a_translator() {
        let n = 11;
        let points = (0..n).map(|i| [0.0, i as f64]).collect();
        let s = Timeslice::new(0.0, points, vec![[1.0, 0.0]; n], vec![0.0; n], vec![1.0; n]).unwrap();
        assert_eq!(translator_residual(&s, [0.0, 1.0]), 0.0);
    }

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(sphere_measure(1), 2.0 * PI);
        assert_relative_eq!(sphere_measure(2), 4.0 * PI);
        assert_relative_eq!(sphere_measure(3), 2.0 * PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn direction_must_be_unit() {
        let s = catalog::grim_reaper(0.0, &[0.0, 0.1]).unwrap();
        assert!(TranslatorSample::new(s, [0.0, 2.0]).is_err());
    }

    #[test]
    fn revolve_checks_dimension() {
        let p = catalog::bowl_profile(2, 1.0, 1e-2).unwrap();
        assert!(revolve::<2>(&p).is_err());
        assert!(revolve::<3>(&p).is_ok());
    }
}
