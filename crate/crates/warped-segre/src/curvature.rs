//! Sectional curvature of the warped geometry on axis-aligned planes, plus a
//! geodesic-circle (circumference-defect) estimator serving as an independent
//! numerical check.

use crate::error::GeometryError;
use crate::presegre::{self, PreSegrePoint, PreSegreTangent};

/// Orthonormality tolerance for the two spanning tangents.
pub const PLANE_TOL: f64 = 1e-10;

/// How a tangent decomposes across the radial direction and the factor
/// spheres, measured by metric weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Support {
    Radial,
    SingleFactor(usize),
    Mixed,
}

fn support_of(v: &PreSegreTangent) -> Support {
    let shape = v.base().shape();
    let al = shape.alpha() * v.base().lambda();
    let radial = v.lambda_dot() * v.lambda_dot();
    let spherical: Vec<f64> = shape
        .mults()
        .iter()
        .zip(v.factor_dots())
        .map(|(&k, w)| al * al * k as f64 * w.norm() * w.norm())
        .collect();
    let total = radial + spherical.iter().sum::<f64>();
    let thresh = total * 1e-16;
    let has_radial = radial > thresh;
    let factors: Vec<usize> = spherical
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > thresh)
        .map(|(i, _)| i)
        .collect();
    match (has_radial, factors.as_slice()) {
        (true, []) => Support::Radial,
        (false, [i]) => Support::SingleFactor(*i),
        _ => Support::Mixed,
    }
}

/// A 2-plane in a tangent space, spanned by two tangents that are orthonormal
/// in the warped metric.
#[derive(Debug, Clone)]
pub struct CurvaturePlane {
    first: PreSegreTangent,
    second: PreSegreTangent,
}

impl CurvaturePlane {
    pub fn new(first: PreSegreTangent, second: PreSegreTangent) -> Result<Self, GeometryError> {
        let g11 = presegre::metric(&first, &first)?;
        let g22 = presegre::metric(&second, &second)?;
        let g12 = presegre::metric(&first, &second)?;
        if (g11 - 1.0).abs() > PLANE_TOL || (g22 - 1.0).abs() > PLANE_TOL || g12.abs() > PLANE_TOL {
            return Err(GeometryError::InvalidArgument(format!(
                "plane tangents are not orthonormal: |v|^2 = {g11}, |w|^2 = {g22}, <v,w> = {g12}"
            )));
        }
        Ok(Self { first, second })
    }

    pub fn at(&self) -> &PreSegrePoint {
        self.first.base()
    }

    pub fn first(&self) -> &PreSegreTangent {
        &self.first
    }

    pub fn second(&self) -> &PreSegreTangent {
        &self.second
    }
}

/// Closed-form sectional curvature on the supported planes.
///
/// For spanning directions inside factor spheres `i` and `j`:
/// `K = (1 − kᵢ α²) / (kᵢ α² λ²)` when `i = j` (so `(1−α²)/(α²λ²)` for a plain
/// multiplicity-1 factor) and `K = −1/λ²` when `i ≠ j`. Planes containing the
/// radial direction are flat. Tangents spread over several factors would need
/// the full Riemann tensor and are rejected.
pub fn sectional_curvature(plane: &CurvaturePlane) -> Result<f64, GeometryError> {
    let shape = plane.at().shape();
    let lambda = plane.at().lambda();
    let alpha = shape.alpha();
    let s1 = support_of(plane.first());
    let s2 = support_of(plane.second());
    match (s1, s2) {
        (Support::Mixed, _) | (_, Support::Mixed) => Err(GeometryError::UnsupportedPlane(
            "tangent is supported on several factors (or mixes radial and spherical parts)".into(),
        )),
        (Support::Radial, Support::Radial) => Err(GeometryError::UnsupportedPlane(
            "tangents are both radial and cannot span a plane".into(),
        )),
        (Support::Radial, Support::SingleFactor(_))
        | (Support::SingleFactor(_), Support::Radial) => Ok(0.0),
        (Support::SingleFactor(i), Support::SingleFactor(j)) => {
            if i == j {
                let k = shape.mults()[i] as f64;
                Ok((1.0 - k * alpha * alpha) / (k * alpha * alpha * lambda * lambda))
            } else {
                Ok(-1.0 / (lambda * lambda))
            }
        }
    }
}

/// Curvature estimate from the circumference defect of a geodesic circle of
/// radius `r`: `K̂ = 6 (2πr − C(r)) / (2πr³)`, with `C(r)` accumulated from
/// 4096 chord lengths. Valid for `r ≤ 0.05 λ`.
pub fn estimate_curvature_bdp(plane: &CurvaturePlane, r: f64) -> Result<f64, GeometryError> {
    let lambda = plane.at().lambda();
    if r.is_nan() || r <= 0.0 || r > 0.05 * lambda {
        return Err(GeometryError::InvalidArgument(format!(
            "geodesic-circle radius {r} outside (0, {}]",
            0.05 * lambda
        )));
    }
    let samples = 4096usize;
    let mut points = Vec::with_capacity(samples);
    for j in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
        let dir = plane
            .first()
            .scaled(r * theta.cos())
            .add(&plane.second().scaled(r * theta.sin()))?;
        points.push(presegre::pre_exp(&dir)?);
    }
    let mut circumference = 0.0;
    for j in 0..samples {
        let (chord, connected) = presegre::pre_distance(&points[j], &points[(j + 1) % samples])?;
        debug_assert!(connected);
        circumference += chord;
    }
    // Undo the inscribed-polygon deficit: a smooth arc of parameter width
    // dphi exceeds its chord by the factor (dphi/2)/sin(dphi/2).
    let dphi = std::f64::consts::PI / samples as f64;
    circumference *= dphi / dphi.sin();
    let tau = 2.0 * std::f64::consts::PI;
    Ok(6.0 * (tau * r - circumference) / (tau * r * r * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presegre::ManifoldShape;

    fn shape(dims: &[usize], mults: &[usize], alpha: f64) -> ManifoldShape {
        ManifoldShape::new(dims.to_vec(), mults.to_vec(), alpha).unwrap()
    }

    fn base_point(s: &ManifoldShape, lambda: f64) -> PreSegrePoint {
        let factors = s
            .dims()
            .iter()
            .map(|&n| {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            })
            .collect();
        PreSegrePoint::from_coords(s.clone(), lambda, factors).unwrap()
    }

    /// Unit spherical tangent supported in factor `i` along coordinate `axis`.
    fn spherical_unit(p: &PreSegrePoint, i: usize, axis: usize) -> PreSegreTangent {
        let s = p.shape();
        let scale = 1.0 / (s.alpha() * p.lambda() * (s.mults()[i] as f64).sqrt());
        let dots = (0..s.factor_count())
            .map(|j| {
                let mut v = vec![0.0; s.dims()[j]];
                if j == i {
                    v[axis] = scale;
                }
                v
            })
            .collect();
        PreSegreTangent::new(p.clone(), 0.0, dots).unwrap()
    }

    fn radial_unit(p: &PreSegrePoint) -> PreSegreTangent {
        PreSegreTangent::radial(p.clone(), 1.0)
    }

    #[test]
    fn plane_requires_orthonormal_tangents() {
        let s = shape(&[3], &[1], 1.0);
        let p = base_point(&s, 1.0);
        let v = spherical_unit(&p, 0, 1);
        assert!(CurvaturePlane::new(v.clone(), v.clone()).is_err());
        let not_unit = v.scaled(0.5);
        assert!(CurvaturePlane::new(not_unit, spherical_unit(&p, 0, 2)).is_err());
        assert!(CurvaturePlane::new(v, spherical_unit(&p, 0, 2)).is_ok());
    }

    #[test]
    fn closed_form_branches() {
        // Same factor, multiplicity 1: (1 - alpha^2) / (alpha^2 lambda^2).
        let s = shape(&[3], &[1], 1.0);
        let p = base_point(&s, 2.7);
        let plane =
            CurvaturePlane::new(spherical_unit(&p, 0, 1), spherical_unit(&p, 0, 2)).unwrap();
        assert_eq!(sectional_curvature(&plane).unwrap(), 0.0);

        let s = shape(&[3], &[1], 0.5);
        let p = base_point(&s, 2.0);
        let plane =
            CurvaturePlane::new(spherical_unit(&p, 0, 1), spherical_unit(&p, 0, 2)).unwrap();
        assert!((sectional_curvature(&plane).unwrap() - 0.75).abs() < 1e-14);

        // Distinct factors: -1/lambda^2 independent of alpha.
        let s = shape(&[2, 2], &[1, 1], 1.0);
        let p = base_point(&s, 1.0);
        let plane =
            CurvaturePlane::new(spherical_unit(&p, 0, 1), spherical_unit(&p, 1, 1)).unwrap();
        assert!((sectional_curvature(&plane).unwrap() + 1.0).abs() < 1e-14);

        // Radial + spherical: flat.
        let plane = CurvaturePlane::new(radial_unit(&p), spherical_unit(&p, 0, 1)).unwrap();
        assert_eq!(sectional_curvature(&plane).unwrap(), 0.0);
    }

    #[test]
    fn multiplicity_enters_the_same_factor_branch() {
        // k = 2: the factor sphere carries weight 2, so K = (1 - 2 alpha^2) /
        // (2 alpha^2 lambda^2); checked against the estimator below.
        let s = shape(&[3], &[2], 1.0);
        let p = base_point(&s, 1.0);
        let plane =
            CurvaturePlane::new(spherical_unit(&p, 0, 1), spherical_unit(&p, 0, 2)).unwrap();
        let k = sectional_curvature(&plane).unwrap();
        assert!((k - (-0.5)).abs() < 1e-14);
        let est = estimate_curvature_bdp(&plane, 0.01).unwrap();
        assert!((est - k).abs() < k.abs() * 0.05 + 0.05);
    }

    #[test]
    fn mixed_support_rejected() {
        let s = shape(&[2, 2], &[1, 1], 1.0);
        let p = base_point(&s, 1.0);
        let a = spherical_unit(&p, 0, 1);
        let b = spherical_unit(&p, 1, 1);
        let mixed = a
            .scaled(f64::sqrt(0.5))
            .add(&b.scaled(f64::sqrt(0.5)))
            .unwrap();
        let err = CurvaturePlane::new(mixed, radial_unit(&p))
            .and_then(|plane| sectional_curvature(&plane));
        assert!(matches!(err, Err(GeometryError::UnsupportedPlane(_))));
    }

    #[test]
    fn bdp_flat_plane_of_the_punctured_plane() {
        // d = 1, n = 2, k = 1, alpha = 1 is the Euclidean punctured plane.
        let s = shape(&[2], &[1], 1.0);
        let p = base_point(&s, 1.0);
        let plane = CurvaturePlane::new(radial_unit(&p), spherical_unit(&p, 0, 1)).unwrap();
        let est = estimate_curvature_bdp(&plane, 0.01).unwrap();
        assert!(est.abs() < 0.05, "estimate {est}");
    }

    #[test]
    fn bdp_matches_closed_form_on_reference_planes() {
        // alpha = 1, lambda = 1, i != j: K = -1.
        let s = shape(&[2, 2], &[1, 1], 1.0);
        let p = base_point(&s, 1.0);
        let plane =
            CurvaturePlane::new(spherical_unit(&p, 0, 1), spherical_unit(&p, 1, 1)).unwrap();
        let est = estimate_curvature_bdp(&plane, 0.01).unwrap();
        assert!((est + 1.0).abs() < 0.1, "estimate {est}");

        // alpha = 0.5, lambda = 2, i = j: K = 0.75.
        let s = shape(&[3], &[1], 0.5);
        let p = base_point(&s, 2.0);
        let plane =
            CurvaturePlane::new(spherical_unit(&p, 0, 1), spherical_unit(&p, 0, 2)).unwrap();
        let est = estimate_curvature_bdp(&plane, 0.02).unwrap();
        assert!((est - 0.75).abs() < 0.75 * 0.05 + 0.05, "estimate {est}");
    }

    #[test]
    fn bdp_radius_guard() {
        let s = shape(&[2], &[1], 1.0);
        let p = base_point(&s, 1.0);
        let plane = CurvaturePlane::new(radial_unit(&p), spherical_unit(&p, 0, 1)).unwrap();
        assert!(estimate_curvature_bdp(&plane, 0.2).is_err());
    }
}
