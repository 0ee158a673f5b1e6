//! Numerical oracles that validate the closed-form geodesics independently:
//! finite-difference/trapezoid length measurement along piecewise-geodesic
//! paths, the explicit near-puncture bypass for incompatible endpoints, and a
//! variational relaxation that searches for shortest discrete paths without
//! ever consulting the distance formula.

use crate::error::GeometryError;
use crate::linalg::{self, clamp_unit, dot};
use crate::presegre::{self, PreSegrePoint, PreSegreTangent};
use crate::sphere::{self, UnitVector};

/// Finite-difference half-step used when measuring curve speeds.
const FD_STEP: f64 = 1e-5;

/// A piecewise path: consecutive nodes are joined by minimizing geodesic
/// segments, so they must be pairwise compatible.
#[derive(Debug, Clone)]
pub struct PolyPath {
    nodes: Vec<PreSegrePoint>,
}

impl PolyPath {
    pub fn new(nodes: Vec<PreSegrePoint>) -> Result<Self, GeometryError> {
        if nodes.len() < 2 {
            return Err(GeometryError::InvalidArgument(
                "a path needs at least two nodes".into(),
            ));
        }
        for pair in nodes.windows(2) {
            if !presegre::is_compatible(&pair[0], &pair[1])? {
                return Err(GeometryError::Incompatible {
                    alpha_m: pair[0].shape().alpha()
                        * presegre::spherical_distance(&pair[0], &pair[1])?,
                });
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[PreSegrePoint] {
        &self.nodes
    }
}

/// Ambient warped speed of the curve `t ↦ exp(t·v)` at `t`, measured by a
/// central difference of the curve coordinates.
fn fd_speed(v: &PreSegreTangent, t: f64) -> Result<f64, GeometryError> {
    let fwd = presegre::geodesic_sample(v, t + FD_STEP)?;
    let bwd = presegre::geodesic_sample(v, t - FD_STEP)?;
    let shape = v.base().shape();
    let lambda_mid = 0.5 * (fwd.lambda() + bwd.lambda());
    let d_lambda = fwd.lambda() - bwd.lambda();
    let mut spherical = 0.0;
    for ((&k, uf), ub) in shape.mults().iter().zip(fwd.factors()).zip(bwd.factors()) {
        let diff = linalg::sub(uf.coords(), ub.coords());
        spherical += k as f64 * dot(&diff, &diff);
    }
    let al = shape.alpha() * lambda_mid;
    Ok(f64::sqrt(d_lambda * d_lambda + al * al * spherical) / (2.0 * FD_STEP))
}

/// Trapezoid length of one geodesic segment from finite-difference speeds.
fn segment_length(v: &PreSegreTangent, panels: usize) -> Result<f64, GeometryError> {
    let h = 1.0 / panels as f64;
    let mut total = 0.5 * (fd_speed(v, 0.0)? + fd_speed(v, 1.0)?);
    for j in 1..panels {
        total += fd_speed(v, j as f64 * h)?;
    }
    Ok(total * h)
}

/// Trapezoid quadrature of the warped-metric speed along the path, with the
/// given number of panels per segment (1000 is the intended baseline).
pub fn path_length_with_panels(
    path: &PolyPath,
    panels_per_segment: usize,
) -> Result<f64, GeometryError> {
    if panels_per_segment == 0 {
        return Err(GeometryError::InvalidArgument(
            "zero quadrature panels".into(),
        ));
    }
    let mut total = 0.0;
    for pair in path.nodes.windows(2) {
        let v = presegre::pre_log(&pair[0], &pair[1])?;
        total += segment_length(&v, panels_per_segment)?;
    }
    Ok(total)
}

/// [`path_length_with_panels`] at the baseline 1000 panels per segment.
pub fn path_length(path: &PolyPath) -> Result<f64, GeometryError> {
    path_length_with_panels(path, 1000)
}

/// The three-part bypass around the puncture: straight down from `p` to
/// radius `epsilon`, a spherical sweep at that radius (subdivided into
/// `arc_segments` geodesic chords), and straight up to `q`. Its length tends
/// to `λ + μ + (αM − 2)ε` as the subdivision refines, which is how the
/// distance between incompatible points is approached.
pub fn bypass_path(
    p: &PreSegrePoint,
    q: &PreSegrePoint,
    epsilon: f64,
    arc_segments: usize,
) -> Result<PolyPath, GeometryError> {
    let shape = p.shape().clone();
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon >= p.lambda().min(q.lambda()) {
        return Err(GeometryError::InvalidArgument(format!(
            "bypass radius {epsilon} must lie in (0, min(lambda, mu))"
        )));
    }
    let m = presegre::spherical_distance(p, q)?;
    let min_segments = (shape.alpha() * m / std::f64::consts::PI).ceil() as usize + 1;
    if arc_segments < min_segments.max(1) {
        return Err(GeometryError::InvalidArgument(format!(
            "need at least {min_segments} arc segments to keep consecutive nodes compatible"
        )));
    }
    // Per-factor great-circle sweeps from u_i to v_i.
    let logs = p
        .factors()
        .iter()
        .zip(q.factors())
        .map(|(u, v)| sphere::sphere_log(u, v))
        .collect::<Result<Vec<_>, _>>()?;

    let mut nodes = Vec::with_capacity(arc_segments + 3);
    nodes.push(p.clone());
    for j in 0..=arc_segments {
        let s = j as f64 / arc_segments as f64;
        let factors: Vec<UnitVector> = logs
            .iter()
            .map(|w| sphere::sphere_exp(&w.scaled(s)))
            .collect();
        nodes.push(PreSegrePoint::new(shape.clone(), epsilon, factors)?);
    }
    nodes.push(q.clone());
    PolyPath::new(nodes)
}

/// Interior state of the variational relaxation: radius plus raw factor
/// coordinates per node.
struct PathState {
    lambdas: Vec<f64>,
    factors: Vec<Vec<Vec<f64>>>,
}

/// Gradient, with respect to the `x` node, of the squared discrete chord
/// `(λ_x − λ_a)² + (α (λ_a+λ_x)/2)² Σ kᵢ θᵢ²` in the warped metric, added
/// into `(g_lambda, g_factors)`. The chord touches only the metric
/// coefficients and great-circle angles, never the geodesic formulas under
/// test. The factor parts are ambient; projection onto the sphere tangent
/// happens at the update.
#[allow(clippy::too_many_arguments)]
fn add_chord_grad(
    alpha: f64,
    mults: &[usize],
    la: f64,
    fa: &[Vec<f64>],
    lx: f64,
    fx: &[Vec<f64>],
    g_lambda: &mut f64,
    g_factors: &mut [Vec<f64>],
) {
    let mid = 0.5 * (la + lx);
    let mut d2 = 0.0;
    let mut thetas = Vec::with_capacity(mults.len());
    for ((&k, ua), ux) in mults.iter().zip(fa).zip(fx) {
        let c = clamp_unit(dot(ua, ux));
        let theta = c.acos();
        thetas.push(theta);
        d2 += k as f64 * theta * theta;
    }
    *g_lambda += 2.0 * (lx - la) + alpha * alpha * mid * d2;
    let w = alpha * alpha * mid * mid;
    for (i, &k) in mults.iter().enumerate() {
        // d(theta^2)/dx = -2 (theta/sin theta) * u_a   (ambient form)
        let theta = thetas[i];
        let ratio = if theta < 1e-8 {
            1.0
        } else {
            theta / theta.sin()
        };
        let coeff = -2.0 * w * k as f64 * ratio;
        for (g, &a) in g_factors[i].iter_mut().zip(&fa[i]) {
            *g += coeff * a;
        }
    }
}

/// Shortest-path oracle: relaxes the interior nodes of a discrete path from
/// `p` to `q` by Gauss–Seidel sweeps on the chord energy `Σ ‖Δ‖²` (whose
/// minimizers are equally spaced discrete geodesics), then measures the
/// relaxed piecewise-geodesic path by quadrature.
pub fn minimize_path(
    p: &PreSegrePoint,
    q: &PreSegrePoint,
    nodes: usize,
) -> Result<(f64, PolyPath), GeometryError> {
    if nodes < 8 {
        return Err(GeometryError::InvalidArgument(
            "the relaxation needs at least 8 nodes".into(),
        ));
    }
    if !presegre::is_compatible(p, q)? {
        return Err(GeometryError::Incompatible {
            alpha_m: p.shape().alpha() * presegre::spherical_distance(p, q)?,
        });
    }
    let shape = p.shape().clone();
    let alpha = shape.alpha();
    let mults = shape.mults().to_vec();
    let d = shape.factor_count();

    // Initial guess: linear radius, per-factor great-circle interpolation.
    let logs = p
        .factors()
        .iter()
        .zip(q.factors())
        .map(|(u, v)| sphere::sphere_log(u, v))
        .collect::<Result<Vec<_>, _>>()?;
    let mut state = PathState {
        lambdas: Vec::with_capacity(nodes),
        factors: Vec::with_capacity(nodes),
    };
    for j in 0..nodes {
        let s = j as f64 / (nodes - 1) as f64;
        state.lambdas.push((1.0 - s) * p.lambda() + s * q.lambda());
        state.factors.push(
            logs.iter()
                .map(|w| sphere::sphere_exp(&w.scaled(s)).coords().to_vec())
                .collect(),
        );
    }

    let scale = p.lambda().max(q.lambda());
    let max_sweeps = 40_000usize;
    let residual_stop = 1e-10 * scale;
    let rate = 0.8;

    let mut residual = f64::INFINITY;
    for sweep in 0..max_sweeps {
        residual = 0.0;
        // Alternate the sweep direction so corrections propagate both ways.
        let order: Vec<usize> = if sweep % 2 == 0 {
            (1..nodes - 1).collect()
        } else {
            (1..nodes - 1).rev().collect()
        };
        for j in order {
            let mut g_lambda = 0.0;
            let mut g_factors: Vec<Vec<f64>> = (0..d).map(|i| vec![0.0; shape.dims()[i]]).collect();
            let (left, rest) = state.factors.split_at(j);
            let (cur, right) = rest.split_first().expect("interior node");
            add_chord_grad(
                alpha,
                &mults,
                state.lambdas[j - 1],
                &left[j - 1],
                state.lambdas[j],
                cur,
                &mut g_lambda,
                &mut g_factors,
            );
            add_chord_grad(
                alpha,
                &mults,
                state.lambdas[j + 1],
                &right[0],
                state.lambdas[j],
                cur,
                &mut g_lambda,
                &mut g_factors,
            );

            // Damped Newton by the diagonal of the chord-energy Hessian: the
            // lambda block is ~4, the factor-i block ~4 alpha^2 lambda^2 k_i.
            let new_lambda = (state.lambdas[j] - rate * g_lambda / 4.0).max(1e-8 * scale);
            residual = residual.max((new_lambda - state.lambdas[j]).abs());
            state.lambdas[j] = new_lambda;

            let wl = alpha * state.lambdas[j];
            for i in 0..d {
                let precond = 4.0 * wl * wl * mults[i] as f64;
                // Project the ambient gradient onto the tangent space at u,
                // step against it, and retract by normalization.
                let u = &state.factors[j][i];
                let radial = dot(&g_factors[i], u);
                let moved: Vec<f64> = u
                    .iter()
                    .zip(&g_factors[i])
                    .map(|(x, g)| x - rate * (g - radial * x) / precond)
                    .collect();
                let new_u = linalg::scale(&moved, 1.0 / linalg::norm(&moved));
                let delta = new_u
                    .iter()
                    .zip(u)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                residual = residual.max(delta * wl);
                state.factors[j][i] = new_u;
            }
        }
        if residual < residual_stop {
            break;
        }
    }
    if residual > 1e-6 * scale {
        return Err(GeometryError::NoConvergence {
            sweeps: max_sweeps,
            residual,
        });
    }

    let mut path_nodes = Vec::with_capacity(nodes);
    path_nodes.push(p.clone());
    for j in 1..nodes - 1 {
        let factors = state.factors[j]
            .iter()
            .map(|f| UnitVector::normalized(f.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        path_nodes.push(PreSegrePoint::new(
            shape.clone(),
            state.lambdas[j],
            factors,
        )?);
    }
    path_nodes.push(q.clone());
    let path = PolyPath::new(path_nodes)?;
    let length = path_length_with_panels(&path, 128)?;
    Ok((length, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presegre::ManifoldShape;
    use std::f64::consts::PI;

    fn plane_shape(alpha: f64) -> ManifoldShape {
        ManifoldShape::new(vec![2], vec![1], alpha).unwrap()
    }

    fn plane_point(s: &ManifoldShape, lambda: f64, angle: f64) -> PreSegrePoint {
        PreSegrePoint::from_coords(s.clone(), lambda, vec![vec![angle.cos(), angle.sin()]]).unwrap()
    }

    #[test]
    fn radial_segment_length() {
        let s = plane_shape(1.3);
        let a = plane_point(&s, 1.0, 0.0);
        let b = plane_point(&s, 2.0, 0.0);
        let path = PolyPath::new(vec![a, b]).unwrap();
        let len = path_length(&path).unwrap();
        assert!((len - 1.0).abs() < 1e-9, "length {len}");
    }

    #[test]
    fn geodesic_segment_reproduces_distance() {
        let s = plane_shape(1.0);
        let a = plane_point(&s, 1.0, 0.0);
        let b = plane_point(&s, 2.0, PI / 3.0);
        let path = PolyPath::new(vec![a.clone(), b.clone()]).unwrap();
        let len = path_length_with_panels(&path, 10_000).unwrap();
        let (dist, _) = presegre::pre_distance(&a, &b).unwrap();
        assert!((len - dist).abs() / dist < 1e-6, "len {len} vs dist {dist}");
        assert!((dist - f64::sqrt(3.0)).abs() < 1e-14);
    }

    #[test]
    fn path_rejects_incompatible_consecutive_nodes() {
        let s = plane_shape(2.0);
        let a = plane_point(&s, 1.0, 0.0);
        let b = plane_point(&s, 1.0, PI);
        assert!(matches!(
            PolyPath::new(vec![a, b]),
            Err(GeometryError::Incompatible { .. })
        ));
    }

    #[test]
    fn bypass_length_formula() {
        // alpha = 2 at circle angle 2.8: alpha * M = 5.6 >= pi, incompatible
        // without any factor being antipodal.
        let s = plane_shape(2.0);
        let p = plane_point(&s, 1.0, 0.0);
        let q = plane_point(&s, 2.0, 2.8);
        let alpha_m = 2.0 * 2.8;
        let eps = 1e-3;
        let path = bypass_path(&p, &q, eps, 512).unwrap();
        let len = path_length_with_panels(&path, 200).unwrap();
        let expect = 1.0 + 2.0 + (alpha_m - 2.0) * eps;
        assert!((len - expect).abs() < 1e-6, "len {len} vs {expect}");
    }

    #[test]
    fn bypass_guards() {
        let s = plane_shape(2.0);
        let p = plane_point(&s, 1.0, 0.0);
        let q = plane_point(&s, 2.0, PI / 2.0);
        assert!(bypass_path(&p, &q, 2.0, 64).is_err());
        assert!(bypass_path(&p, &q, 1e-3, 1).is_err());
    }

    #[test]
    fn relaxation_recovers_known_distances() {
        // (0,1) -> (1,0) through the Euclidean punctured plane: sqrt(2).
        let s = plane_shape(1.0);
        let p = plane_point(&s, 1.0, PI / 2.0);
        let q = plane_point(&s, 1.0, 0.0);
        let (len, _) = minimize_path(&p, &q, 64).unwrap();
        assert!((len - f64::sqrt(2.0)).abs() < 1e-3, "length {len}");

        // lambda = 1, mu = 2, alpha M = pi/3: sqrt(3).
        let a = plane_point(&s, 1.0, 0.0);
        let b = plane_point(&s, 2.0, PI / 3.0);
        let (len2, path) = minimize_path(&a, &b, 64).unwrap();
        assert!((len2 - f64::sqrt(3.0)).abs() < 1e-3, "length {len2}");
        // A discrete path cannot undercut the true infimum.
        let (dist, _) = presegre::pre_distance(&a, &b).unwrap();
        assert!(len2 >= dist - 1e-4);
        assert_eq!(path.nodes().len(), 64);
    }

    #[test]
    fn relaxation_collapsed_endpoints() {
        let s = plane_shape(1.0);
        let p = plane_point(&s, 1.0, 0.3);
        let (len, _) = minimize_path(&p, &p, 16).unwrap();
        assert!(len.abs() < 1e-12);
    }

    #[test]
    fn relaxation_rejects_incompatible_endpoints() {
        let s = plane_shape(2.0);
        let p = plane_point(&s, 1.0, 0.0);
        let q = plane_point(&s, 1.0, PI);
        assert!(matches!(
            minimize_path(&p, &q, 32),
            Err(GeometryError::Incompatible { .. })
        ));
    }

    #[test]
    fn sampled_geodesic_path_has_the_tangent_norm_as_length() {
        // Nodes taken along one geodesic form a path whose measured length is
        // the launching tangent's metric norm.
        let s = ManifoldShape::new(vec![3], vec![2], 0.6).unwrap();
        let p = PreSegrePoint::from_coords(s, 1.1, vec![vec![0.0, 0.6, 0.8]]).unwrap();
        let v = PreSegreTangent::new(p, 0.7, vec![vec![0.9, -0.24, 0.18]]).unwrap();
        let nodes: Vec<PreSegrePoint> = (0..=4)
            .map(|j| presegre::geodesic_sample(&v, j as f64 / 4.0).unwrap())
            .collect();
        let len = path_length(&PolyPath::new(nodes).unwrap()).unwrap();
        let expect = v.norm();
        assert!(
            ((len - expect) / expect).abs() < 1e-6,
            "length {len} vs tangent norm {expect}"
        );
    }

    #[test]
    fn constant_speed_along_sampled_geodesics() {
        let s = ManifoldShape::new(vec![3, 2], vec![1, 2], 0.8).unwrap();
        let p =
            PreSegrePoint::from_coords(s, 1.2, vec![vec![0.0, 0.6, 0.8], vec![1.0, 0.0]]).unwrap();
        let v =
            PreSegreTangent::new(p, -0.4, vec![vec![0.5, 0.16, -0.12], vec![0.0, 0.9]]).unwrap();
        let expected = v.norm();
        for j in 0..=10 {
            let t = j as f64 / 10.0;
            let speed = fd_speed(&v, t).unwrap();
            assert!(
                (speed - expected).abs() / expected < 1e-4,
                "speed {speed} at t = {t}, expected {expected}"
            );
        }
    }
}
