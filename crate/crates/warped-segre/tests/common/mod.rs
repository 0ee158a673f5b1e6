//! Seeded random-instance generators shared by the integration suites.
#![allow(dead_code)] // each suite uses its own subset

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use warped_segre::presegre::{ManifoldShape, PreSegrePoint, PreSegreTangent};
use warped_segre::sphere::UnitVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        if let Ok(u) = UnitVector::normalized(v) {
            return u;
        }
    }
}

/// A unit direction orthogonal to `u`.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, u: &UnitVector) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..u.dim())
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        let inner: f64 = raw.iter().zip(u.coords()).map(|(a, b)| a * b).sum();
        let perp: Vec<f64> = raw
            .iter()
            .zip(u.coords())
            .map(|(a, b)| a - inner * b)
            .collect();
        let n: f64 = perp.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return perp.iter().map(|x| x / n).collect();
        }
    }
}

/// Random shape with d <= 4, n_i <= 6, k_i <= 3.
pub fn random_shape(rng: &mut ChaCha8Rng, alpha: f64) -> ManifoldShape {
    let d = rng.random_range(1..=4usize);
    let dims: Vec<usize> = (0..d).map(|_| rng.random_range(2..=6usize)).collect();
    let mults: Vec<usize> = (0..d).map(|_| rng.random_range(1..=3usize)).collect();
    ManifoldShape::new(dims, mults, alpha).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, shape: &ManifoldShape) -> PreSegrePoint {
    let lambda = 0.5 + 1.5 * rng.random::<f64>();
    let factors = shape.dims().iter().map(|&n| random_unit(rng, n)).collect();
    PreSegrePoint::new(shape.clone(), lambda, factors).unwrap()
}

/// Rotates factor `i` of `p` by `theta[i]` toward a random orthogonal
/// direction and draws a fresh radius: a point at exact spherical distance
/// `sqrt(sum k_i theta_i^2)` from `p`.
pub fn point_at_angles(rng: &mut ChaCha8Rng, p: &PreSegrePoint, thetas: &[f64]) -> PreSegrePoint {
    let factors = p
        .factors()
        .iter()
        .zip(thetas)
        .map(|(u, &t)| {
            let w = random_orthogonal(rng, u);
            let coords: Vec<f64> = u
                .coords()
                .iter()
                .zip(&w)
                .map(|(a, b)| a * t.cos() + b * t.sin())
                .collect();
            UnitVector::normalized(coords).unwrap()
        })
        .collect();
    let mu = 0.5 + 1.5 * rng.random::<f64>();
    PreSegrePoint::new(p.shape().clone(), mu, factors).unwrap()
}

/// Per-factor angles with weighted norm `m_target`, each capped below pi.
pub fn angles_for_target(rng: &mut ChaCha8Rng, shape: &ManifoldShape, m_target: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..shape.factor_count())
        .map(|_| 0.2 + 0.8 * rng.random::<f64>())
        .collect();
    let norm: f64 = shape
        .mults()
        .iter()
        .zip(&raw)
        .map(|(&k, r)| k as f64 * r * r)
        .sum::<f64>()
        .sqrt();
    let mut c = m_target / norm;
    let max_angle = raw.iter().cloned().fold(0.0, f64::max) * c;
    if max_angle > PI - 0.15 {
        c *= (PI - 0.15) / max_angle;
    }
    raw.iter().map(|r| r * c).collect()
}

/// Random compatible pair on `shape` with alpha*M about `frac` of pi.
pub fn compatible_pair(
    rng: &mut ChaCha8Rng,
    shape: &ManifoldShape,
    frac: f64,
) -> (PreSegrePoint, PreSegrePoint) {
    let p = random_point(rng, shape);
    let m_target = frac * PI / shape.alpha();
    let thetas = angles_for_target(rng, shape, m_target);
    let q = point_at_angles(rng, &p, &thetas);
    (p, q)
}

/// Random in-domain tangent whose starting geodesic stays factor-wise
/// non-antipodal, so exp/log round trips are well posed.
pub fn safe_tangent(rng: &mut ChaCha8Rng, p: &PreSegrePoint) -> PreSegreTangent {
    let lambda_dot = (rng.random::<f64>() * 2.0 - 1.0) * 1.5 * p.lambda();
    let dots: Vec<Vec<f64>> = p
        .factors()
        .iter()
        .map(|u| {
            let w = random_orthogonal(rng, u);
            let s = rng.random::<f64>() * 1.2;
            w.iter().map(|x| x * s).collect()
        })
        .collect();
    let mut v = PreSegreTangent::new(p.clone(), lambda_dot, dots).unwrap();
    // Halve until every factor sweeps an arc well below pi.
    loop {
        let coeff = warped_segre::presegre::GeodesicCoefficients::from_tangent(&v);
        if coeff.big_n() == 0.0 || coeff.angles().iter().all(|&a| a < 2.8) {
            break;
        }
        v = v.scaled(0.5);
    }
    // Keep the radial part inside the domain when the spherical part is zero.
    if PreSegreTangent::norm(&v) == 0.0 || v.factor_dots().iter().all(|w| w.norm() == 0.0) {
        let ld = v.lambda_dot().max(-0.9 * p.lambda());
        return PreSegreTangent::radial(p.clone(), ld);
    }
    v
}
