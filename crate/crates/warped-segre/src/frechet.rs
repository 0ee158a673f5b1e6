//! Fréchet means (Riemannian centers of mass) of rank-1 tensors: a one-pass
//! geodesic-interpolation estimate refined by Riemannian gradient descent on
//! the sum of squared distances.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GeometryError;
use crate::presegre::PreSegreTangent;
use crate::segre::{self, SegrePoint, SegreTangent};

/// Iteration controls for the mean estimators.
#[derive(Debug, Clone)]
pub struct MeanConfig {
    /// Gradient-descent iteration cap.
    pub max_iters: usize,
    /// Stop once the mean log (the Riemannian gradient, up to sign) has warped
    /// norm at most this.
    pub grad_tol: f64,
    /// Step size in (0, 1]; 1 is the plain fixed-point update.
    pub step: f64,
    /// When set, [`inductive_mean`] visits the points in a seeded shuffled
    /// order instead of input order.
    pub shuffle_seed: Option<u64>,
}

impl Default for MeanConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-9,
            step: 1.0,
            shuffle_seed: None,
        }
    }
}

impl MeanConfig {
    fn validate(&self) -> Result<(), GeometryError> {
        if self.max_iters < 1 {
            return Err(GeometryError::InvalidArgument(
                "max_iters must be at least 1".into(),
            ));
        }
        if self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            return Err(GeometryError::InvalidArgument(
                "grad_tol must be positive".into(),
            ));
        }
        if self.step.is_nan() || self.step <= 0.0 || self.step > 1.0 {
            return Err(GeometryError::InvalidArgument(
                "step must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// The warping factor `1/√(k₁+⋯+k_d) − √ε` (ε = double machine epsilon) that
/// keeps the whole manifold geodesically connected, so means of arbitrary
/// point sets are defined.
pub fn default_mean_alpha(total_multiplicity: usize) -> f64 {
    1.0 / (total_multiplicity as f64).sqrt() - f64::EPSILON.sqrt()
}

/// Deterministic pairwise-tree sum of tangents at a common base point, so the
/// reduction order (and hence the rounding) never depends on scheduling.
fn tree_sum(tangents: &[PreSegreTangent]) -> Result<PreSegreTangent, GeometryError> {
    match tangents.len() {
        0 => Err(GeometryError::EmptyInput("tangent reduction")),
        1 => Ok(tangents[0].clone()),
        n => {
            let (lo, hi) = tangents.split_at(n / 2);
            tree_sum(lo)?.add(&tree_sum(hi)?)
        }
    }
}

/// Successive geodesic interpolation: `m₁ = x₁`,
/// `mⱼ = exp_{mⱼ₋₁}((1/j) log_{mⱼ₋₁}(xⱼ))`. Cheap, order-dependent, and exact
/// for `n ≤ 2`; used as the warm start for [`refine_mean`].
pub fn inductive_mean(
    points: &[SegrePoint],
    cfg: &MeanConfig,
) -> Result<SegrePoint, GeometryError> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(GeometryError::EmptyInput("inductive_mean needs a point"));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    if let Some(seed) = cfg.shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut mean = points[order[0]].clone();
    for (j, &idx) in order.iter().enumerate().skip(1) {
        let step = segre::segre_log(&mean, &points[idx])?
            .coords()
            .scaled(1.0 / (j + 1) as f64);
        mean = segre::segre_exp(&SegreTangent::new(mean, step)?)?;
    }
    Ok(mean)
}

/// Riemannian gradient descent for the Fréchet mean
/// `arg min Σᵢ dist(m, xᵢ)²`: iterates
/// `m ← exp_m((step/n) Σᵢ log_m(xᵢ))` until the mean log has norm at most
/// `grad_tol`.
///
/// On hitting the iteration cap the error carries the last iterate.
pub fn refine_mean(
    points: &[SegrePoint],
    init: &SegrePoint,
    cfg: &MeanConfig,
) -> Result<SegrePoint, GeometryError> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(GeometryError::EmptyInput("refine_mean needs a point"));
    }
    let n = points.len() as f64;
    let mut mean = init.clone();
    let mut grad_norm = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        let logs = points
            .iter()
            .map(|x| Ok(segre::segre_log(&mean, x)?.coords().clone()))
            .collect::<Result<Vec<_>, GeometryError>>()?;
        let grad = tree_sum(&logs)?.scaled(1.0 / n);
        grad_norm = grad.norm();
        if grad_norm <= cfg.grad_tol {
            return Ok(mean);
        }
        let update = SegreTangent::new(mean, grad.scaled(cfg.step))?;
        mean = segre::segre_exp(&update)?;
    }
    Err(GeometryError::MaxItersExceeded {
        max_iters: cfg.max_iters,
        grad_norm,
        last: Box::new(mean),
    })
}

/// The Fréchet objective `Σᵢ dist(at, xᵢ)²`.
pub fn frechet_objective(points: &[SegrePoint], at: &SegrePoint) -> Result<f64, GeometryError> {
    let mut total = 0.0;
    for x in points {
        let (d, _) = segre::segre_distance(at, x)?;
        total += d * d;
    }
    Ok(total)
}
