//! Geometry of the α-warped pre-Segre–Veronese manifold
//! `𝒫 = ℝ₊ ×_{α·Id} (𝕊^{n₁−1} × ⋯ × 𝕊^{n_d−1})`, where the metric on sphere `i`
//! carries the multiplicity weight `kᵢ`:
//!
//! `g((ẋ, u̇₁..u̇_d), (ẏ, v̇₁..v̇_d)) = ẋẏ + (αλ)² Σᵢ kᵢ ⟨u̇ᵢ, v̇ᵢ⟩`.
//!
//! Points of this warped product are the factored representatives
//! `(λ, u₁, …, u_d)` of rank-1 tensors; the covering onto the tensor manifold
//! itself lives in [`crate::covering`].

use std::f64::consts::PI;

use crate::error::GeometryError;
use crate::linalg::{dot, sinc};
use crate::sphere::{self, SphereTangent, UnitVector, ANTIPODAL_MARGIN};

/// Factor dimensions `n₁..n_d`, multiplicities `k₁..k_d`, and the warping
/// factor `α` that together fix the manifold and its metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldShape {
    dims: Vec<usize>,
    mults: Vec<usize>,
    alpha: f64,
}

impl ManifoldShape {
    pub fn new(dims: Vec<usize>, mults: Vec<usize>, alpha: f64) -> Result<Self, GeometryError> {
        if dims.is_empty() || dims.len() != mults.len() {
            return Err(GeometryError::InvalidShape(format!(
                "need matching nonempty dims/mults, got {} and {}",
                dims.len(),
                mults.len()
            )));
        }
        if let Some(&n) = dims.iter().find(|&&n| n < 2) {
            return Err(GeometryError::InvalidShape(format!(
                "factor dimension {n} < 2"
            )));
        }
        if mults.contains(&0) {
            return Err(GeometryError::InvalidShape("multiplicity 0".into()));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(GeometryError::InvalidShape(format!(
                "warping factor {alpha} must be positive and finite"
            )));
        }
        Ok(Self { dims, mults, alpha })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of distinct factors `d`.
    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    /// `k₁ + ⋯ + k_d`.
    pub fn total_multiplicity(&self) -> usize {
        self.mults.iter().sum()
    }

    /// Entry count `Π nᵢ^{kᵢ}` of the dense tensor embedding.
    pub fn entry_count(&self) -> u128 {
        let mut total: u128 = 1;
        for (&n, &k) in self.dims.iter().zip(&self.mults) {
            for _ in 0..k {
                total = total.saturating_mul(n as u128);
            }
        }
        total
    }

    /// Same factors, different warping.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, GeometryError> {
        Self::new(self.dims.clone(), self.mults.clone(), alpha)
    }
}

/// A representative `(λ, u₁, …, u_d)` on the covering manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct PreSegrePoint {
    shape: ManifoldShape,
    lambda: f64,
    factors: Vec<UnitVector>,
}

impl PreSegrePoint {
    pub fn new(
        shape: ManifoldShape,
        lambda: f64,
        factors: Vec<UnitVector>,
    ) -> Result<Self, GeometryError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(GeometryError::InvalidLambda { lambda });
        }
        if factors.len() != shape.factor_count() {
            return Err(GeometryError::DimensionMismatch {
                expected: shape.factor_count(),
                got: factors.len(),
            });
        }
        for (u, &n) in factors.iter().zip(shape.dims()) {
            if u.dim() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: u.dim(),
                });
            }
        }
        Ok(Self {
            shape,
            lambda,
            factors,
        })
    }

    /// Convenience constructor validating unit norms of the raw factors.
    pub fn from_coords(
        shape: ManifoldShape,
        lambda: f64,
        factors: Vec<Vec<f64>>,
    ) -> Result<Self, GeometryError> {
        let factors = factors
            .into_iter()
            .map(UnitVector::new)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(shape, lambda, factors)
    }

    pub fn shape(&self) -> &ManifoldShape {
        &self.shape
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn factors(&self) -> &[UnitVector] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &UnitVector {
        &self.factors[i]
    }

    /// Componentwise comparison of `(λ, u₁, …, u_d)` within `tol`.
    pub fn approx_eq(&self, other: &PreSegrePoint, tol: f64) -> bool {
        if self.shape != other.shape {
            return false;
        }
        if (self.lambda - other.lambda).abs() > tol {
            return false;
        }
        self.factors.iter().zip(&other.factors).all(|(a, b)| {
            a.coords()
                .iter()
                .zip(b.coords())
                .all(|(x, y)| (x - y).abs() <= tol)
        })
    }
}

/// A tangent vector `(λ̇, u̇₁, …, u̇_d)` in factored coordinates, each `u̇ᵢ`
/// orthogonal to the factor it is attached to.
#[derive(Debug, Clone, PartialEq)]
pub struct PreSegreTangent {
    base: PreSegrePoint,
    lambda_dot: f64,
    factor_dots: Vec<SphereTangent>,
}

impl PreSegreTangent {
    /// Builds the tangent from raw per-factor velocity vectors, attaching
    /// each to the corresponding base factor (orthogonality is validated).
    pub fn new(
        base: PreSegrePoint,
        lambda_dot: f64,
        factor_dots: Vec<Vec<f64>>,
    ) -> Result<Self, GeometryError> {
        if factor_dots.len() != base.shape().factor_count() {
            return Err(GeometryError::DimensionMismatch {
                expected: base.shape().factor_count(),
                got: factor_dots.len(),
            });
        }
        let dots = base
            .factors()
            .iter()
            .zip(factor_dots)
            .map(|(u, v)| SphereTangent::new(u.clone(), v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            base,
            lambda_dot,
            factor_dots: dots,
        })
    }

    pub fn zero(base: PreSegrePoint) -> Self {
        let dots = base
            .factors()
            .iter()
            .map(|u| SphereTangent::zero(u.clone()))
            .collect();
        Self {
            base,
            lambda_dot: 0.0,
            factor_dots: dots,
        }
    }

    /// Purely radial tangent `(λ̇, 0, …, 0)`.
    pub fn radial(base: PreSegrePoint, lambda_dot: f64) -> Self {
        let mut t = Self::zero(base);
        t.lambda_dot = lambda_dot;
        t
    }

    pub fn base(&self) -> &PreSegrePoint {
        &self.base
    }

    pub fn lambda_dot(&self) -> f64 {
        self.lambda_dot
    }

    pub fn factor_dots(&self) -> &[SphereTangent] {
        &self.factor_dots
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            lambda_dot: s * self.lambda_dot,
            factor_dots: self.factor_dots.iter().map(|w| w.scaled(s)).collect(),
        }
    }

    /// Sum of two tangents at the same base point.
    pub fn add(&self, other: &PreSegreTangent) -> Result<Self, GeometryError> {
        if !self.base.approx_eq(&other.base, 1e-9) {
            return Err(GeometryError::BaseMismatch);
        }
        let dots = self
            .factor_dots
            .iter()
            .zip(&other.factor_dots)
            .map(|(a, b)| {
                let vec = a.vec().iter().zip(b.vec()).map(|(x, y)| x + y).collect();
                SphereTangent::new(a.base().clone(), vec)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            base: self.base.clone(),
            lambda_dot: self.lambda_dot + other.lambda_dot,
            factor_dots: dots,
        })
    }

    /// Norm in the warped metric, `√(metric(v, v))`.
    pub fn norm(&self) -> f64 {
        metric(self, self)
            .expect("tangent is at its own base")
            .sqrt()
    }
}

/// The aggregates steering a starting geodesic: the spherical speed
/// `N = √(Σᵢ kᵢ ‖u̇ᵢ‖²)` and the per-factor arc angles `aᵢ` swept after unit
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCoefficients {
    big_n: f64,
    a: Vec<f64>,
}

impl GeodesicCoefficients {
    pub fn from_tangent(v: &PreSegreTangent) -> Self {
        let shape = v.base().shape();
        let alpha = shape.alpha();
        let lambda = v.base().lambda();
        let big_n = shape
            .mults()
            .iter()
            .zip(v.factor_dots())
            .map(|(&k, w)| k as f64 * w.norm() * w.norm())
            .sum::<f64>()
            .sqrt();
        let a = if big_n == 0.0 {
            vec![0.0; shape.factor_count()]
        } else {
            // Θ = π/2 − arctan((λ+λ̇)/(λαN)) rewritten as atan2(λαN, λ+λ̇),
            // which stays accurate when λ+λ̇ ≤ 0.
            let theta = f64::atan2(lambda * alpha * big_n, lambda + v.lambda_dot());
            v.factor_dots()
                .iter()
                .map(|w| w.norm() / (alpha * big_n) * theta)
                .collect()
        };
        Self { big_n, a }
    }

    /// Aggregate spherical speed `N`.
    pub fn big_n(&self) -> f64 {
        self.big_n
    }

    /// Arc angle `aᵢ` swept by factor `i`.
    pub fn angles(&self) -> &[f64] {
        &self.a
    }
}

fn require_same_shape(p: &PreSegrePoint, q: &PreSegrePoint) -> Result<(), GeometryError> {
    if p.shape() != q.shape() {
        return Err(GeometryError::ShapeMismatch);
    }
    Ok(())
}

/// Warped-product inner product of two tangents at the same point:
/// `λ̇ₓλ̇ᵧ + (αλ)² Σᵢ kᵢ ⟨u̇ᵢ, v̇ᵢ⟩`.
pub fn metric(x: &PreSegreTangent, y: &PreSegreTangent) -> Result<f64, GeometryError> {
    if !x.base().approx_eq(y.base(), 1e-9) {
        return Err(GeometryError::BaseMismatch);
    }
    let shape = x.base().shape();
    let spherical: f64 = shape
        .mults()
        .iter()
        .zip(x.factor_dots().iter().zip(y.factor_dots()))
        .map(|(&k, (a, b))| k as f64 * dot(a.vec(), b.vec()))
        .sum();
    let al = shape.alpha() * x.base().lambda();
    Ok(x.lambda_dot() * y.lambda_dot() + al * al * spherical)
}

/// Exponential map: endpoint of the constant-speed geodesic launched by `v`.
///
/// With `N = √(Σ kᵢ‖u̇ᵢ‖²) > 0` the geodesic bends: the new radius is
/// `√((λ+λ̇)² + (λαN)²)` and factor `i` advances along its great circle by
/// `aᵢ = (‖u̇ᵢ‖/(αN)) (π/2 − arctan((λ+λ̇)/(λαN)))`. With `N = 0` the geodesic
/// is the straight radial line `λ ↦ λ + λ̇`, defined only while it misses the
/// puncture at radius 0.
pub fn pre_exp(v: &PreSegreTangent) -> Result<PreSegrePoint, GeometryError> {
    let p = v.base();
    let shape = p.shape().clone();
    let coeff = GeodesicCoefficients::from_tangent(v);

    if coeff.big_n() == 0.0 {
        if v.lambda_dot() <= -p.lambda() + 1e-12 {
            return Err(GeometryError::Domain {
                lambda: p.lambda(),
                lambda_dot: v.lambda_dot(),
            });
        }
        return PreSegrePoint::new(shape, p.lambda() + v.lambda_dot(), p.factors().to_vec());
    }

    let new_lambda = f64::hypot(
        p.lambda() + v.lambda_dot(),
        p.lambda() * shape.alpha() * coeff.big_n(),
    );
    let factors = p
        .factors()
        .iter()
        .zip(v.factor_dots())
        .zip(coeff.angles())
        .map(|((u, w), &a)| {
            let n = w.norm();
            if n == 0.0 {
                u.clone()
            } else {
                sphere::sphere_exp(&w.scaled(a / n))
            }
        })
        .collect();
    PreSegrePoint::new(shape, new_lambda, factors)
}

/// Point of the geodesic through `v` at parameter `t`, i.e. `exp(t·v)`.
pub fn geodesic_sample(v: &PreSegreTangent, t: f64) -> Result<PreSegrePoint, GeometryError> {
    pre_exp(&v.scaled(t))
}

/// Great-circle angles `∢(uᵢ, vᵢ)` between corresponding factors.
pub fn factor_angles(p: &PreSegrePoint, q: &PreSegrePoint) -> Result<Vec<f64>, GeometryError> {
    require_same_shape(p, q)?;
    p.factors()
        .iter()
        .zip(q.factors())
        .map(|(u, v)| sphere::angle(u, v))
        .collect()
}

/// Distance `M(p, q) = √(Σᵢ kᵢ ∢²(uᵢ, vᵢ))` of the spherical parts; the radii
/// play no role.
pub fn spherical_distance(p: &PreSegrePoint, q: &PreSegrePoint) -> Result<f64, GeometryError> {
    let angles = factor_angles(p, q)?;
    Ok(weighted_angle_norm(p.shape().mults(), &angles))
}

pub(crate) fn weighted_angle_norm(mults: &[usize], angles: &[f64]) -> f64 {
    mults
        .iter()
        .zip(angles)
        .map(|(&k, &t)| k as f64 * t * t)
        .sum::<f64>()
        .sqrt()
}

/// Whether a minimizing geodesic joins `p` and `q`: true iff `α·M(p,q) < π`
/// (strictly; the boundary case has no minimizer).
pub fn is_compatible(p: &PreSegrePoint, q: &PreSegrePoint) -> Result<bool, GeometryError> {
    Ok(p.shape().alpha() * spherical_distance(p, q)? < PI)
}

/// Logarithmic map: initial velocity of the minimizing geodesic from `p`
/// to `q`,
///
/// `λ̇ = μ cos(αM) − λ`, `u̇ᵢ = log_{uᵢ}(vᵢ) · μ sin(αM)/(λαM)`,
///
/// with `sin(x)/x` taken as 1 at `x = 0` (for `M = 0` this is the radial
/// tangent `(μ − λ, 0, …, 0)`).
pub fn pre_log(p: &PreSegrePoint, q: &PreSegrePoint) -> Result<PreSegreTangent, GeometryError> {
    let angles = factor_angles(p, q)?;
    let shape = p.shape();
    let alpha = shape.alpha();
    let m = weighted_angle_norm(shape.mults(), &angles);
    let alpha_m = alpha * m;
    if alpha_m >= PI {
        return Err(GeometryError::Incompatible { alpha_m });
    }
    if let Some((i, &a)) = angles
        .iter()
        .enumerate()
        .find(|(_, &a)| a >= PI - ANTIPODAL_MARGIN)
    {
        return Err(GeometryError::AntipodalFactor { index: i, angle: a });
    }

    let (lambda, mu) = (p.lambda(), q.lambda());
    let lambda_dot = mu * alpha_m.cos() - lambda;
    // D = μ sin(αM)/(λαM); the spherical log already carries ∢ᵢ/sin∢ᵢ.
    let d_scale = mu * sinc(alpha_m) / lambda;
    let dots = p
        .factors()
        .iter()
        .zip(q.factors())
        .map(|(u, v)| Ok(sphere::sphere_log(u, v)?.scaled(d_scale).vec().to_vec()))
        .collect::<Result<Vec<_>, GeometryError>>()?;
    PreSegreTangent::new(p.clone(), lambda_dot, dots)
}

/// Geodesic distance together with a connectivity flag.
///
/// For compatible points the law of cosines
/// `√(λ² − 2λμ cos(αM) + μ²)` applies; it is evaluated in the algebraically
/// identical form `√((λ−μ)² + 4λμ sin²(αM/2))`, which does not cancel for
/// nearby points. For incompatible points no minimizing geodesic exists and
/// the infimum of path lengths, `λ + μ`, is returned with `connected = false`.
pub fn pre_distance(p: &PreSegrePoint, q: &PreSegrePoint) -> Result<(f64, bool), GeometryError> {
    let m = spherical_distance(p, q)?;
    let alpha_m = p.shape().alpha() * m;
    let (lambda, mu) = (p.lambda(), q.lambda());
    if alpha_m < PI {
        let s = (alpha_m / 2.0).sin();
        let value = f64::sqrt((lambda - mu).powi(2) + 4.0 * lambda * mu * s * s);
        Ok((value, true))
    } else {
        Ok((lambda + mu, false))
    }
}
