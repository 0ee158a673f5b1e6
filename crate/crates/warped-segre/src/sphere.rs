//! Unit-sphere primitives (angle, exp, log), applied factor-wise by the
//! warped-product modules.

use crate::error::GeometryError;
use crate::linalg::{axpy, dot, norm, scale};

/// Construction tolerance for unit norms and tangency.
pub const UNIT_TOL: f64 = 1e-12;

/// Angles closer to π than this margin are treated as antipodal: below it the
/// division by sin∢ in the log map loses all precision.
pub const ANTIPODAL_MARGIN: f64 = 1e-9;

/// A vector of Euclidean norm 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
}

impl UnitVector {
    /// Wraps `coords`, requiring the norm to be 1 within [`UNIT_TOL`].
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        let n = norm(&coords);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit { norm: n });
        }
        Ok(Self { coords })
    }

    /// Rescales `coords` to unit norm; fails on (near-)zero input.
    pub fn normalized(coords: Vec<f64>) -> Result<Self, GeometryError> {
        let n = norm(&coords);
        if n < 1e-300 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(Self {
            coords: scale(&coords, 1.0 / n),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The antipode `-u`.
    pub fn flipped(&self) -> UnitVector {
        UnitVector {
            coords: scale(&self.coords, -1.0),
        }
    }
}

/// A vector attached to (and orthogonal to) a point of the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereTangent {
    base: UnitVector,
    vec: Vec<f64>,
}

impl SphereTangent {
    /// Requires `vec ⊥ base` within [`UNIT_TOL`].
    pub fn new(base: UnitVector, vec: Vec<f64>) -> Result<Self, GeometryError> {
        if vec.len() != base.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: base.dim(),
                got: vec.len(),
            });
        }
        let inner = dot(&vec, base.coords());
        if inner.abs() > UNIT_TOL {
            return Err(GeometryError::NotOrthogonal { inner });
        }
        Ok(Self { base, vec })
    }

    pub fn zero(base: UnitVector) -> Self {
        let vec = vec![0.0; base.dim()];
        Self { base, vec }
    }

    pub fn base(&self) -> &UnitVector {
        &self.base
    }

    pub fn vec(&self) -> &[f64] {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        norm(&self.vec)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            vec: scale(&self.vec, s),
        }
    }
}

/// Angular distance ∢(u, v) = arccos⟨u, v⟩ ∈ [0, π], the arclength of a
/// shortest great-circle segment between `u` and `v`.
///
/// Evaluated as `2 atan2(‖v − u‖, ‖v + u‖)` (the half-angle form), which is
/// exact in the same sense as the arccos but stays fully conditioned for
/// nearly parallel and nearly antipodal vectors, where arccos loses half the
/// digits.
pub fn angle(u: &UnitVector, v: &UnitVector) -> Result<f64, GeometryError> {
    if u.dim() != v.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let mut diff2 = 0.0;
    let mut sum2 = 0.0;
    for (a, b) in u.coords().iter().zip(v.coords()) {
        diff2 += (b - a) * (b - a);
        sum2 += (b + a) * (b + a);
    }
    Ok(2.0 * f64::atan2(diff2.sqrt(), sum2.sqrt()))
}

/// Follows the great circle launched by `w` for arclength ‖w‖:
/// `u cos‖w‖ + (w/‖w‖) sin‖w‖`. Returns the base point for ‖w‖ = 0.
pub fn sphere_exp(w: &SphereTangent) -> UnitVector {
    let n = w.norm();
    if n == 0.0 {
        return w.base().clone();
    }
    let combined = axpy(n.sin() / n, w.vec(), &scale(w.base().coords(), n.cos()));
    // cos/sin of orthogonal unit directions keep the norm at 1 up to rounding;
    // renormalize so repeated exponentials cannot drift.
    UnitVector::normalized(combined).expect("exp output has unit norm")
}

/// Initial velocity of the great-circle arc from `u` to `v`:
/// `(v − ⟨v,u⟩u) · ∢/sin∢`, with the ratio taken as 1 at ∢ = 0.
///
/// Fails with [`GeometryError::Antipodal`] once ∢ ≥ π − 1e-9, where the
/// connecting great circle is no longer unique.
pub fn sphere_log(u: &UnitVector, v: &UnitVector) -> Result<SphereTangent, GeometryError> {
    let theta = angle(u, v)?;
    if theta >= std::f64::consts::PI - ANTIPODAL_MARGIN {
        return Err(GeometryError::Antipodal { angle: theta });
    }
    let cos_theta = dot(u.coords(), v.coords());
    let perp = axpy(-cos_theta, u.coords(), v.coords());
    // ‖perp‖ = sin∢, so the scale factor ∢/sin∢ gives ‖result‖ = ∢.
    let ratio = if theta < 1e-8 {
        1.0 + theta * theta / 6.0
    } else {
        theta / theta.sin()
    };
    SphereTangent::new(u.clone(), scale(&perp, ratio))
}
