//! Public geometry of the α-warped Segre–Veronese manifold, i.e. of the rank-1
//! tensors themselves. Every tensor is stored through a canonical factored
//! representative; exp, log and distance are computed on representatives after
//! matchmaking across the covering fiber.

use crate::covering::{self, DenseTensor};
use crate::error::GeometryError;
use crate::presegre::{self, ManifoldShape, PreSegrePoint, PreSegreTangent};

/// Tri-state answer of [`connectedness_class`]: the middle band of warping
/// factors is genuinely open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectedness {
    Connected,
    NotConnected,
    Unknown,
}

/// A rank-1 tensor, stored as the canonical representative of its fiber.
///
/// Canonicalization makes the leading (first sufficiently nonzero) coordinate
/// of every factor nonnegative where the deck-transform parity constraint
/// permits; when the odd-multiplicity factors cannot all be normalized, the
/// one with the largest index absorbs the leftover sign. Equality of tensors
/// is defined through their dense embeddings, not through representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SegrePoint {
    rep: PreSegrePoint,
}

fn leading_sign(coords: &[f64]) -> f64 {
    // Unit vectors always have a coordinate of magnitude >= 1/sqrt(n), so this
    // threshold cannot skip all of them.
    for &x in coords {
        if x.abs() > 1e-9 {
            return if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    1.0
}

fn canonicalize(rep: PreSegrePoint) -> PreSegrePoint {
    let shape = rep.shape().clone();
    let mut signs: Vec<i8> = rep
        .factors()
        .iter()
        .map(|u| leading_sign(u.coords()) as i8)
        .collect();
    let odd: Vec<usize> = (0..shape.factor_count())
        .filter(|&i| shape.mults()[i] % 2 == 1)
        .collect();
    let parity: i32 = odd.iter().map(|&i| signs[i] as i32).product();
    if parity == -1 {
        let last = *odd.last().expect("parity -1 requires an odd factor");
        signs[last] = -signs[last];
    }
    let pattern = covering::SignPattern::new(signs).expect("signs are +-1");
    covering::apply_deck(&rep, &pattern).expect("pattern was made feasible")
}

impl SegrePoint {
    /// Wraps a representative, canonicalizing its factor signs.
    pub fn new(rep: PreSegrePoint) -> SegrePoint {
        SegrePoint {
            rep: canonicalize(rep),
        }
    }

    pub fn rep(&self) -> &PreSegrePoint {
        &self.rep
    }

    pub fn shape(&self) -> &ManifoldShape {
        self.rep.shape()
    }

    /// Dense tensor embedding of the represented point.
    pub fn embed(&self) -> Result<DenseTensor, GeometryError> {
        covering::tensor_embed(&self.rep)
    }

    /// Whether both points represent the same tensor: dense embeddings agree
    /// within 1e-10.
    pub fn same_tensor(&self, other: &SegrePoint) -> Result<bool, GeometryError> {
        if self.shape() != other.shape() {
            return Err(GeometryError::ShapeMismatch);
        }
        Ok(self.embed()?.approx_eq(&other.embed()?, 1e-10))
    }
}

/// A tangent vector to the tensor manifold, held in factored coordinates at
/// the canonical representative.
#[derive(Debug, Clone, PartialEq)]
pub struct SegreTangent {
    at: SegrePoint,
    coords: PreSegreTangent,
}

impl SegreTangent {
    pub fn new(at: SegrePoint, coords: PreSegreTangent) -> Result<Self, GeometryError> {
        if !coords.base().approx_eq(at.rep(), 1e-9) {
            return Err(GeometryError::BaseMismatch);
        }
        Ok(Self { at, coords })
    }

    pub fn zero(at: SegrePoint) -> Self {
        let coords = PreSegreTangent::zero(at.rep().clone());
        Self { at, coords }
    }

    pub fn at(&self) -> &SegrePoint {
        &self.at
    }

    pub fn coords(&self) -> &PreSegreTangent {
        &self.coords
    }

    /// Norm in the warped metric.
    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    /// Dense pushforward through the covering map.
    pub fn embed(&self) -> Result<DenseTensor, GeometryError> {
        covering::push_forward(&self.coords)
    }
}

/// Exponential map on the tensor manifold: push the representative-level
/// geodesic through the covering and re-canonicalize.
pub fn segre_exp(v: &SegreTangent) -> Result<SegrePoint, GeometryError> {
    Ok(SegrePoint::new(presegre::pre_exp(v.coords())?))
}

/// Logarithmic map on the tensor manifold.
///
/// The representative of `q` is first matched to `p`'s; if the matched pair is
/// not α-compatible there is no minimizing geodesic at all
/// ([`GeometryError::NotConnected`]), and an antipodal factor pair leaves the
/// geodesic non-unique ([`GeometryError::AntipodalFactor`]).
pub fn segre_log(p: &SegrePoint, q: &SegrePoint) -> Result<SegreTangent, GeometryError> {
    let matched = covering::match_representatives(p.rep(), q.rep())?;
    let coords = match presegre::pre_log(p.rep(), &matched) {
        Err(GeometryError::Incompatible { alpha_m }) => {
            return Err(GeometryError::NotConnected { alpha_m })
        }
        other => other?,
    };
    SegreTangent::new(p.clone(), coords)
}

/// Geodesic distance between tensors, with a connectivity flag; computed on
/// matched representatives. For a disconnected pair the value is the infimum
/// `λ + μ` of path lengths, which no geodesic attains.
pub fn segre_distance(p: &SegrePoint, q: &SegrePoint) -> Result<(f64, bool), GeometryError> {
    let matched = covering::match_representatives(p.rep(), q.rep())?;
    presegre::pre_distance(p.rep(), &matched)
}

/// Geodesic connectedness of the whole manifold as a function of the warping
/// factor: connected below `1/√(k₁+⋯+k_d)`, not connected from
/// `2/√(k₁+⋯+k_d)` on, and open in between.
pub fn connectedness_class(shape: &ManifoldShape) -> Connectedness {
    let root = (shape.total_multiplicity() as f64).sqrt();
    if shape.alpha() < 1.0 / root {
        Connectedness::Connected
    } else if shape.alpha() >= 2.0 / root {
        Connectedness::NotConnected
    } else {
        Connectedness::Unknown
    }
}
