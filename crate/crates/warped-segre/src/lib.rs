//! Riemannian geometry of α-warped Segre–Veronese manifolds.
//!
//! A partially symmetric rank-1 tensor `λ u₁^⊗k₁ ⊗ ⋯ ⊗ u_d^⊗k_d` (with `λ > 0`
//! and unit factors `uᵢ`) is a point of the Segre–Veronese manifold. This crate
//! equips that manifold with a one-parameter family of warped metrics in which
//! spherical tangent directions are scaled by a factor `α > 0` relative to the
//! radial direction (`α = 1` recovers the Euclidean geometry), and provides:
//!
//! - closed-form exponential and logarithmic maps and the geodesic distance,
//!   first on the covering warped product `ℝ₊ × 𝕊^{n₁−1} × ⋯ × 𝕊^{n_d−1}`
//!   ([`presegre`]) and then on the tensor manifold itself ([`segre`]);
//! - the fiber structure of the covering: dense embeddings, sign-flip deck
//!   transforms, and a linear-time matchmaking algorithm that picks fiber
//!   representatives at minimal spherical distance ([`covering`]);
//! - closed-form sectional curvature on axis-aligned planes together with a
//!   geodesic-circle estimator used as an independent check ([`curvature`]);
//! - Fréchet means by geodesic interpolation plus gradient refinement, the
//!   basis of consensus aggregation of rank-1 terms ([`frechet`]);
//! - numerical oracles (quadrature path lengths, variational path relaxation)
//!   that validate the closed forms independently ([`oracle`]).

pub mod covering;
pub mod curvature;
mod error;
pub mod frechet;
mod linalg;
pub mod oracle;
pub mod presegre;
pub mod segre;
pub mod sphere;

pub use error::GeometryError;
pub use presegre::{ManifoldShape, PreSegrePoint, PreSegreTangent};
pub use segre::{Connectedness, SegrePoint, SegreTangent};
pub use sphere::{SphereTangent, UnitVector};
