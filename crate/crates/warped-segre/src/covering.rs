//! The normal Riemannian covering `⊗ : 𝒫 → 𝒮` sending a factored
//! representative to its dense tensor `λ u₁^⊗k₁ ⊗ ⋯ ⊗ u_d^⊗k_d`.
//!
//! Its deck transforms are the factor sign flips `ι_σ` with
//! `σ₁^{k₁} ⋯ σ_d^{k_d} = 1`; two representatives of the same pair of tensors
//! are *matched* when their spherical distance `M` is minimal over the fiber.
//! [`match_representatives`] finds a matched representative in `O(d·dim)`
//! time, [`brute_force_match`] enumerates the whole fiber as an oracle.

use std::f64::consts::PI;

use crate::error::GeometryError;
use crate::linalg::dot;
use crate::presegre::{
    factor_angles, weighted_angle_norm, ManifoldShape, PreSegrePoint, PreSegreTangent,
};
use crate::sphere::UnitVector;

/// Entry-count cap for dense materializations (desk scale by design).
pub const DEFAULT_EMBED_CAP: usize = 10_000_000;

/// Fiber enumeration is exponential in `d`; refuse beyond this.
pub const MAX_BRUTE_FORCE_FACTORS: usize = 20;

/// A factor-wise sign choice `σ ∈ {−1, +1}^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    signs: Vec<i8>,
}

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self, GeometryError> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(GeometryError::InvalidArgument(
                "sign pattern entries must be +1 or -1".into(),
            ));
        }
        Ok(Self { signs })
    }

    pub fn identity(d: usize) -> Self {
        Self { signs: vec![1; d] }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// A pattern is a deck transform iff `Πᵢ σᵢ^{kᵢ} = 1`, i.e. the product of
    /// signs over the odd-multiplicity factors is +1.
    pub fn is_feasible(&self, shape: &ManifoldShape) -> bool {
        self.signs.len() == shape.factor_count()
            && self
                .signs
                .iter()
                .zip(shape.mults())
                .filter(|(_, &k)| k % 2 == 1)
                .map(|(&s, _)| s as i32)
                .product::<i32>()
                == 1
    }
}

/// A dense row-major tensor with extents `(n₁, … repeated k₁ times, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    extents: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Assembles a tensor from raw extents and row-major data.
    pub fn from_parts(extents: Vec<usize>, data: Vec<f64>) -> DenseTensor {
        assert_eq!(
            extents.iter().product::<usize>(),
            data.len(),
            "entry count does not match the extents"
        );
        DenseTensor { extents, data }
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn max_abs_diff(&self, other: &DenseTensor) -> f64 {
        assert_eq!(self.extents, other.extents, "tensor extents differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &DenseTensor, tol: f64) -> bool {
        self.extents == other.extents && self.max_abs_diff(other) <= tol
    }

    /// Euclidean inner product of the flattened arrays.
    pub fn inner(&self, other: &DenseTensor) -> f64 {
        assert_eq!(self.extents, other.extents, "tensor extents differ");
        dot(&self.data, &other.data)
    }

    fn scaled(&self, s: f64) -> DenseTensor {
        DenseTensor {
            extents: self.extents.clone(),
            data: crate::linalg::scale(&self.data, s),
        }
    }

    fn add_in_place(&mut self, other: &DenseTensor) {
        assert_eq!(self.extents, other.extents, "tensor extents differ");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

fn checked_entry_count(shape: &ManifoldShape, cap: usize) -> Result<(), GeometryError> {
    let entries = shape.entry_count();
    if entries > cap as u128 {
        return Err(GeometryError::SizeCapExceeded { entries, cap });
    }
    Ok(())
}

fn tensor_extents(shape: &ManifoldShape) -> Vec<usize> {
    shape
        .dims()
        .iter()
        .zip(shape.mults())
        .flat_map(|(&n, &k)| std::iter::repeat_n(n, k))
        .collect()
}

/// Outer product appending the axes of `v` to `acc` (row-major).
fn outer_extend(acc: Vec<f64>, v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(acc.len() * v.len());
    for a in &acc {
        for x in v {
            out.push(a * x);
        }
    }
    out
}

/// Dense materialization of a list of occurrence vectors scaled by `weight`.
fn dense_from_occurrences(extents: Vec<usize>, weight: f64, occ: &[&[f64]]) -> DenseTensor {
    let mut data = vec![weight];
    for v in occ {
        data = outer_extend(data, v);
    }
    DenseTensor { extents, data }
}

fn occurrence_vectors(p: &PreSegrePoint) -> Vec<&[f64]> {
    p.shape()
        .mults()
        .iter()
        .zip(p.factors())
        .flat_map(|(&k, u)| std::iter::repeat_n(u.coords(), k))
        .collect()
}

/// Dense embedding `⊗(p) = λ u₁^⊗k₁ ⊗ ⋯ ⊗ u_d^⊗k_d` under [`DEFAULT_EMBED_CAP`].
pub fn tensor_embed(p: &PreSegrePoint) -> Result<DenseTensor, GeometryError> {
    tensor_embed_with_cap(p, DEFAULT_EMBED_CAP)
}

/// Dense embedding with an explicit entry-count cap.
pub fn tensor_embed_with_cap(p: &PreSegrePoint, cap: usize) -> Result<DenseTensor, GeometryError> {
    checked_entry_count(p.shape(), cap)?;
    Ok(dense_from_occurrences(
        tensor_extents(p.shape()),
        p.lambda(),
        &occurrence_vectors(p),
    ))
}

/// All feasible deck transforms of `shape`, in lexicographic order with +1
/// before −1.
pub fn deck_transforms(shape: &ManifoldShape) -> Vec<SignPattern> {
    let d = shape.factor_count();
    let mut out = Vec::new();
    for bits in 0u64..(1 << d) {
        let signs: Vec<i8> = (0..d)
            .map(|i| if bits >> (d - 1 - i) & 1 == 0 { 1 } else { -1 })
            .collect();
        let pattern = SignPattern { signs };
        if pattern.is_feasible(shape) {
            out.push(pattern);
        }
    }
    out
}

/// Applies the deck transform `ι_σ(λ, u₁, …, u_d) = (λ, σ₁u₁, …, σ_d u_d)`.
pub fn apply_deck(p: &PreSegrePoint, s: &SignPattern) -> Result<PreSegrePoint, GeometryError> {
    if s.signs().len() != p.shape().factor_count() {
        return Err(GeometryError::DimensionMismatch {
            expected: p.shape().factor_count(),
            got: s.signs().len(),
        });
    }
    if !s.is_feasible(p.shape()) {
        return Err(GeometryError::InfeasiblePattern);
    }
    let factors = p
        .factors()
        .iter()
        .zip(s.signs())
        .map(|(u, &sg)| if sg == 1 { u.clone() } else { u.flipped() })
        .collect();
    PreSegrePoint::new(p.shape().clone(), p.lambda(), factors)
}

/// The per-factor costs `Δᵢ = kᵢ((∢ᵢ − π)² − ∢ᵢ²)` of keeping factor `i`
/// unflipped; `Δᵢ ≥ 0` exactly when `∢ᵢ ≤ π/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaProfile {
    deltas: Vec<f64>,
}

impl DeltaProfile {
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }
}

/// Δ profile of `q_ref` relative to `p_star`.
pub fn delta_profile(
    p_star: &PreSegrePoint,
    q_ref: &PreSegrePoint,
) -> Result<DeltaProfile, GeometryError> {
    let angles = factor_angles(p_star, q_ref)?;
    let deltas = p_star
        .shape()
        .mults()
        .iter()
        .zip(&angles)
        .map(|(&k, &a)| k as f64 * ((a - PI) * (a - PI) - a * a))
        .collect();
    Ok(DeltaProfile { deltas })
}

/// Spherical distance `M(p⋆, ι_σ(q_ref))` expressed through the unflipped
/// factor angles: flipping factor `i` replaces `∢ᵢ` by `π − ∢ᵢ`.
fn fiber_m(mults: &[usize], angles: &[f64], pattern: &SignPattern) -> f64 {
    let flipped: Vec<f64> = angles
        .iter()
        .zip(pattern.signs())
        .map(|(&a, &s)| if s == 1 { a } else { PI - a })
        .collect();
    weighted_angle_norm(mults, &flipped)
}

fn matching_pattern(shape: &ManifoldShape, deltas: &[f64]) -> SignPattern {
    // Unconstrained optimum: keep factor i iff Delta_i >= 0.
    let mut signs: Vec<i8> = deltas
        .iter()
        .map(|&d| if d >= 0.0 { 1 } else { -1 })
        .collect();
    let pattern = SignPattern {
        signs: signs.clone(),
    };
    if pattern.is_feasible(shape) {
        return pattern;
    }
    // Repair feasibility at minimal cost: flip the odd-multiplicity index with
    // the smallest |Delta| (lowest index on ties). Even multiplicities do not
    // enter the constraint and are never flipped here.
    let mut best: Option<(f64, usize)> = None;
    for (i, &k) in shape.mults().iter().enumerate() {
        if k % 2 == 1 {
            let cost = deltas[i].abs();
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, i));
            }
        }
    }
    let (_, idx) = best.expect("an infeasible pattern implies at least one odd multiplicity");
    signs[idx] = -signs[idx];
    SignPattern { signs }
}

/// Deck image of `q_ref` at minimal spherical distance from `p_star`,
/// computed in `O(d·dim)` time.
///
/// Keeps factor `i` unflipped iff `Δᵢ ≥ 0`; if that sign choice is not a deck
/// transform, the odd-multiplicity factor with the smallest `|Δ|` is flipped
/// (lowest index on ties).
pub fn match_representatives(
    p_star: &PreSegrePoint,
    q_ref: &PreSegrePoint,
) -> Result<PreSegrePoint, GeometryError> {
    let deltas = delta_profile(p_star, q_ref)?;
    let pattern = matching_pattern(p_star.shape(), deltas.deltas());
    apply_deck(q_ref, &pattern)
}

/// Exhaustive minimizer of `M(p⋆, ·)` over the whole fiber of `q_ref`;
/// ties resolved toward the lexicographically largest pattern (+1 first).
/// Only usable for `d ≤ 20`.
pub fn brute_force_match(
    p_star: &PreSegrePoint,
    q_ref: &PreSegrePoint,
) -> Result<PreSegrePoint, GeometryError> {
    let d = p_star.shape().factor_count();
    if d > MAX_BRUTE_FORCE_FACTORS {
        return Err(GeometryError::FiberTooLarge {
            d,
            max: MAX_BRUTE_FORCE_FACTORS,
        });
    }
    let angles = factor_angles(p_star, q_ref)?;
    let mults = p_star.shape().mults();
    let mut best: Option<(f64, SignPattern)> = None;
    // deck_transforms enumerates lexicographically with +1 first, so keeping
    // the first strict improvement realizes the tie-break.
    for pattern in deck_transforms(p_star.shape()) {
        let m = fiber_m(mults, &angles, &pattern);
        if best.as_ref().is_none_or(|(bm, _)| m < *bm) {
            best = Some((m, pattern));
        }
    }
    let (_, pattern) = best.expect("fiber is never empty");
    apply_deck(q_ref, &pattern)
}

/// The `k`-term symmetrized derivative direction
/// `ν_k(u̇) = u̇ ⊗ u^{⊗(k−1)} + u ⊗ u̇ ⊗ u^{⊗(k−2)} + ⋯ + u^{⊗(k−1)} ⊗ u̇`,
/// materialized densely. Satisfies `⟨ν_k(u̇), u^{⊗k}⟩ = 0` and
/// `⟨ν_k(u̇), ν_k(v̇)⟩ = k ⟨u̇, v̇⟩` for tangents at `u`.
pub fn nu(u: &UnitVector, udot: &[f64], k: usize) -> Result<DenseTensor, GeometryError> {
    if udot.len() != u.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: u.dim(),
            got: udot.len(),
        });
    }
    let entries = (u.dim() as u128).pow(k as u32);
    if entries > DEFAULT_EMBED_CAP as u128 {
        return Err(GeometryError::SizeCapExceeded {
            entries,
            cap: DEFAULT_EMBED_CAP,
        });
    }
    let extents = vec![u.dim(); k];
    let mut sum: Option<DenseTensor> = None;
    for slot in 0..k {
        let occ: Vec<&[f64]> = (0..k)
            .map(|j| if j == slot { udot } else { u.coords() })
            .collect();
        let term = dense_from_occurrences(extents.clone(), 1.0, &occ);
        match &mut sum {
            None => sum = Some(term),
            Some(acc) => acc.add_in_place(&term),
        }
    }
    Ok(sum.expect("k >= 1"))
}

/// Dense pushforward of a factored tangent through the covering map:
/// `λ̇ 𝒰 + λ Σᵢ u₁^{⊗k₁} ⊗ ⋯ ⊗ ν_{kᵢ}(u̇ᵢ) ⊗ ⋯ ⊗ u_d^{⊗k_d}`.
pub fn push_forward(v: &PreSegreTangent) -> Result<DenseTensor, GeometryError> {
    let p = v.base();
    checked_entry_count(p.shape(), DEFAULT_EMBED_CAP)?;
    let extents = tensor_extents(p.shape());
    let mults = p.shape().mults();
    let d = p.shape().factor_count();

    let mut total = dense_from_occurrences(extents.clone(), v.lambda_dot(), &occurrence_vectors(p));
    for i in 0..d {
        let w = &v.factor_dots()[i];
        if w.norm() == 0.0 {
            continue;
        }
        // lambda * (u_1^{k_1} x ... x nu_{k_i}(udot_i) x ... x u_d^{k_d}),
        // expanded slot by slot within factor i's block of axes.
        for slot in 0..mults[i] {
            let occ: Vec<&[f64]> = (0..d)
                .flat_map(|j| {
                    (0..mults[j]).map(move |r| {
                        if j == i && r == slot {
                            w.vec()
                        } else {
                            p.factor(j).coords()
                        }
                    })
                })
                .collect();
            let term = dense_from_occurrences(extents.clone(), p.lambda(), &occ);
            total.add_in_place(&term);
        }
    }
    Ok(total)
}

/// α-warped ambient inner product of two dense tangents at `⊗(base)`:
/// the radial parts multiply directly, the sphere parts carry `(αλ)²`.
pub fn ambient_metric(
    base: &PreSegrePoint,
    x: &DenseTensor,
    y: &DenseTensor,
) -> Result<f64, GeometryError> {
    let u = tensor_embed(base)?.scaled(1.0 / base.lambda());
    let lambda = base.lambda();
    let alpha = base.shape().alpha();
    let rx = x.inner(&u);
    let ry = y.inner(&u);
    // Spherical velocities of the unit-norm curve: (x - <x,U>U)/lambda.
    let sx = {
        let mut t = x.clone();
        t.add_in_place(&u.scaled(-rx));
        t.scaled(1.0 / lambda)
    };
    let sy = {
        let mut t = y.clone();
        t.add_in_place(&u.scaled(-ry));
        t.scaled(1.0 / lambda)
    };
    Ok(rx * ry + (alpha * lambda).powi(2) * sx.inner(&sy))
}
