//! JSON wire formats (schema version 1) and their validated conversion into
//! geometry values. The geometry crate itself stays serialization-free; all
//! loading, normalization and sign bookkeeping happens here.

use serde::{Deserialize, Serialize};

use warped_segre::presegre::{ManifoldShape, PreSegrePoint, PreSegreTangent};
use warped_segre::segre::SegrePoint;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub lambda: f64,
    pub factors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentJson {
    pub lambda_dot: f64,
    pub factor_dots: Vec<Vec<f64>>,
}

/// Geometry-command payload: a shape, one or more points, optionally a
/// tangent attached to the first point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointsFile {
    pub schema: u32,
    pub dims: Vec<usize>,
    pub mults: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub points: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent: Option<TangentJson>,
}

/// Consensus-aggregation payload: `M` decompositions of `r` terms each.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub schema: u32,
    pub dims: Vec<usize>,
    pub mults: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub decompositions: Vec<Vec<TermJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermReport {
    pub index: usize,
    /// Geodesic distance from each input term of the matched group to the
    /// aggregated term, in input order.
    pub distances: Vec<f64>,
    pub mean_distance: f64,
    pub max_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateReport {
    pub terms: Vec<TermReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_relative_error: Option<f64>,
}

/// Aggregation output: a one-entry [`DecompositionFile`] plus the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateOutput {
    pub schema: u32,
    pub dims: Vec<usize>,
    pub mults: Vec<usize>,
    pub alpha: f64,
    pub decompositions: Vec<Vec<TermJson>>,
    pub report: AggregateReport,
}

pub fn check_schema(schema: u32) -> Result<(), CliError> {
    if schema != SCHEMA_VERSION {
        return Err(CliError::Input(format!(
            "unsupported schema version {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

/// Resolves the effective warping factor: a `--alpha` flag wins over the
/// file's value; one of the two must be present.
pub fn resolve_alpha(file_alpha: Option<f64>, flag_alpha: Option<f64>) -> Result<f64, CliError> {
    flag_alpha
        .or(file_alpha)
        .ok_or_else(|| CliError::Input("no warping factor: set \"alpha\" or pass --alpha".into()))
}

pub fn build_shape(dims: &[usize], mults: &[usize], alpha: f64) -> Result<ManifoldShape, CliError> {
    ManifoldShape::new(dims.to_vec(), mults.to_vec(), alpha).map_err(CliError::from)
}

/// Loads a term as a point: factor norms are folded into lambda (factor `i`
/// contributes its norm to the power `k_i`), a negative lambda is pushed into
/// the first odd-multiplicity factor, and the result is canonicalized.
pub fn load_term(shape: &ManifoldShape, term: &TermJson) -> Result<SegrePoint, CliError> {
    if term.factors.len() != shape.factor_count() {
        return Err(CliError::Input(format!(
            "term has {} factors, shape has {}",
            term.factors.len(),
            shape.factor_count()
        )));
    }
    let mut lambda = term.lambda;
    let mut factors = Vec::with_capacity(term.factors.len());
    for (i, raw) in term.factors.iter().enumerate() {
        if raw.len() != shape.dims()[i] {
            return Err(CliError::Input(format!(
                "factor {i} has length {}, expected {}",
                raw.len(),
                shape.dims()[i]
            )));
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(CliError::Input(format!("factor {i} is zero or not finite")));
        }
        lambda *= norm.powi(shape.mults()[i] as i32);
        factors.push(raw.iter().map(|x| x / norm).collect::<Vec<f64>>());
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(CliError::Input("term weight is zero or not finite".into()));
    }
    if lambda < 0.0 {
        let Some(j) = shape.mults().iter().position(|&k| k % 2 == 1) else {
            return Err(CliError::Input(
                "negative weight with all multiplicities even: tensor lies on the \
                 negative component, which is not modeled"
                    .into(),
            ));
        };
        lambda = -lambda;
        for x in &mut factors[j] {
            *x = -*x;
        }
    }
    let rep = PreSegrePoint::from_coords(shape.clone(), lambda, factors)?;
    Ok(SegrePoint::new(rep))
}

/// Loads a tangent attached to `at`. Input factors may be any representative
/// of the point; the dots are carried through the same sign flips the
/// canonicalization applied, and small orthogonality residue (below 1e-9) is
/// projected away.
pub fn load_tangent(
    shape: &ManifoldShape,
    at_raw: &TermJson,
    at: &SegrePoint,
    tangent: &TangentJson,
) -> Result<PreSegreTangent, CliError> {
    if tangent.factor_dots.len() != shape.factor_count() {
        return Err(CliError::Input(format!(
            "tangent has {} factor velocities, shape has {}",
            tangent.factor_dots.len(),
            shape.factor_count()
        )));
    }
    let mut dots = Vec::with_capacity(tangent.factor_dots.len());
    for (i, raw_dot) in tangent.factor_dots.iter().enumerate() {
        if raw_dot.len() != shape.dims()[i] {
            return Err(CliError::Input(format!(
                "tangent factor {i} has length {}, expected {}",
                raw_dot.len(),
                shape.dims()[i]
            )));
        }
        // Detect the sign flip canonicalization applied to this factor.
        let raw_norm = at_raw.factors[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        let inner: f64 = at_raw.factors[i]
            .iter()
            .zip(at.rep().factor(i).coords())
            .map(|(a, b)| a * b)
            .sum();
        let sign = if inner / raw_norm < 0.0 { -1.0 } else { 1.0 };
        let mut dot_vec: Vec<f64> = raw_dot.iter().map(|x| sign * x).collect();
        let u = at.rep().factor(i);
        let residue: f64 = dot_vec.iter().zip(u.coords()).map(|(a, b)| a * b).sum();
        if residue.abs() > 1e-9 {
            return Err(CliError::Input(format!(
                "tangent factor {i} is not orthogonal to the point (residue {residue:e})"
            )));
        }
        for (x, b) in dot_vec.iter_mut().zip(u.coords()) {
            *x -= residue * b;
        }
        dots.push(dot_vec);
    }
    Ok(PreSegreTangent::new(
        at.rep().clone(),
        tangent.lambda_dot,
        dots,
    )?)
}

pub fn term_of_point(p: &SegrePoint) -> TermJson {
    TermJson {
        lambda: p.rep().lambda(),
        factors: p
            .rep()
            .factors()
            .iter()
            .map(|u| u.coords().to_vec())
            .collect(),
    }
}

pub fn tangent_json(v: &PreSegreTangent) -> TangentJson {
    TangentJson {
        lambda_dot: v.lambda_dot(),
        factor_dots: v.factor_dots().iter().map(|w| w.vec().to_vec()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn loading_preserves_the_dense_tensor() {
        // Folding factor norms into lambda (factor i to the power k_i) and
        // canonicalizing signs must leave the represented tensor unchanged.
        let shape = build_shape(&[2, 3], &[2, 1], 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let raw_f: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let raw_g: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let lambda = rng.random::<f64>() * 4.0 - 2.0;
            let nf: f64 = raw_f.iter().map(|x| x * x).sum::<f64>().sqrt();
            let ng: f64 = raw_g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if lambda.abs() < 1e-3 || nf < 1e-3 || ng < 1e-3 {
                continue;
            }
            let term = TermJson {
                lambda,
                factors: vec![raw_f.clone(), raw_g.clone()],
            };
            // Negative weights are pushed into the odd factor, so loading
            // never fails here; entry (i,j,l) of the embedding must stay
            // lambda f_i f_j g_l.
            let point = load_term(&shape, &term).unwrap();
            let embedded = point.embed().unwrap();
            let mut worst = 0.0f64;
            let mut idx = 0;
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..3 {
                        let expect = lambda * raw_f[i] * raw_f[j] * raw_g[l];
                        worst = worst.max((embedded.data()[idx] - expect).abs());
                        idx += 1;
                    }
                }
            }
            assert!(worst < 1e-12, "embedding drifted by {worst}");
        }
    }

    #[test]
    fn negative_weight_needs_an_odd_factor() {
        let all_even = build_shape(&[2], &[2], 1.0).unwrap();
        let term = TermJson {
            lambda: -1.0,
            factors: vec![vec![1.0, 0.0]],
        };
        assert!(load_term(&all_even, &term).is_err());

        let has_odd = build_shape(&[2], &[3], 1.0).unwrap();
        let loaded = load_term(&has_odd, &term).unwrap();
        assert!(loaded.rep().lambda() > 0.0);
        // (-u)^{x3} carries the sign, so the tensor is still -e1^{x3}.
        assert_eq!(loaded.embed().unwrap().data()[0], -1.0);
    }
}

