//! Consensus aggregation: given several approximate rank-r decompositions of
//! the same tensor, match their rank-1 terms to a reference decomposition by
//! minimum-cost assignment on geodesic distances and replace each matched
//! group by its Fréchet mean.

use warped_segre::covering::DenseTensor;
use warped_segre::frechet::{self, MeanConfig};
use warped_segre::segre::{self, Connectedness, SegrePoint};

use crate::assignment::min_cost_assignment;
use crate::io::{self, AggregateOutput, AggregateReport, DecompositionFile, TermReport};
use crate::CliError;

/// Warping-factor policy for aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaChoice {
    /// `1/sqrt(k_1 + ... + k_d) - sqrt(eps)`: keeps every pair of terms
    /// connected, so the means always exist.
    Auto,
    Explicit(f64),
}

impl AlphaChoice {
    pub fn parse(raw: &str) -> Result<Self, CliError> {
        if raw == "auto" {
            return Ok(AlphaChoice::Auto);
        }
        raw.parse::<f64>().map(AlphaChoice::Explicit).map_err(|_| {
            CliError::Input(format!("--alpha must be \"auto\" or a number, got {raw:?}"))
        })
    }
}

#[derive(Debug)]
pub struct Aggregated {
    pub output: AggregateOutput,
    /// Non-fatal notes for stderr (e.g. an explicit alpha without guaranteed
    /// connectedness).
    pub warnings: Vec<String>,
    /// Aggregated terms in reference order, for callers that keep computing.
    pub terms: Vec<SegrePoint>,
}

fn dense_sum(terms: &[SegrePoint]) -> Result<DenseTensor, CliError> {
    let mut sum: Option<Vec<f64>> = None;
    let mut extents = Vec::new();
    for t in terms {
        let dense = t.embed()?;
        match &mut sum {
            None => {
                extents = dense.extents().to_vec();
                sum = Some(dense.data().to_vec());
            }
            Some(acc) => {
                for (a, b) in acc.iter_mut().zip(dense.data()) {
                    *a += b;
                }
            }
        }
    }
    let data = sum.ok_or_else(|| CliError::Input("empty decomposition".into()))?;
    Ok(DenseTensor::from_parts(extents, data))
}

/// Runs the full pipeline. `truth`, when given, must share the shape and the
/// number of terms; the report then carries the relative Frobenius error of
/// the aggregated dense tensor against the truth's.
pub fn run(
    input: &DecompositionFile,
    alpha: AlphaChoice,
    truth: Option<&DecompositionFile>,
    seed: Option<u64>,
) -> Result<Aggregated, CliError> {
    io::check_schema(input.schema)?;
    if input.decompositions.is_empty() {
        return Err(CliError::Input("no decompositions in input".into()));
    }
    let rank = input.decompositions[0].len();
    if rank == 0 {
        return Err(CliError::Input("decompositions have no terms".into()));
    }
    if let Some(bad) = input.decompositions.iter().position(|d| d.len() != rank) {
        return Err(CliError::Input(format!(
            "decomposition {bad} has {} terms, expected {rank}",
            input.decompositions[bad].len()
        )));
    }

    let mut warnings = Vec::new();
    let probe_shape = io::build_shape(&input.dims, &input.mults, 1.0)?;
    let alpha_value = match alpha {
        AlphaChoice::Auto => frechet::default_mean_alpha(probe_shape.total_multiplicity()),
        AlphaChoice::Explicit(a) => a,
    };
    let shape = io::build_shape(&input.dims, &input.mults, alpha_value)?;
    if segre::connectedness_class(&shape) != Connectedness::Connected {
        warnings.push(format!(
            "alpha = {alpha_value} does not guarantee geodesic connectedness; \
             aggregation may fail on far-apart terms (auto uses {})",
            frechet::default_mean_alpha(shape.total_multiplicity())
        ));
    }

    let decompositions: Vec<Vec<SegrePoint>> = input
        .decompositions
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|t| io::load_term(&shape, t))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    // Match every decomposition's terms to the reference (the first one).
    let reference = &decompositions[0];
    let mut groups: Vec<Vec<SegrePoint>> = reference.iter().map(|t| vec![t.clone()]).collect();
    for dec in &decompositions[1..] {
        let cost: Vec<Vec<f64>> = reference
            .iter()
            .map(|r| {
                dec.iter()
                    .map(|t| Ok(segre::segre_distance(r, t)?.0))
                    .collect::<Result<Vec<_>, CliError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let assign = min_cost_assignment(&cost);
        for (i, &j) in assign.iter().enumerate() {
            groups[i].push(dec[j].clone());
        }
    }

    let cfg = MeanConfig {
        shuffle_seed: seed,
        ..MeanConfig::default()
    };
    let mut terms = Vec::with_capacity(rank);
    let mut reports = Vec::with_capacity(rank);
    for (i, group) in groups.iter().enumerate() {
        let warm = frechet::inductive_mean(group, &cfg)?;
        let mean = frechet::refine_mean(group, &warm, &cfg)?;
        let distances: Vec<f64> = group
            .iter()
            .map(|x| Ok(segre::segre_distance(&mean, x)?.0))
            .collect::<Result<Vec<_>, CliError>>()?;
        let mean_distance = distances.iter().sum::<f64>() / distances.len() as f64;
        let max_distance = distances.iter().cloned().fold(0.0, f64::max);
        reports.push(TermReport {
            index: i,
            distances,
            mean_distance,
            max_distance,
        });
        terms.push(mean);
    }

    let truth_relative_error = match truth {
        None => None,
        Some(truth_file) => {
            io::check_schema(truth_file.schema)?;
            if truth_file.dims != input.dims || truth_file.mults != input.mults {
                return Err(CliError::Input("truth file has a different shape".into()));
            }
            if truth_file.decompositions.len() != 1 {
                return Err(CliError::Input(
                    "truth file must hold exactly one decomposition".into(),
                ));
            }
            let truth_terms = truth_file.decompositions[0]
                .iter()
                .map(|t| io::load_term(&shape, t))
                .collect::<Result<Vec<_>, _>>()?;
            let truth_dense = dense_sum(&truth_terms)?;
            let agg_dense = dense_sum(&terms)?;
            let norm = truth_dense.frobenius();
            if norm == 0.0 {
                return Err(CliError::Input("truth tensor is zero".into()));
            }
            let mut err2 = 0.0;
            for (a, b) in agg_dense.data().iter().zip(truth_dense.data()) {
                err2 += (a - b) * (a - b);
            }
            Some(err2.sqrt() / norm)
        }
    };

    let output = AggregateOutput {
        schema: io::SCHEMA_VERSION,
        dims: input.dims.clone(),
        mults: input.mults.clone(),
        alpha: alpha_value,
        decompositions: vec![terms.iter().map(io::term_of_point).collect()],
        report: AggregateReport {
            terms: reports,
            truth_relative_error,
        },
    };
    Ok(Aggregated {
        output,
        warnings,
        terms,
    })
}
