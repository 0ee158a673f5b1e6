//! The exp/log/dist/mean command bodies, shared between the binary and the
//! test suites.

use warped_segre::frechet::{self, MeanConfig};
use warped_segre::segre::{self, SegrePoint, SegreTangent};

use crate::io::{self, PointsFile};
use crate::CliError;

fn load_points(
    file: &PointsFile,
    flag_alpha: Option<f64>,
    expect: Option<usize>,
) -> Result<(Vec<SegrePoint>, f64), CliError> {
    io::check_schema(file.schema)?;
    let alpha = io::resolve_alpha(file.alpha, flag_alpha)?;
    let shape = io::build_shape(&file.dims, &file.mults, alpha)?;
    if let Some(n) = expect {
        if file.points.len() != n {
            return Err(CliError::Input(format!(
                "expected {n} point(s), found {}",
                file.points.len()
            )));
        }
    } else if file.points.is_empty() {
        return Err(CliError::Input("no points in input".into()));
    }
    let points = file
        .points
        .iter()
        .map(|t| io::load_term(&shape, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((points, alpha))
}

fn output_file(template: &PointsFile, alpha: f64, point: &SegrePoint) -> PointsFile {
    PointsFile {
        schema: io::SCHEMA_VERSION,
        dims: template.dims.clone(),
        mults: template.mults.clone(),
        alpha: Some(alpha),
        points: vec![io::term_of_point(point)],
        tangent: None,
    }
}

/// `exp`: one point plus a tangent in, the reached point out.
pub fn run_exp(file: &PointsFile, flag_alpha: Option<f64>) -> Result<PointsFile, CliError> {
    let (points, alpha) = load_points(file, flag_alpha, Some(1))?;
    let tangent = file
        .tangent
        .as_ref()
        .ok_or_else(|| CliError::Input("exp needs a \"tangent\" field".into()))?;
    let at = &points[0];
    let coords = io::load_tangent(at.shape(), &file.points[0], at, tangent)?;
    let v = SegreTangent::new(at.clone(), coords)?;
    let out = segre::segre_exp(&v)?;
    Ok(output_file(file, alpha, &out))
}

/// `log`: two points in, the base point plus connecting tangent out. With
/// `check` set, also reports the dense round-trip defect of
/// `exp(base, tangent)` against the target.
pub fn run_log(
    file: &PointsFile,
    flag_alpha: Option<f64>,
    check: bool,
) -> Result<(PointsFile, Option<f64>), CliError> {
    let (points, alpha) = load_points(file, flag_alpha, Some(2))?;
    let v = segre::segre_log(&points[0], &points[1])?;
    let defect = if check {
        let back = segre::segre_exp(&v)?;
        Some(back.embed()?.max_abs_diff(&points[1].embed()?))
    } else {
        None
    };
    let mut out = output_file(file, alpha, &points[0]);
    out.tangent = Some(io::tangent_json(v.coords()));
    Ok((out, defect))
}

/// `dist`: two points in, `(value, connected)` out.
pub fn run_dist(file: &PointsFile, flag_alpha: Option<f64>) -> Result<(f64, bool), CliError> {
    let (points, _) = load_points(file, flag_alpha, Some(2))?;
    Ok(segre::segre_distance(&points[0], &points[1])?)
}

/// `mean`: all points in, the Fréchet mean out (interpolation warm start,
/// then gradient refinement).
pub fn run_mean(
    file: &PointsFile,
    flag_alpha: Option<f64>,
    seed: Option<u64>,
) -> Result<PointsFile, CliError> {
    let (points, alpha) = load_points(file, flag_alpha, None)?;
    let cfg = MeanConfig {
        shuffle_seed: seed,
        ..MeanConfig::default()
    };
    let warm = frechet::inductive_mean(&points, &cfg)?;
    let mean = frechet::refine_mean(&points, &warm, &cfg)?;
    Ok(output_file(file, alpha, &mean))
}
