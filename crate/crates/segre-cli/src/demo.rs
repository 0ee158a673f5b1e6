//! Geodesic traces on the punctured plane between (0,1) and (1,0), one CSV
//! per warping factor. The family sweeps from hugging the unit circle
//! (α → 0) through the straight chord (α = 1) to grazing the puncture
//! (α → 2, where the endpoints stop being compatible).

use std::io::Write;
use std::path::{Path, PathBuf};

use warped_segre::presegre::{self, ManifoldShape, PreSegrePoint};

use crate::CliError;

/// One row per sample: (t, x, y) with t increasing through [0, 1].
pub fn trace(alpha: f64, samples: usize) -> Result<Vec<(f64, f64, f64)>, CliError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(CliError::Input(format!(
            "warping factor {alpha} must be positive"
        )));
    }
    if alpha >= 2.0 {
        return Err(CliError::Geometry(
            warped_segre::GeometryError::Incompatible {
                alpha_m: alpha * std::f64::consts::FRAC_PI_2,
            },
        ));
    }
    if samples < 2 {
        return Err(CliError::Input("need at least 2 samples".into()));
    }
    let shape = ManifoldShape::new(vec![2], vec![1], alpha)?;
    let start = PreSegrePoint::from_coords(shape.clone(), 1.0, vec![vec![0.0, 1.0]])?;
    let end = PreSegrePoint::from_coords(shape, 1.0, vec![vec![1.0, 0.0]])?;
    let v = presegre::pre_log(&start, &end)?;
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let point = presegre::geodesic_sample(&v, t)?;
        let u = point.factor(0).coords();
        rows.push((t, point.lambda() * u[0], point.lambda() * u[1]));
    }
    Ok(rows)
}

/// File name used for one trace, e.g. `geodesic_alpha_0.25.csv`.
pub fn csv_name(alpha: f64) -> String {
    format!("geodesic_alpha_{alpha}.csv")
}

/// Writes a trace as CSV (`t,x,y` header, LF endings, 17 significant digits).
pub fn write_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<(), CliError> {
    let mut out = Vec::new();
    out.extend_from_slice(b"t,x,y\n");
    for &(t, x, y) in rows {
        writeln!(out, "{t:.16e},{x:.16e},{y:.16e}").map_err(|e| CliError::Input(e.to_string()))?;
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Runs the demo for every warping factor, writing one CSV per value into
/// `out_dir`; returns the written paths.
pub fn run(alphas: &[f64], samples: usize, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    for &alpha in alphas {
        let rows = trace(alpha, samples)?;
        let path = out_dir.join(csv_name(alpha));
        write_csv(&path, &rows)?;
        written.push(path);
    }
    Ok(written)
}

/// The family of warping factors shown in the reference figure.
pub fn default_alphas() -> Vec<f64> {
    vec![0.01, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.99]
}
