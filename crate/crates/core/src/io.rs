//! CSV import/export for every artifact the pipeline produces.
//!
//! All floating-point values are written with 17 significant digits so a
//! write/read cycle reproduces the `f64` bit pattern exactly.

use std::path::Path;

use crate::crossmap::CrossMapCurve;
use crate::diagnostics::DistanceMatrix;
use crate::dynsys::{TimeSeries, Trajectory};
use crate::embedding::{DimScan, LagScan, ShadowManifold};
use crate::error::{Error, Result};
use crate::real::Real;

fn sig(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a trajectory as `t,<axis0>,<axis1>,…`.
///
/// `axes` must have one name per state component.
pub fn write_trajectory_csv<R: Real>(
    path: &Path,
    traj: &Trajectory<R>,
    axes: &[&str],
) -> Result<()> {
    if axes.len() != traj.dim {
        return Err(Error::Argument(format!(
            "{} axis names for a dimension-{} trajectory",
            axes.len(),
            traj.dim
        )));
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    header.extend(axes.iter().map(|a| a.to_string()));
    w.write_record(&header)?;
    for i in 0..traj.len() {
        let t = traj.t0 + traj.dt * i as f64;
        let mut rec = vec![sig(t)];
        rec.extend(traj.state(i).iter().map(|v| sig(v.widen())));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a scalar series as `t,value`.
pub fn write_series_csv<R: Real>(path: &Path, series: &TimeSeries<R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "value"])?;
    for (i, v) in series.values.iter().enumerate() {
        w.write_record([sig(series.dt * i as f64), sig(v.widen())])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a scalar series from a CSV with a `value` column.
///
/// A `t` column, when present, must be uniformly spaced and sets `dt`;
/// otherwise `dt = 1`.
pub fn read_series_csv(path: &Path) -> Result<TimeSeries<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let v_col = headers
        .iter()
        .position(|h| h.trim() == "value")
        .ok_or_else(|| Error::Argument(format!("{} has no 'value' column", path.display())))?;
    let t_col = headers.iter().position(|h| h.trim() == "t");
    let mut values = Vec::new();
    let mut times = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v: f64 = rec
            .get(v_col)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Argument(format!("unparsable value row in {}", path.display())))?;
        values.push(v);
        if let Some(tc) = t_col {
            let t: f64 = rec
                .get(tc)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Argument(format!("unparsable t row in {}", path.display())))?;
            times.push(t);
        }
    }
    if values.is_empty() {
        return Err(Error::Argument(format!("{} holds no samples", path.display())));
    }
    let dt = if times.len() >= 2 {
        let dt = times[1] - times[0];
        let uniform = times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
        if !(dt > 0.0 && uniform) {
            return Err(Error::Argument(format!(
                "{} must have a uniformly increasing 't' column",
                path.display()
            )));
        }
        dt
    } else {
        1.0
    };
    Ok(TimeSeries { values, dt })
}

/// Write a shadow manifold as `idx,c0,c1,…` where `idx` is the source-series
/// index of each point.
pub fn write_manifold_csv<R: Real>(path: &Path, man: &ShadowManifold<R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["idx".to_string()];
    header.extend((0..man.dim()).map(|j| format!("c{j}")));
    w.write_record(&header)?;
    for (i, &idx) in man.time_index.iter().enumerate() {
        let mut rec = vec![idx.to_string()];
        rec.extend(man.point(i).iter().map(|v| sig(v.widen())));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a mutual-information lag scan as `lag,mi`.
pub fn write_lag_scan_csv(path: &Path, scan: &LagScan) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["lag", "mi"])?;
    for (lag, mi) in scan.curve.iter().enumerate() {
        w.write_record([lag.to_string(), sig(*mi)])?;
    }
    w.flush()?;
    Ok(())
}

/// Write a false-nearest-neighbor dimension scan as `dim,fnn_fraction`.
pub fn write_dim_scan_csv(path: &Path, scan: &DimScan) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["dim", "fnn_fraction"])?;
    for (m, frac) in scan.dims.iter().zip(&scan.curve) {
        w.write_record([m.to_string(), sig(*frac)])?;
    }
    w.flush()?;
    Ok(())
}

/// Write a pair of skill curves as `L,rho_xy,rho_yx`.
///
/// Both curves must share the same library schedule.
pub fn write_skill_curves_csv(
    path: &Path,
    curve_xy: &CrossMapCurve,
    curve_yx: &CrossMapCurve,
) -> Result<()> {
    if curve_xy.library_sizes != curve_yx.library_sizes {
        return Err(Error::Argument(
            "skill curves with different library schedules cannot share a table".into(),
        ));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["L", "rho_xy", "rho_yx"])?;
    for ((l, a), b) in curve_xy.library_sizes.iter().zip(&curve_xy.rho).zip(&curve_yx.rho) {
        w.write_record([l.to_string(), sig(*a), sig(*b)])?;
    }
    w.flush()?;
    Ok(())
}

/// Write a distance matrix, optionally thresholded to a 0/1 recurrence plot.
///
/// With a threshold ε, entry (i, j) becomes `1` when the distance is
/// strictly below ε. The first column holds each row's source index.
pub fn write_distance_matrix_csv(
    path: &Path,
    matrix: &DistanceMatrix,
    threshold: Option<f64>,
) -> Result<()> {
    let n = matrix.n_states();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["idx".to_string()];
    header.extend(matrix.source_rows.iter().map(|r| r.to_string()));
    w.write_record(&header)?;
    for i in 0..n {
        let mut rec = Vec::with_capacity(n + 1);
        rec.push(matrix.source_rows[i].to_string());
        for j in 0..n {
            rec.push(match threshold {
                Some(eps) => u8::from(matrix.get(i, j) < eps).to_string(),
                None => sig(matrix.get(i, j)),
            });
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
