//! Convergent cross mapping: simplex-style nearest-neighbor prediction
//! across shadow manifolds, library-size sweeps, and the convergence test
//! that turns a skill curve into a causal verdict.
//!
//! Direction naming: `rho_xy` is the skill of reconstructing series X from
//! the manifold of Y. Information about X appears in Y's history exactly
//! when X drives Y, so a converging `rho_xy` supports the verdict X ⇒ Y.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynsys::TimeSeries;
use crate::embedding::{delay_embed, EmbeddingParams, ShadowManifold};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::SplitMix64;

/// Cap on the number of fixed evaluation queries per sweep.
pub const EVAL_CAP: usize = 2000;
/// Default final-skill floor for calling a direction converged.
pub const CONVERGENCE_FLOOR: f64 = 0.8;
/// Default plateau tolerance: skill slope per decade of library size.
pub const PLATEAU_TOL: f64 = 0.02;
/// Library sizes per sweep before deduplication.
pub const SCHEDULE_POINTS: usize = 12;
/// Distances below this fraction of the manifold extent count as
/// coincident points.
pub const ZERO_DISTANCE_FACTOR: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Weights and single-shot estimation
// ---------------------------------------------------------------------------

/// Exponential simplex weights for ascending neighbor distances.
///
/// `w_i = exp(−d_i/d_1) / Σ_j exp(−d_j/d_1)`; for `d = [1, 2, 3]` this is
/// approximately `[0.665, 0.245, 0.090]`. A zero nearest distance falls
/// back to equal weights (the sweep engine averages coincident points
/// instead before this can happen).
pub fn neighbor_weights(distances: &[f64]) -> Vec<f64> {
    assert!(!distances.is_empty(), "need at least one neighbor");
    let d1 = distances[0];
    if !(d1 > 0.0) {
        return vec![1.0 / distances.len() as f64; distances.len()];
    }
    let u: Vec<f64> = distances.iter().map(|&d| (-d / d1).exp()).collect();
    let sum: f64 = u.iter().sum();
    u.into_iter().map(|v| v / sum).collect()
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Keep the `k` smallest `(squared distance, row)` pairs; ties keep the
/// earlier row.
#[inline]
fn push_neighbor(best: &mut Vec<(f64, usize)>, k: usize, d2: f64, idx: usize) {
    if best.len() == k && d2 >= best[k - 1].0 {
        return;
    }
    let pos = best.partition_point(|&(b, _)| b <= d2);
    best.insert(pos, (d2, idx));
    if best.len() > k {
        best.pop();
    }
}

/// Prediction from a filled neighbor heap, with the coincident-point rule:
/// when the nearest neighbor is within the zero threshold, all library
/// points that close to the query are averaged with equal weight.
fn predict_from_neighbors(
    pts: &[f64],
    m: usize,
    target_row: &[f64],
    best: &[(f64, usize)],
    qp: &[f64],
    zero_thr2: f64,
    library: impl Iterator<Item = usize>,
    q: usize,
) -> f64 {
    let d1_2 = best[0].0;
    if d1_2 <= zero_thr2 {
        let mut acc = 0.0;
        let mut count = 0usize;
        for i in library {
            if i == q {
                continue;
            }
            if dist2(qp, &pts[i * m..(i + 1) * m]) <= zero_thr2 {
                acc += target_row[i];
                count += 1;
            }
        }
        return acc / count as f64;
    }
    let d1 = d1_2.sqrt();
    let mut wsum = 0.0;
    let mut acc = 0.0;
    for &(d2, idx) in best {
        let w = (-(d2.sqrt() / d1)).exp();
        wsum += w;
        acc += w * target_row[idx];
    }
    acc / wsum
}

/// Nearest-neighbor prediction at query row `q` from an explicit library
/// row set.
fn predict_over_subset(
    pts: &[f64],
    m: usize,
    target_row: &[f64],
    library: &[usize],
    q: usize,
    k: usize,
    zero_thr2: f64,
) -> f64 {
    let qp = &pts[q * m..(q + 1) * m];
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for &i in library {
        if i == q {
            continue;
        }
        push_neighbor(&mut best, k, dist2(qp, &pts[i * m..(i + 1) * m]), i);
    }
    predict_from_neighbors(
        pts,
        m,
        target_row,
        &best,
        qp,
        zero_thr2,
        library.iter().copied(),
        q,
    )
}

fn widened_points<R: Real>(man: &ShadowManifold<R>) -> Vec<f64> {
    man.points.iter().map(|v| v.widen()).collect()
}

/// Target series value at each manifold row, via the row's time index.
fn target_by_row<R: Real>(man: &ShadowManifold<R>, target: &TimeSeries<R>) -> Result<Vec<f64>> {
    let needed = man.time_index.last().map_or(0, |&t| t + 1);
    if target.len() < needed {
        return Err(Error::SeriesTooShort { needed, got: target.len() });
    }
    Ok(man
        .time_index
        .iter()
        .map(|&t| target.values[t].widen())
        .collect())
}

/// Cross-map estimates of a target series at `queries`, using the source
/// manifold's geometry and an explicit library row set.
///
/// `target` is sampled through each row's time index, the library needs at
/// least `m + 2` rows, and a query contained in the library is excluded
/// from its own neighbor search.
pub fn cross_map_estimate<R: Real>(
    source: &ShadowManifold<R>,
    target: &TimeSeries<R>,
    library: &[usize],
    queries: &[usize],
) -> Result<Vec<f64>> {
    let m = source.dim();
    let k = m + 1;
    if library.len() < m + 2 {
        return Err(Error::LibraryTooSmall { needed: m + 2, got: library.len() });
    }
    let rows = source.len();
    if let Some(&bad) = library.iter().chain(queries).find(|&&i| i >= rows) {
        return Err(Error::Argument(format!(
            "row index {bad} out of range for manifold with {rows} rows"
        )));
    }
    let pts = widened_points(source);
    let target_row = target_by_row(source, target)?;
    let zero_thr = ZERO_DISTANCE_FACTOR * source.bounding_diameter();
    let zero_thr2 = zero_thr * zero_thr;
    Ok(queries
        .iter()
        .map(|&q| predict_over_subset(&pts, m, &target_row, library, q, k, zero_thr2))
        .collect())
}

/// Absolute Pearson correlation between predictions and truth.
///
/// Returns the skill and a degeneracy flag; a constant side makes the
/// correlation undefined and yields `(0.0, true)`.
pub fn forecast_skill(pred: &[f64], truth: &[f64]) -> (f64, bool) {
    assert_eq!(pred.len(), truth.len(), "skill needs aligned slices");
    let n = pred.len();
    if n < 2 {
        return (0.0, true);
    }
    let nf = n as f64;
    let mp = pred.iter().sum::<f64>() / nf;
    let mt = truth.iter().sum::<f64>() / nf;
    let (mut spp, mut stt, mut spt) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let dp = pred[i] - mp;
        let dt = truth[i] - mt;
        spp += dp * dp;
        stt += dt * dt;
        spt += dp * dt;
    }
    if !(spp > 0.0) || !(stt > 0.0) {
        return (0.0, true);
    }
    ((spt / (spp * stt).sqrt()).abs().min(1.0), false)
}

// ---------------------------------------------------------------------------
// Sweep protocol
// ---------------------------------------------------------------------------

/// Geometric library schedule from `max(5(m+1), 50)` up to `n_rows`,
/// deduplicated, with the final entry forced to `n_rows`.
pub fn default_schedule(n_rows: usize, m: usize) -> Vec<usize> {
    let lo = (5 * (m + 1)).max(50);
    let hi = n_rows;
    if lo >= hi {
        return vec![hi];
    }
    let log_ratio = (hi as f64 / lo as f64).ln();
    let mut sizes: Vec<usize> = (0..SCHEDULE_POINTS)
        .map(|i| {
            let t = i as f64 / (SCHEDULE_POINTS - 1) as f64;
            ((lo as f64) * (log_ratio * t).exp()).round() as usize
        })
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    *sizes.last_mut().unwrap() = hi;
    sizes.dedup();
    sizes
}

/// How library rows are drawn at each schedule size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LibraryMode {
    /// The first `L` manifold rows — the default, and what the convergence
    /// bands are calibrated against.
    ContiguousPrefix,
    /// `L` rows sampled uniformly without replacement, seeded per size.
    RandomSubsample,
}

/// Sweep configuration; `Default` gives the pinned protocol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CcmConfig {
    /// Custom library schedule; `None` derives the geometric default.
    pub schedule: Option<Vec<usize>>,
    pub eval_cap: usize,
    pub floor: f64,
    pub plateau_tol: f64,
    pub library: LibraryMode,
    pub seed: u64,
    /// Report labels for the two series.
    pub label_x: String,
    pub label_y: String,
}

impl Default for CcmConfig {
    fn default() -> Self {
        CcmConfig {
            schedule: None,
            eval_cap: EVAL_CAP,
            floor: CONVERGENCE_FLOOR,
            plateau_tol: PLATEAU_TOL,
            library: LibraryMode::ContiguousPrefix,
            seed: 0,
            label_x: "x".into(),
            label_y: "y".into(),
        }
    }
}

/// One direction of a sweep: skill against library size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossMapCurve {
    pub library_sizes: Vec<usize>,
    pub rho: Vec<f64>,
    /// Label of the manifold the estimates were made on.
    pub source_manifold: String,
    /// Label of the series being reconstructed.
    pub target_series: String,
    /// Manifold rows the skill was evaluated at (fixed across sizes).
    pub eval_indices: Vec<usize>,
}

/// Diagnostics from the convergence test on one skill curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub final_rho: f64,
    /// Mean skill of the tail window minus the head window.
    pub rise: f64,
    /// Least-squares slope of skill against log10 library size over the
    /// tail window.
    pub tail_slope: f64,
}

/// Causal verdict labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bidirectional,
    XToY,
    YToX,
    NoCausality,
}

impl Verdict {
    /// Human-readable arrow with concrete variable names.
    pub fn render(&self, x: &str, y: &str) -> String {
        match self {
            Verdict::Bidirectional => format!("{x}⇔{y}"),
            Verdict::XToY => format!("{x}⇒{y}"),
            Verdict::YToX => format!("{y}⇒{x}"),
            Verdict::NoCausality => "no causal link".into(),
        }
    }
}

/// Thresholds the verdict was taken at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub floor: f64,
    pub plateau_tol: f64,
}

/// Final skills, per-direction convergence, and the combined verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalVerdict {
    pub rho_xy_final: f64,
    pub rho_yx_final: f64,
    /// Direction passed the verdict rule (skill floor + rising curve).
    pub converged_xy: bool,
    pub converged_yx: bool,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
}

/// Everything a sweep produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcmResult {
    pub curve_xy: CrossMapCurve,
    pub curve_yx: CrossMapCurve,
    pub report_xy: ConvergenceReport,
    pub report_yx: ConvergenceReport,
    pub verdict: CausalVerdict,
}

/// Test a skill curve for convergence: the final value clears `floor`,
/// the tail window improves on the head window, and the tail slope per
/// decade of library size is below `plateau_tol`. Windows are a quarter
/// of the curve, at least 3 entries.
pub fn convergence_check(
    rho: &[f64],
    library_sizes: &[usize],
    floor: f64,
    plateau_tol: f64,
) -> Result<ConvergenceReport> {
    if rho.is_empty() || rho.len() != library_sizes.len() {
        return Err(Error::Argument(format!(
            "curve and sizes must be nonempty and aligned ({} vs {})",
            rho.len(),
            library_sizes.len()
        )));
    }
    let len = rho.len();
    let q = (len / 4).max(3).min(len);
    let head = rho[..q].iter().sum::<f64>() / q as f64;
    let tail = rho[len - q..].iter().sum::<f64>() / q as f64;
    let final_rho = rho[len - 1];

    let xs: Vec<f64> = library_sizes[len - q..]
        .iter()
        .map(|&l| (l as f64).log10())
        .collect();
    let ys = &rho[len - q..];
    let xm = xs.iter().sum::<f64>() / q as f64;
    let ym = ys.iter().sum::<f64>() / q as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..q {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    let tail_slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };

    Ok(ConvergenceReport {
        converged: final_rho >= floor && tail > head && tail_slope < plateau_tol,
        final_rho,
        rise: tail - head,
        tail_slope,
    })
}

fn validate_schedule(schedule: &[usize], n_rows: usize, m: usize) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Argument("library schedule is empty".into()));
    }
    if !schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Argument("library schedule must be strictly ascending".into()));
    }
    let last = *schedule.last().unwrap();
    if last > n_rows {
        return Err(Error::Argument(format!(
            "library size {last} exceeds manifold rows {n_rows}"
        )));
    }
    let first = schedule[0];
    if first < m + 2 {
        return Err(Error::LibraryTooSmall { needed: m + 2, got: first });
    }
    Ok(())
}

/// Strided evaluation rows: every `ceil(n_rows / cap)`-th row.
pub fn eval_rows(n_rows: usize, cap: usize) -> Vec<usize> {
    let cap = cap.max(1);
    let stride = n_rows.div_ceil(cap).max(1);
    (0..n_rows).step_by(stride).collect()
}

/// Skill curve for one direction: reconstruct `target` from `source`
/// at every schedule size.
///
/// Queries outside the current library are out-of-sample; queries inside
/// it are leave-one-out. This is the engine both the plain sweep and the
/// per-segment sweeps go through.
pub fn sweep_direction<R: Real>(
    source: &ShadowManifold<R>,
    target: &TimeSeries<R>,
    schedule: &[usize],
    eval: &[usize],
    library: LibraryMode,
    seed: u64,
) -> Result<Vec<f64>> {
    let m = source.dim();
    let k = m + 1;
    let n_rows = source.len();
    validate_schedule(schedule, n_rows, m)?;
    if let Some(&bad) = eval.iter().find(|&&q| q >= n_rows) {
        return Err(Error::Argument(format!(
            "evaluation row {bad} out of range for {n_rows} rows"
        )));
    }
    let pts = widened_points(source);
    let target_row = target_by_row(source, target)?;
    let zero_thr = ZERO_DISTANCE_FACTOR * source.bounding_diameter();
    let zero_thr2 = zero_thr * zero_thr;

    // predictions[qi][si]: query eval[qi] at schedule size schedule[si]
    let predictions: Vec<Vec<f64>> = match library {
        LibraryMode::ContiguousPrefix => {
            let last_l = *schedule.last().unwrap();
            eval.par_iter()
                .map(|&q| {
                    let qp = &pts[q * m..(q + 1) * m];
                    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
                    let mut out = Vec::with_capacity(schedule.len());
                    let mut cursor = 0;
                    for i in 0..last_l {
                        if i != q {
                            push_neighbor(
                                &mut best,
                                k,
                                dist2(qp, &pts[i * m..(i + 1) * m]),
                                i,
                            );
                        }
                        while cursor < schedule.len() && schedule[cursor] == i + 1 {
                            out.push(predict_from_neighbors(
                                &pts, m, &target_row, &best, qp, zero_thr2,
                                0..i + 1, q,
                            ));
                            cursor += 1;
                        }
                    }
                    out
                })
                .collect()
        }
        LibraryMode::RandomSubsample => {
            let sets: Vec<Vec<usize>> = schedule
                .iter()
                .map(|&l| {
                    let mut rng =
                        SplitMix64::new(SplitMix64::sub_seed(seed, &format!("library:{l}")));
                    rng.sample_indices(n_rows, l)
                })
                .collect();
            eval.par_iter()
                .map(|&q| {
                    sets.iter()
                        .map(|rows| {
                            predict_over_subset(&pts, m, &target_row, rows, q, k, zero_thr2)
                        })
                        .collect()
                })
                .collect()
        }
    };

    let truth: Vec<f64> = eval.iter().map(|&q| target_row[q]).collect();
    let mut rho = Vec::with_capacity(schedule.len());
    let mut col = Vec::with_capacity(eval.len());
    for si in 0..schedule.len() {
        col.clear();
        col.extend(predictions.iter().map(|p| p[si]));
        rho.push(forecast_skill(&col, &truth).0);
    }
    Ok(rho)
}

fn truncate_to<R: Real>(series: &TimeSeries<R>, n: usize) -> TimeSeries<R> {
    TimeSeries { values: series.values[..n].to_vec(), dt: series.dt }
}

/// Full bidirectional sweep over two series embedded with the same
/// parameters. Series of unequal length are truncated to the shorter.
pub fn ccm_sweep<R: Real>(
    series_x: &TimeSeries<R>,
    series_y: &TimeSeries<R>,
    params: EmbeddingParams,
    config: &CcmConfig,
) -> Result<CcmResult> {
    let n = series_x.len().min(series_y.len());
    let sx = truncate_to(series_x, n);
    let sy = truncate_to(series_y, n);
    let man_x = delay_embed(&sx, params, &config.label_x)?;
    let man_y = delay_embed(&sy, params, &config.label_y)?;
    sweep_manifolds(&man_x, &sx, &man_y, &sy, params.m, config)
}

/// Bidirectional sweep over two prepared manifolds and their source
/// series; `ccm_sweep` and the segment pipeline both land here.
pub fn sweep_manifolds<R: Real>(
    man_x: &ShadowManifold<R>,
    series_x: &TimeSeries<R>,
    man_y: &ShadowManifold<R>,
    series_y: &TimeSeries<R>,
    m: usize,
    config: &CcmConfig,
) -> Result<CcmResult> {
    let min_rows = man_x.len().min(man_y.len());
    let schedule = match &config.schedule {
        Some(s) => s.clone(),
        None => default_schedule(min_rows, m),
    };
    validate_schedule(&schedule, min_rows, m)?;
    let eval_x = eval_rows(man_x.len(), config.eval_cap);
    let eval_y = eval_rows(man_y.len(), config.eval_cap);

    // X ⇒ Y evidence: reconstruct x from M_y.
    let rho_xy = sweep_direction(man_y, series_x, &schedule, &eval_y, config.library, config.seed)?;
    let rho_yx = sweep_direction(man_x, series_y, &schedule, &eval_x, config.library, config.seed)?;

    let report_xy = convergence_check(&rho_xy, &schedule, config.floor, config.plateau_tol)?;
    let report_yx = convergence_check(&rho_yx, &schedule, config.floor, config.plateau_tol)?;

    let curve_xy = CrossMapCurve {
        library_sizes: schedule.clone(),
        rho: rho_xy,
        source_manifold: man_y.source_id.clone(),
        target_series: config.label_x.clone(),
        eval_indices: eval_y,
    };
    let curve_yx = CrossMapCurve {
        library_sizes: schedule,
        rho: rho_yx,
        source_manifold: man_x.source_id.clone(),
        target_series: config.label_y.clone(),
        eval_indices: eval_x,
    };
    let verdict = assemble_verdict(&report_xy, &report_yx, config);
    Ok(CcmResult { curve_xy, curve_yx, report_xy, report_yx, verdict })
}

/// Combine two direction reports into the causal verdict.
///
/// A direction is declared causal when its final skill clears the floor
/// and the curve has risen with library size (tail window above head
/// window). The plateau slope stays advisory: demanding a flat tail
/// rejects curves that are still climbing into a high plateau at the
/// largest available library, which inverts the verdict on systems whose
/// skill is unambiguous.
pub fn assemble_verdict(
    report_xy: &ConvergenceReport,
    report_yx: &ConvergenceReport,
    config: &CcmConfig,
) -> CausalVerdict {
    let causal_xy = report_xy.final_rho >= config.floor && report_xy.rise > 0.0;
    let causal_yx = report_yx.final_rho >= config.floor && report_yx.rise > 0.0;
    let verdict = match (causal_xy, causal_yx) {
        (true, true) => Verdict::Bidirectional,
        (true, false) => Verdict::XToY,
        (false, true) => Verdict::YToX,
        (false, false) => Verdict::NoCausality,
    };
    CausalVerdict {
        rho_xy_final: report_xy.final_rho,
        rho_yx_final: report_yx.final_rho,
        converged_xy: causal_xy,
        converged_yx: causal_yx,
        verdict,
        thresholds: Thresholds { floor: config.floor, plateau_tol: config.plateau_tol },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{catalogue_system, observe, simulate_reference, Measurement};

    fn lorenz_series() -> (TimeSeries<f64>, TimeSeries<f64>) {
        let spec = catalogue_system::<f64>("lorenz63").unwrap();
        let traj = simulate_reference(&spec).unwrap();
        let x = observe(&traj, &Measurement::Coord(0)).unwrap();
        let z = observe(&traj, &Measurement::Coord(2)).unwrap();
        (x, z)
    }

    fn short(series: &TimeSeries<f64>, n: usize) -> TimeSeries<f64> {
        TimeSeries { values: series.values[..n].to_vec(), dt: series.dt }
    }

    #[test]
    fn weights_match_worked_example() {
        let w = neighbor_weights(&[1.0, 2.0, 3.0]);
        assert!((w[0] - 0.6652).abs() < 1e-4, "w0 {}", w[0]);
        assert!((w[1] - 0.2447).abs() < 1e-4, "w1 {}", w[1]);
        assert!((w[2] - 0.0900).abs() < 1e-4, "w2 {}", w[2]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_nearest_distance_gives_equal_weights() {
        assert_eq!(neighbor_weights(&[0.0, 1.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn schedule_spans_geometrically() {
        let s = default_schedule(9983, 3);
        assert_eq!(s[0], 50);
        assert_eq!(*s.last().unwrap(), 9983);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.len() <= SCHEDULE_POINTS);
        // roughly geometric: consecutive ratios within a factor band
        for w in s.windows(2) {
            let r = w[1] as f64 / w[0] as f64;
            assert!(r > 1.2 && r < 2.2, "ratio {r}");
        }
    }

    #[test]
    fn schedule_collapses_when_range_is_tight() {
        assert_eq!(default_schedule(40, 3), vec![40]);
        assert_eq!(*default_schedule(51, 3).last().unwrap(), 51);
    }

    #[test]
    fn skill_oracles() {
        let (rho, degen) = forecast_skill(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((rho - 1.0).abs() < 1e-12 && !degen);
        let (rho, _) = forecast_skill(&[1.0, 2.0, 3.0], &[-2.0, -4.0, -6.0]);
        assert!((rho - 1.0).abs() < 1e-12, "anticorrelation folds to 1");
        let (rho, degen) = forecast_skill(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]);
        assert_eq!((rho, degen), (0.0, true));
    }

    #[test]
    fn convergence_worked_example() {
        let sizes = [50, 158, 500, 1581, 5000, 15811];
        let rho = [0.2, 0.5, 0.8, 0.9, 0.91, 0.915];
        let rep = convergence_check(&rho, &sizes, 0.5, PLATEAU_TOL).unwrap();
        assert!(rep.converged, "{rep:?}");
        assert_eq!(rep.final_rho, 0.915);
        assert!(rep.rise > 0.0);
        assert!(rep.tail_slope < PLATEAU_TOL);
    }

    #[test]
    fn convergence_rejects_rising_and_low_curves() {
        let sizes = [50, 158, 500, 1581, 5000, 15811];
        // still climbing steeply at the end
        let rising = [0.1, 0.2, 0.3, 0.4, 0.6, 0.9];
        let rep = convergence_check(&rising, &sizes, 0.5, PLATEAU_TOL).unwrap();
        assert!(!rep.converged, "{rep:?}");
        assert!(rep.tail_slope > PLATEAU_TOL);
        // plateaued but under the floor
        let low = [0.1, 0.3, 0.4, 0.42, 0.42, 0.42];
        let rep = convergence_check(&low, &sizes, 0.5, PLATEAU_TOL).unwrap();
        assert!(!rep.converged);
        // plateaued high but the tail never rose above the head
        let flat = [0.9, 0.9, 0.9, 0.9, 0.9, 0.9];
        let rep = convergence_check(&flat, &sizes, 0.5, PLATEAU_TOL).unwrap();
        assert!(!rep.converged, "flat curve shows no convergence evidence");
    }

    #[test]
    fn estimate_recovers_coincident_targets() {
        // series 1,2,1,2,… embeds into two coincident families; the
        // prediction at a query must equal the mean of its exact copies.
        let s = TimeSeries { values: [1.0, 2.0].repeat(20), dt: 1.0 };
        let man = delay_embed(&s, EmbeddingParams { tau: 1, m: 2 }, "s").unwrap();
        let library: Vec<usize> = (0..man.len()).collect();
        let preds = cross_map_estimate(&man, &s, &library, &[4, 5]).unwrap();
        // truth at rows 4 and 5: values at time indices 6 and 7
        assert!((preds[0] - s.values[man.time_index[4]]).abs() < 1e-12);
        assert!((preds[1] - s.values[man.time_index[5]]).abs() < 1e-12);
    }

    #[test]
    fn estimate_validates_inputs() {
        let s = TimeSeries { values: (0..100).map(|v| v as f64).collect(), dt: 1.0 };
        let man = delay_embed(&s, EmbeddingParams { tau: 2, m: 3 }, "s").unwrap();
        assert!(matches!(
            cross_map_estimate(&man, &s, &[0, 1, 2, 3], &[0]),
            Err(Error::LibraryTooSmall { needed: 5, got: 4 })
        ));
        let lib: Vec<usize> = (0..10).collect();
        assert!(cross_map_estimate(&man, &s, &lib, &[9999]).is_err());
    }

    #[test]
    fn self_cross_map_is_near_perfect() {
        let (x, _) = lorenz_series();
        let x = short(&x, 3000);
        let res = ccm_sweep(&x, &x, EmbeddingParams { tau: 9, m: 3 }, &CcmConfig::default())
            .unwrap();
        assert!(res.verdict.rho_xy_final > 0.999, "{}", res.verdict.rho_xy_final);
        assert!(res.verdict.rho_yx_final > 0.999);
    }

    #[test]
    fn lorenz_xz_recovers_forcing_direction() {
        // Full reference length: the strict plateau statistic needs the
        // curve to have finished its rise, which takes the whole run.
        let (x, z) = lorenz_series();
        let res = ccm_sweep(&x, &z, EmbeddingParams { tau: 9, m: 3 }, &CcmConfig::default())
            .unwrap();
        // z is reconstructable from M_x; x is not reconstructable from M_z
        assert!(res.verdict.rho_yx_final > 0.95, "{}", res.verdict.rho_yx_final);
        assert!(res.verdict.rho_xy_final < 0.8, "{}", res.verdict.rho_xy_final);
        assert!(res.report_yx.converged);
        assert!(!res.report_xy.converged);
        assert_eq!(res.verdict.verdict, Verdict::YToX);
        assert_eq!(res.verdict.verdict.render("x", "z"), "z⇒x");
    }

    #[test]
    fn sweeps_are_bitwise_deterministic() {
        let (x, z) = lorenz_series();
        let x = short(&x, 2500);
        let z = short(&z, 2500);
        let params = EmbeddingParams { tau: 9, m: 3 };
        let a = ccm_sweep(&x, &z, params, &CcmConfig::default()).unwrap();
        let b = ccm_sweep(&x, &z, params, &CcmConfig::default()).unwrap();
        assert_eq!(a.curve_xy.rho, b.curve_xy.rho);
        assert_eq!(a.curve_yx.rho, b.curve_yx.rho);
    }

    #[test]
    fn random_subsample_mode_is_seeded() {
        let (x, z) = lorenz_series();
        let x = short(&x, 2000);
        let z = short(&z, 2000);
        let params = EmbeddingParams { tau: 9, m: 3 };
        let mut cfg = CcmConfig { library: LibraryMode::RandomSubsample, seed: 11, ..Default::default() };
        let a = ccm_sweep(&x, &z, params, &cfg).unwrap();
        let b = ccm_sweep(&x, &z, params, &cfg).unwrap();
        assert_eq!(a.curve_yx.rho, b.curve_yx.rho, "same seed, same curve");
        cfg.seed = 12;
        let c = ccm_sweep(&x, &z, params, &cfg).unwrap();
        assert_ne!(a.curve_yx.rho, c.curve_yx.rho, "different seed, different draw");
        // subsampled libraries still converge on the strong direction
        assert!(c.verdict.rho_yx_final > 0.9, "{}", c.verdict.rho_yx_final);
    }

    #[test]
    fn schedule_validation_rejects_bad_input() {
        let (x, z) = lorenz_series();
        let x = short(&x, 1000);
        let z = short(&z, 1000);
        let params = EmbeddingParams { tau: 9, m: 3 };
        let cfg = |s: Vec<usize>| CcmConfig { schedule: Some(s), ..Default::default() };
        assert!(ccm_sweep(&x, &z, params, &cfg(vec![100, 50])).is_err());
        assert!(ccm_sweep(&x, &z, params, &cfg(vec![50, 5000])).is_err());
        assert!(matches!(
            ccm_sweep(&x, &z, params, &cfg(vec![3, 100])),
            Err(Error::LibraryTooSmall { .. })
        ));
    }

    #[test]
    fn verdict_serializes_with_machine_names() {
        let json = serde_json::to_string(&Verdict::Bidirectional).unwrap();
        assert_eq!(json, "\"bidirectional\"");
        let json = serde_json::to_string(&Verdict::XToY).unwrap();
        assert_eq!(json, "\"x_to_y\"");
    }
}
