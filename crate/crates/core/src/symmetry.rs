//! Symmetry-aware causality detection.
//!
//! Shadow manifolds of half-turn symmetric attractors come in two kinds:
//! observables that flip sign under the symmetry give inversion-symmetric
//! manifolds, invariant observables give asymmetric ones. Cross mapping
//! between the two kinds conflates the symmetric sheets; splitting the
//! symmetric manifold into its two sheets and cross mapping per segment
//! restores the lost skill. This module scores inversion symmetry, splits
//! manifolds, runs the segmented sweep, and classifies measurement parity
//! exactly for polynomial systems.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossmap::{
    assemble_verdict, convergence_check, default_schedule, eval_rows, sweep_direction,
    sweep_manifolds, CausalVerdict, CcmConfig, ConvergenceReport, CrossMapCurve,
};
use crate::diagnostics::{recurrence_check, RecurrenceParams};
use crate::dynsys::{Measurement, SystemSpec, SymmetryTag, TimeSeries};
use crate::embedding::{delay_embed, EmbeddingParams, ShadowManifold};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::Real;
use crate::rng::SplitMix64;

/// Inversion-score threshold below which a manifold counts as symmetric.
pub const DEFAULT_SYMMETRY_THRESHOLD: f64 = 0.10;
/// Cap on query points when scoring symmetry.
pub const SYMMETRY_SUBSAMPLE: usize = 2000;

/// Outcome of the inversion-symmetry test on one manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub score: f64,
    pub threshold: f64,
    pub is_symmetric: bool,
    /// Coordinate-wise mean the manifold was mirrored through.
    pub center: Vec<f64>,
}

/// Mean normalized distance from mirrored points back to the manifold.
///
/// Each sampled point is reflected through the manifold centroid; the
/// distance to its nearest manifold point, normalized by the RMS spread,
/// is averaged. Near zero means the point cloud maps onto itself under
/// inversion.
pub fn inversion_symmetry_score<R: Real>(
    man: &ShadowManifold<R>,
    subsample: usize,
    seed: u64,
) -> Result<f64> {
    let report = symmetry_report(man, DEFAULT_SYMMETRY_THRESHOLD, subsample, seed)?;
    Ok(report.score)
}

/// Full symmetry report: score, threshold, decision, and mirror center.
pub fn symmetry_report<R: Real>(
    man: &ShadowManifold<R>,
    threshold: f64,
    subsample: usize,
    seed: u64,
) -> Result<SymmetryReport> {
    let n = man.len();
    let m = man.dim();
    if n == 0 {
        return Err(Error::Argument("cannot score an empty manifold".into()));
    }
    let pts: Vec<f64> = man.points.iter().map(|v| v.widen()).collect();
    let mut center = vec![0.0f64; m];
    for row in pts.chunks_exact(m) {
        for (c, &v) in center.iter_mut().zip(row) {
            *c += v;
        }
    }
    for c in &mut center {
        *c /= n as f64;
    }
    let rms = (pts
        .chunks_exact(m)
        .map(|row| {
            row.iter()
                .zip(&center)
                .map(|(&v, &c)| (v - c) * (v - c))
                .sum::<f64>()
        })
        .sum::<f64>()
        / n as f64)
        .sqrt();
    if !(rms > 0.0) {
        return Err(Error::Degenerate(
            "manifold has zero spread; symmetry is undefined".into(),
        ));
    }

    let mut rng = SplitMix64::new(SplitMix64::sub_seed(seed, "symmetry-subsample"));
    let queries = rng.sample_indices(n, subsample.max(1));
    let total: f64 = queries
        .par_iter()
        .map(|&qi| {
            let row = &pts[qi * m..(qi + 1) * m];
            let mirrored: Vec<f64> = row
                .iter()
                .zip(&center)
                .map(|(&v, &c)| 2.0 * c - v)
                .collect();
            let mut best = f64::INFINITY;
            for other in pts.chunks_exact(m) {
                let d2: f64 = other
                    .iter()
                    .zip(&mirrored)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                if d2 < best {
                    best = d2;
                }
            }
            best.sqrt()
        })
        .sum();
    let score = total / (queries.len() as f64 * rms);
    Ok(SymmetryReport { score, threshold, is_symmetric: score < threshold, center })
}

// ---------------------------------------------------------------------------
// Two-means segmentation
// ---------------------------------------------------------------------------

/// Cluster assignment of every manifold row into segment 1 or 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentLabels {
    /// One label per manifold row, each 1 or 2.
    pub labels: Vec<u8>,
    pub centroids: [Vec<f64>; 2],
}

/// Two-means clustering with a deterministic antipodal initialization:
/// the first centroid is the point farthest from the mean, the second its
/// mirror through the mean. On inversion-symmetric manifolds this starts
/// one centroid on each sheet.
///
/// `_seed` is reserved for alternative initializations; the current one
/// draws nothing.
pub fn kmeans2<R: Real>(
    man: &ShadowManifold<R>,
    _seed: u64,
    max_iter: usize,
) -> Result<SegmentLabels> {
    let n = man.len();
    let m = man.dim();
    if n < 2 {
        return Err(Error::Argument("clustering needs at least two points".into()));
    }
    let pts: Vec<f64> = man.points.iter().map(|v| v.widen()).collect();
    let mut mean = vec![0.0f64; m];
    for row in pts.chunks_exact(m) {
        for (c, &v) in mean.iter_mut().zip(row) {
            *c += v;
        }
    }
    for c in &mut mean {
        *c /= n as f64;
    }
    let mut far_idx = 0;
    let mut far_d2 = -1.0;
    for (i, row) in pts.chunks_exact(m).enumerate() {
        let d2: f64 = row.iter().zip(&mean).map(|(&v, &c)| (v - c) * (v - c)).sum();
        if d2 > far_d2 {
            far_d2 = d2;
            far_idx = i;
        }
    }
    if !(far_d2 > 0.0) {
        return Err(Error::Degenerate("all manifold points coincide".into()));
    }
    let mut c1: Vec<f64> = pts[far_idx * m..(far_idx + 1) * m].to_vec();
    let mut c2: Vec<f64> = c1.iter().zip(&mean).map(|(&v, &c)| 2.0 * c - v).collect();

    let dist2 = |row: &[f64], c: &[f64]| -> f64 {
        row.iter().zip(c).map(|(&a, &b)| (a - b) * (a - b)).sum()
    };
    let mut labels = vec![0u8; n];
    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (i, row) in pts.chunks_exact(m).enumerate() {
            let l = if dist2(row, &c1) <= dist2(row, &c2) { 1 } else { 2 };
            if labels[i] != l {
                labels[i] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sum1 = vec![0.0f64; m];
        let mut sum2 = vec![0.0f64; m];
        let (mut n1, mut n2) = (0usize, 0usize);
        for (i, row) in pts.chunks_exact(m).enumerate() {
            let (sum, cnt) = if labels[i] == 1 { (&mut sum1, &mut n1) } else { (&mut sum2, &mut n2) };
            for (s, &v) in sum.iter_mut().zip(row) {
                *s += v;
            }
            *cnt += 1;
        }
        // an emptied cluster keeps its previous centroid
        if n1 > 0 {
            c1 = sum1.into_iter().map(|s| s / n1 as f64).collect();
        }
        if n2 > 0 {
            c2 = sum2.into_iter().map(|s| s / n2 as f64).collect();
        }
    }
    Ok(SegmentLabels { labels, centroids: [c1, c2] })
}

/// Row indices of each segment, with a minimum-size guard.
pub fn segment_rows(labels: &SegmentLabels, min_rows: usize) -> Result<[Vec<usize>; 2]> {
    let mut rows1 = Vec::new();
    let mut rows2 = Vec::new();
    for (i, &l) in labels.labels.iter().enumerate() {
        if l == 1 {
            rows1.push(i);
        } else {
            rows2.push(i);
        }
    }
    for rows in [&rows1, &rows2] {
        if rows.len() < min_rows {
            return Err(Error::SegmentTooSmall { size: rows.len(), minimum: min_rows });
        }
    }
    Ok([rows1, rows2])
}

/// A manifold restricted to a subset of its rows (points and time indices
/// both carried over, so cross-map time transport is preserved).
pub fn restrict_rows<R: Real>(man: &ShadowManifold<R>, rows: &[usize]) -> ShadowManifold<R> {
    let m = man.dim();
    let mut points = Vec::with_capacity(rows.len() * m);
    let mut time_index = Vec::with_capacity(rows.len());
    for &r in rows {
        points.extend_from_slice(man.point(r));
        time_index.push(man.time_index[r]);
    }
    ShadowManifold { points, time_index, params: man.params, source_id: man.source_id.clone() }
}

// ---------------------------------------------------------------------------
// Segment-CCM pipeline
// ---------------------------------------------------------------------------

/// Which pipeline a causal report came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalMethod {
    /// Per-segment sweeps on the split symmetric manifold.
    #[serde(rename = "sccm")]
    SegmentCcm,
    /// Whole-manifold sweep (no segmentation applied).
    #[serde(rename = "ccm")]
    PlainCcm,
}

/// Configuration for `segment_ccm`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SccmConfig {
    pub symmetry_threshold: f64,
    /// Query cap for the symmetry score.
    pub symmetry_subsample: usize,
    pub kmeans_max_iter: usize,
    /// Sweep protocol shared with plain CCM; labels name series a and b.
    pub ccm: CcmConfig,
}

impl Default for SccmConfig {
    fn default() -> Self {
        SccmConfig {
            symmetry_threshold: DEFAULT_SYMMETRY_THRESHOLD,
            symmetry_subsample: SYMMETRY_SUBSAMPLE,
            kmeans_max_iter: 100,
            ccm: CcmConfig::default(),
        }
    }
}

/// Final skills of one segment's bidirectional sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSkill {
    pub segment: u8,
    pub rows: usize,
    pub rho_xy: f64,
    pub rho_yx: f64,
}

/// Everything the symmetry-aware pipeline reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CausalReport {
    pub method: CausalMethod,
    /// Why that method was selected.
    pub reason: String,
    pub symmetry_a: SymmetryReport,
    pub symmetry_b: SymmetryReport,
    /// Per-segment final skills; empty when no segmentation was applied.
    pub segments: Vec<SegmentSkill>,
    /// Combined skill curves (pointwise segment means under segmentation).
    pub curve_xy: CrossMapCurve,
    pub curve_yx: CrossMapCurve,
    pub report_xy: ConvergenceReport,
    pub report_yx: ConvergenceReport,
    pub verdict: CausalVerdict,
    pub warnings: Vec<String>,
    /// Echo of the configuration the report was produced with.
    pub config: SccmConfig,
}

impl CausalReport {
    /// Verdict arrow with the configured series labels.
    pub fn rendered_verdict(&self) -> String {
        self.verdict
            .verdict
            .render(&self.config.ccm.label_x, &self.config.ccm.label_y)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn truncate_series<R: Real>(s: &TimeSeries<R>, n: usize) -> TimeSeries<R> {
    TimeSeries { values: s.values[..n].to_vec(), dt: s.dt }
}

/// Symmetry-aware causality detection between two series.
///
/// Both manifolds are scored for inversion symmetry. When exactly one is
/// symmetric it is split into its two sheets with two-means, both
/// manifolds are restricted to each sheet's rows, and the sweep runs per
/// segment; the reported curves are the segment means. Otherwise the
/// whole-manifold sweep runs unchanged. Non-recurrent inputs produce a
/// warning, not an error.
pub fn segment_ccm<R: Real>(
    series_a: &TimeSeries<R>,
    series_b: &TimeSeries<R>,
    params_a: EmbeddingParams,
    params_b: EmbeddingParams,
    config: &SccmConfig,
) -> Result<CausalReport> {
    let n = series_a.len().min(series_b.len());
    let sa = truncate_series(series_a, n);
    let sb = truncate_series(series_b, n);
    let label_a = config.ccm.label_x.clone();
    let label_b = config.ccm.label_y.clone();
    let man_a = delay_embed(&sa, params_a, &label_a)?;
    let man_b = delay_embed(&sb, params_b, &label_b)?;

    let mut warnings = Vec::new();
    for (label, man) in [(&label_a, &man_a), (&label_b, &man_b)] {
        let rec = recurrence_check(
            &man.points,
            man.dim(),
            &RecurrenceParams { seed: config.ccm.seed, ..Default::default() },
        )?;
        if !rec.recurrent {
            warnings.push(format!(
                "series '{label}' does not look recurrent (return fraction {:.2}); \
                 cross-map convergence assumes motion on an attractor",
                rec.return_fraction
            ));
        }
    }

    let seed = SplitMix64::sub_seed(config.ccm.seed, "symmetry-score");
    let sym_a = symmetry_report(&man_a, config.symmetry_threshold, config.symmetry_subsample, seed)?;
    let sym_b = symmetry_report(&man_b, config.symmetry_threshold, config.symmetry_subsample, seed)?;

    let m_max = params_a.m.max(params_b.m);
    let (method, reason, segmented) = match (sym_a.is_symmetric, sym_b.is_symmetric) {
        (true, false) => (
            CausalMethod::SegmentCcm,
            format!("manifold of '{label_a}' is inversion symmetric (score {:.4} < {:.2}), '{label_b}' is not", sym_a.score, config.symmetry_threshold),
            Some(true),
        ),
        (false, true) => (
            CausalMethod::SegmentCcm,
            format!("manifold of '{label_b}' is inversion symmetric (score {:.4} < {:.2}), '{label_a}' is not", sym_b.score, config.symmetry_threshold),
            Some(false),
        ),
        (true, true) => (
            CausalMethod::PlainCcm,
            "both manifolds are inversion symmetric; segmentation would not disambiguate".into(),
            None,
        ),
        (false, false) => (
            CausalMethod::PlainCcm,
            "neither manifold is inversion symmetric; no segmentation needed".into(),
            None,
        ),
    };

    if segmented.is_none() {
        let result = sweep_manifolds(&man_a, &sa, &man_b, &sb, m_max, &config.ccm)?;
        return Ok(CausalReport {
            method,
            reason,
            symmetry_a: sym_a,
            symmetry_b: sym_b,
            segments: Vec::new(),
            curve_xy: result.curve_xy,
            curve_yx: result.curve_yx,
            report_xy: result.report_xy,
            report_yx: result.report_yx,
            verdict: result.verdict,
            warnings,
            config: config.clone(),
        });
    }

    // Segmented path: cluster the symmetric manifold, transfer its row
    // partition to both manifolds (equal row counts first).
    let n_rows = man_a.len().min(man_b.len());
    let all_rows: Vec<usize> = (0..n_rows).collect();
    let man_a = restrict_rows(&man_a, &all_rows);
    let man_b = restrict_rows(&man_b, &all_rows);
    let symmetric_man = if segmented == Some(true) { &man_a } else { &man_b };
    let labels = kmeans2(symmetric_man, config.ccm.seed, config.kmeans_max_iter)?;
    let parts = segment_rows(&labels, 5 * (m_max + 1))?;

    let mut seg_skills = Vec::new();
    let mut curves_xy: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    let mut curves_yx: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for (si, rows) in parts.iter().enumerate() {
        let seg_a = restrict_rows(&man_a, rows);
        let seg_b = restrict_rows(&man_b, rows);
        let schedule = match &config.ccm.schedule {
            Some(s) => s.clone(),
            None => default_schedule(rows.len(), m_max),
        };
        let eval = eval_rows(rows.len(), config.ccm.eval_cap);
        let rho_xy = sweep_direction(&seg_b, &sa, &schedule, &eval, config.ccm.library, config.ccm.seed)?;
        let rho_yx = sweep_direction(&seg_a, &sb, &schedule, &eval, config.ccm.library, config.ccm.seed)?;
        seg_skills.push(SegmentSkill {
            segment: (si + 1) as u8,
            rows: rows.len(),
            rho_xy: *rho_xy.last().unwrap(),
            rho_yx: *rho_yx.last().unwrap(),
        });
        curves_xy.push((schedule.clone(), rho_xy));
        curves_yx.push((schedule, rho_yx));
    }

    let combine = |curves: &[(Vec<usize>, Vec<f64>)]| -> (Vec<usize>, Vec<f64>) {
        // Align curve tails so the combined final is exactly the arithmetic
        // mean of the per-segment finals, whatever the schedule lengths.
        let len = curves.iter().map(|(s, _)| s.len()).min().unwrap();
        let k = curves.len() as f64;
        let sizes = (0..len)
            .map(|i| {
                let s: usize = curves.iter().map(|(sz, _)| sz[sz.len() - len + i]).sum();
                (s as f64 / k).round() as usize
            })
            .collect();
        let rho = (0..len)
            .map(|i| {
                curves.iter().map(|(sz, r)| r[sz.len() - len + i]).sum::<f64>() / k
            })
            .collect();
        (sizes, rho)
    };
    let (sizes_xy, rho_xy) = combine(&curves_xy);
    let (sizes_yx, rho_yx) = combine(&curves_yx);
    let report_xy = convergence_check(&rho_xy, &sizes_xy, config.ccm.floor, config.ccm.plateau_tol)?;
    let report_yx = convergence_check(&rho_yx, &sizes_yx, config.ccm.floor, config.ccm.plateau_tol)?;
    let verdict = assemble_verdict(&report_xy, &report_yx, &config.ccm);

    let curve_xy = CrossMapCurve {
        library_sizes: sizes_xy,
        rho: rho_xy,
        source_manifold: man_b.source_id.clone(),
        target_series: label_a.clone(),
        // per-segment evaluation sets are not merged
        eval_indices: Vec::new(),
    };
    let curve_yx = CrossMapCurve {
        library_sizes: sizes_yx,
        rho: rho_yx,
        source_manifold: man_a.source_id.clone(),
        target_series: label_b.clone(),
        eval_indices: Vec::new(),
    };

    Ok(CausalReport {
        method,
        reason,
        symmetry_a: sym_a,
        symmetry_b: sym_b,
        segments: seg_skills,
        curve_xy,
        curve_yx,
        report_xy,
        report_yx,
        verdict,
        warnings,
        config: config.clone(),
    })
}

// ---------------------------------------------------------------------------
// Measurement parity
// ---------------------------------------------------------------------------

/// Parity of a measurement under a system's half-turn symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

/// Classify a measurement's parity by evaluating `(h, L_f h, L_f² h)` at
/// random states and their symmetry images.
///
/// The three components are built exactly as polynomials, so for a
/// definite-parity measurement the image values match `±` the originals
/// bitwise. Requires a half-turn symmetric system with a polynomial
/// vector field.
pub fn measurement_parity<R: Real>(
    spec: &SystemSpec<R>,
    measurement: &Measurement,
    n_states: usize,
    seed: u64,
) -> Result<Parity> {
    let SymmetryTag::RotationC2 { rep } = &spec.symmetry else {
        return Err(Error::Argument(format!(
            "parity needs a half-turn symmetric system; '{}' is not one",
            spec.name
        )));
    };
    let Some(field) = &spec.poly_field else {
        return Err(Error::Argument(format!(
            "parity needs a polynomial vector field; '{}' has none",
            spec.name
        )));
    };
    let dim = spec.dim;
    let h = match measurement {
        Measurement::Coord(j) => {
            if *j >= dim {
                return Err(Error::Argument(format!(
                    "coordinate {j} out of range for dimension {dim}"
                )));
            }
            Poly::var(dim, *j)
        }
        Measurement::Linear(coeffs) => {
            if coeffs.len() != dim {
                return Err(Error::Argument(format!(
                    "linear measurement has {} coefficients, system dimension is {dim}",
                    coeffs.len()
                )));
            }
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .fold(Poly::zero(dim), |acc, (j, &c)| {
                    acc.add(&Poly::var(dim, j).scale(c))
                })
        }
    };
    let lf_h = h.lie_derivative(field);
    let lf2_h = lf_h.lie_derivative(field);
    let components = [h, lf_h, lf2_h];

    let mut rng = SplitMix64::new(SplitMix64::sub_seed(seed, "parity-states"));
    let mut all_even = true;
    let mut all_odd = true;
    for _ in 0..n_states.max(1) {
        let x: Vec<f64> = (0..dim).map(|_| rng.next_gaussian() * 2.0).collect();
        let rx: Vec<f64> = x
            .iter()
            .zip(rep)
            .map(|(&v, &s)| if s < 0 { -v } else { v })
            .collect();
        for comp in &components {
            let at_x = comp.eval(&x);
            let at_rx = comp.eval(&rx);
            if at_rx != at_x {
                all_even = false;
            }
            if at_rx != -at_x {
                all_odd = false;
            }
        }
        if !all_even && !all_odd {
            return Ok(Parity::Neither);
        }
    }
    Ok(match (all_even, all_odd) {
        (true, false) => Parity::Even,
        (false, true) => Parity::Odd,
        // identically zero measurements satisfy both; call them neither
        _ => Parity::Neither,
    })
}

/// True when the measurement carries a definite parity (even or odd) through
/// the differential embedding `(h, ḣ, ḧ)`, so the reconstructed attractor
/// inherits the system's half-turn symmetry.
pub fn parity_check_differential<R: Real>(
    spec: &SystemSpec<R>,
    measurement: &Measurement,
    n_states: usize,
    seed: u64,
) -> Result<bool> {
    Ok(measurement_parity(spec, measurement, n_states, seed)? != Parity::Neither)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{catalogue_system, observe, simulate_reference};

    fn lorenz_manifolds() -> (ShadowManifold<f64>, ShadowManifold<f64>) {
        let spec = catalogue_system::<f64>("lorenz63").unwrap();
        let traj = simulate_reference(&spec).unwrap();
        let x = observe(&traj, &Measurement::Coord(0)).unwrap();
        let z = observe(&traj, &Measurement::Coord(2)).unwrap();
        let params = EmbeddingParams { tau: 9, m: 3 };
        (
            delay_embed(&x, params, "x").unwrap(),
            delay_embed(&z, params, "z").unwrap(),
        )
    }

    #[test]
    fn lorenz_sign_flipping_coordinate_scores_symmetric() {
        let (man_x, man_z) = lorenz_manifolds();
        let rep_x = symmetry_report(&man_x, DEFAULT_SYMMETRY_THRESHOLD, 2000, 1).unwrap();
        let rep_z = symmetry_report(&man_z, DEFAULT_SYMMETRY_THRESHOLD, 2000, 1).unwrap();
        assert!(rep_x.is_symmetric, "x-manifold score {}", rep_x.score);
        assert!(!rep_z.is_symmetric, "z-manifold score {}", rep_z.score);
        // the invariant coordinate misses the threshold with clear margin
        assert!(rep_z.score > 2.0 * DEFAULT_SYMMETRY_THRESHOLD, "score {}", rep_z.score);
        assert!(rep_x.score < rep_z.score / 3.0);
    }

    #[test]
    fn kmeans_separates_antipodal_pairs() {
        let man = ShadowManifold::<f64> {
            points: vec![1.0, 1.0, 1.2, 0.8, -1.0, -1.0, -1.2, -0.8],
            time_index: vec![0, 1, 2, 3],
            params: EmbeddingParams { tau: 1, m: 2 },
            source_id: "pairs".into(),
        };
        let seg = kmeans2(&man, 0, 100).unwrap();
        assert_eq!(seg.labels, vec![1, 1, 2, 2]);
        assert!(seg.centroids[0][0] > 0.0 && seg.centroids[1][0] < 0.0);
    }

    #[test]
    fn kmeans_rejects_coincident_points() {
        let man = ShadowManifold::<f64> {
            points: vec![2.0, 3.0].repeat(5),
            time_index: (0..5).collect(),
            params: EmbeddingParams { tau: 1, m: 2 },
            source_id: "flat".into(),
        };
        assert!(matches!(kmeans2(&man, 0, 100), Err(Error::Degenerate(_))));
    }

    #[test]
    fn kmeans_tracks_attractor_wings() {
        let (man_x, _) = lorenz_manifolds();
        let spec = catalogue_system::<f64>("lorenz63").unwrap();
        let traj = simulate_reference(&spec).unwrap();
        let x = observe(&traj, &Measurement::Coord(0)).unwrap();
        let seg = kmeans2(&man_x, 0, 100).unwrap();
        let agree = seg
            .labels
            .iter()
            .zip(&man_x.time_index)
            .filter(|(&l, &t)| (l == 1) == (x.values[t] > 0.0))
            .count() as f64
            / seg.labels.len() as f64;
        let agree = agree.max(1.0 - agree);
        assert!(agree > 0.9, "wing agreement {agree}");
    }

    #[test]
    fn segment_rows_enforces_minimum() {
        let labels = SegmentLabels {
            labels: [vec![1u8; 30], vec![2u8; 3]].concat(),
            centroids: [vec![0.0], vec![1.0]],
        };
        assert!(matches!(
            segment_rows(&labels, 20),
            Err(Error::SegmentTooSmall { size: 3, minimum: 20 })
        ));
        let [r1, r2] = segment_rows(&labels, 3).unwrap();
        assert_eq!(r1.len(), 30);
        assert_eq!(r2, vec![30, 31, 32]);
    }

    #[test]
    fn restriction_preserves_time_transport() {
        let (man_x, _) = lorenz_manifolds();
        let rows = vec![5, 17, 400];
        let sub = restrict_rows(&man_x, &rows);
        assert_eq!(sub.len(), 3);
        for (i, &r) in rows.iter().enumerate() {
            assert_eq!(sub.point(i), man_x.point(r));
            assert_eq!(sub.time_index[i], man_x.time_index[r]);
        }
    }

    #[test]
    fn lorenz_parities_are_exact() {
        let spec = catalogue_system::<f64>("lorenz63").unwrap();
        let x = Measurement::Coord(0);
        let z = Measurement::Coord(2);
        assert_eq!(measurement_parity(&spec, &x, 100, 3).unwrap(), Parity::Odd);
        assert_eq!(measurement_parity(&spec, &z, 100, 3).unwrap(), Parity::Even);
        // a mixed-parity combination is neither
        let xz = Measurement::Linear(vec![1.0, 0.0, 1.0]);
        assert_eq!(measurement_parity(&spec, &xz, 100, 3).unwrap(), Parity::Neither);
    }

    #[test]
    fn parity_requires_symmetry_and_polynomials() {
        let rossler = catalogue_system::<f64>("rossler").unwrap();
        assert!(measurement_parity(&rossler, &Measurement::Coord(0), 10, 0).is_err());
        let invariant = catalogue_system::<f64>("invariant_burke_shaw").unwrap();
        assert!(measurement_parity(&invariant, &Measurement::Coord(2), 10, 0).is_err());
    }

    #[test]
    fn definite_parity_propagates_through_the_derivative_map() {
        let lorenz = catalogue_system::<f64>("lorenz63").unwrap();
        assert!(parity_check_differential(&lorenz, &Measurement::Coord(0), 100, 3).unwrap());
        let burke = catalogue_system::<f64>("burke_shaw").unwrap();
        assert!(parity_check_differential(&burke, &Measurement::Coord(2), 100, 3).unwrap());
        assert_eq!(measurement_parity(&burke, &Measurement::Coord(2), 100, 3).unwrap(), Parity::Even);
        // mixing parities destroys the inherited symmetry
        let mixed = Measurement::Linear(vec![1.0, 0.0, 1.0]);
        assert!(!parity_check_differential(&lorenz, &mixed, 100, 3).unwrap());
    }

    #[test]
    fn segmented_pipeline_restores_bidirectional_verdict() {
        let spec = catalogue_system::<f64>("lorenz63").unwrap();
        let traj = simulate_reference(&spec).unwrap();
        let x = observe(&traj, &Measurement::Coord(0)).unwrap();
        let z = observe(&traj, &Measurement::Coord(2)).unwrap();
        let x = TimeSeries { values: x.values[..6000].to_vec(), dt: x.dt };
        let z = TimeSeries { values: z.values[..6000].to_vec(), dt: z.dt };
        let params = EmbeddingParams { tau: 9, m: 3 };
        let config = SccmConfig {
            ccm: CcmConfig { label_x: "x".into(), label_y: "z".into(), ..Default::default() },
            ..Default::default()
        };
        let report = segment_ccm(&x, &z, params, params, &config).unwrap();
        assert_eq!(report.method, CausalMethod::SegmentCcm);
        assert_eq!(report.segments.len(), 2);
        assert!(report.verdict.rho_xy_final > 0.9, "{}", report.verdict.rho_xy_final);
        assert!(report.verdict.rho_yx_final > 0.9);
        assert_eq!(report.rendered_verdict(), "x⇔z");
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        // the combined skill is exactly the mean of the per-segment finals
        let mean_xy = report.segments.iter().map(|s| s.rho_xy).sum::<f64>()
            / report.segments.len() as f64;
        let mean_yx = report.segments.iter().map(|s| s.rho_yx).sum::<f64>()
            / report.segments.len() as f64;
        assert_eq!(report.verdict.rho_xy_final, mean_xy);
        assert_eq!(report.verdict.rho_yx_final, mean_yx);
        let json = report.to_json_pretty().unwrap();
        assert!(json.contains("\"method\": \"segment_ccm\""));
    }

    #[test]
    fn relabeling_swaps_partitions_and_keeps_the_mean() {
        let labels = SegmentLabels {
            labels: vec![1, 2, 2, 1, 1, 1, 2, 2, 1, 2, 1, 2],
            centroids: [vec![1.0, 0.0], vec![-1.0, 0.0]],
        };
        let swapped = SegmentLabels {
            labels: labels.labels.iter().map(|l| 3 - l).collect(),
            centroids: [labels.centroids[1].clone(), labels.centroids[0].clone()],
        };
        let parts = segment_rows(&labels, 1).unwrap();
        let parts_swapped = segment_rows(&swapped, 1).unwrap();
        assert_eq!(parts[0], parts_swapped[1]);
        assert_eq!(parts[1], parts_swapped[0]);
        // combining is a mean over segments, so the swap cannot move it
        let (a, b) = (0.912345, 0.987654);
        assert_eq!((a + b) / 2.0, (b + a) / 2.0);
    }

    #[test]
    fn asymmetric_pair_takes_plain_path() {
        let spec = catalogue_system::<f64>("rossler").unwrap();
        let traj = crate::dynsys::integrate_rk4(&spec, &spec.x0(), 0.01, 6000).unwrap();
        let x = observe(&traj, &Measurement::Coord(0)).unwrap();
        let y = observe(&traj, &Measurement::Coord(1)).unwrap();
        let params = EmbeddingParams { tau: 40, m: 3 };
        let report = segment_ccm(&x, &y, params, params, &SccmConfig::default()).unwrap();
        assert_eq!(report.method, CausalMethod::PlainCcm);
        assert!(report.segments.is_empty());
    }
}
