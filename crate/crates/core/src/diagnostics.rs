//! Attractor diagnostics: pairwise distance structure, recurrence, and
//! differential observability of a measurement.
//!
//! These checks answer the questions that decide whether cross mapping is
//! even applicable: does the series revisit its past (recurrence), how do
//! the revisits distribute (distance matrix), and can the chosen measurement
//! distinguish states at all (observability rank).

use rayon::prelude::*;
use serde::Serialize;

use crate::dynsys::{eval_vector_field, Measurement, SystemSpec};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::real::Real;
use crate::rng::SplitMix64;

/// Largest number of states kept when building diagnostics on long records.
pub const DIAGNOSTIC_SUBSAMPLE: usize = 5000;

/// Largest number of point pairs enumerated exactly for the distance
/// quantile; beyond this the quantile is estimated from sampled pairs.
const PAIR_CAP: usize = 2_000_000;

/// Longest prefix used when estimating the dominant period.
const PERIOD_WINDOW_CAP: usize = 20_000;

/// Autocorrelation level a peak must clear to count as a completed
/// oscillation rather than noise ripple.
const PERIOD_LEVEL: f64 = 0.05;

/// Default relative tolerance separating "numerically zero" singular values.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Default relative step for finite-difference Lie derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

// ---------------------------------------------------------------------------
// distance matrix
// ---------------------------------------------------------------------------

/// Symmetric matrix of pairwise Euclidean distances between states.
///
/// Rows map back to the original record through `source_rows`, which is the
/// identity unless the input was subsampled.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    /// Original row index of each matrix row.
    pub source_rows: Vec<usize>,
}

impl DistanceMatrix {
    /// Number of states the matrix covers.
    pub fn n_states(&self) -> usize {
        self.n
    }

    /// Distance between states `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major entries, `n_states × n_states`.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Quantile of the off-diagonal distances (linear interpolation).
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Degenerate(
                "distance quantile needs at least two states".into(),
            ));
        }
        let mut d = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                d.push(self.get(i, j));
            }
        }
        d.sort_by(|a, b| a.total_cmp(b));
        Ok(quantile_sorted(&d, q))
    }
}

/// Build the pairwise distance matrix of a flat `n × dim` point set.
///
/// Records longer than `max_points` are subsampled deterministically from
/// `seed`; the kept rows stay in ascending original order. The full matrix
/// is stored, so `max_points` is capped at 10 000 states.
pub fn distance_matrix<R: Real>(
    points: &[R],
    dim: usize,
    max_points: usize,
    seed: u64,
) -> Result<DistanceMatrix> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::Argument(format!(
            "point buffer of length {} is not a whole number of dim-{dim} states",
            points.len()
        )));
    }
    let n_all = points.len() / dim;
    if n_all == 0 {
        return Err(Error::Argument("distance matrix needs at least one state".into()));
    }
    let cap = max_points.min(n_all);
    if cap * cap > 100_000_000 {
        return Err(Error::Argument(format!(
            "a {cap}x{cap} distance matrix would exceed the 1e8-entry budget; lower max_points"
        )));
    }
    let source_rows = if n_all > cap {
        let mut rng = SplitMix64::new(SplitMix64::sub_seed(seed, "distance-subsample"));
        rng.sample_indices(n_all, cap)
    } else {
        (0..n_all).collect()
    };
    let n = source_rows.len();
    let pts: Vec<f64> = source_rows
        .iter()
        .flat_map(|&r| points[r * dim..(r + 1) * dim].iter().map(|v| v.widen()))
        .collect();
    let entries: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pts = &pts;
            (0..n).map(move |j| {
                let mut d2 = 0.0;
                for k in 0..dim {
                    let d = pts[i * dim + k] - pts[j * dim + k];
                    d2 += d * d;
                }
                d2.sqrt()
            })
        })
        .collect();
    Ok(DistanceMatrix { n, entries, source_rows })
}

/// Quantile with linear interpolation on an ascending slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

// ---------------------------------------------------------------------------
// recurrence
// ---------------------------------------------------------------------------

/// Tuning knobs for the recurrence check.
#[derive(Debug, Clone)]
pub struct RecurrenceParams {
    /// Distance quantile defining the closeness threshold ε.
    pub epsilon_quantile: f64,
    /// Minimum index separation for a revisit to count; `None` derives it
    /// from the dominant period of the first coordinate.
    pub min_separation: Option<usize>,
    /// Seed for the subsampling streams.
    pub seed: u64,
}

impl Default for RecurrenceParams {
    fn default() -> Self {
        RecurrenceParams { epsilon_quantile: 0.10, min_separation: None, seed: 0 }
    }
}

/// Where the minimum separation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodSource {
    /// Caller supplied `min_separation` directly.
    Given,
    /// Twice the dominant period of the first coordinate.
    EstimatedPeriod(usize),
    /// The record never completes an oscillation; the period is taken as
    /// the record length, so no pair is distant enough to count.
    NoOscillation,
    /// Record too short or too flat to estimate; fallback `n / 20`.
    Unestimable,
}

/// Outcome of the recurrence check.
#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    /// True when more than half the states have a distant-in-time close
    /// neighbor.
    pub recurrent: bool,
    /// Fraction of states with such a neighbor.
    pub return_fraction: f64,
    /// Closeness threshold used (distance-quantile value).
    pub epsilon: f64,
    /// Minimum index separation used.
    pub min_separation: usize,
    /// How `min_separation` was derived.
    pub period_source: PeriodSource,
}

/// Decide whether a record revisits its own past.
///
/// `points` is a flat `n × dim` buffer (a raw series has `dim = 1`). A state
/// counts as recurrent when some other state at index distance at least
/// `min_separation` lies strictly within ε, the `epsilon_quantile` quantile
/// of pairwise distances; the record is recurrent when more than half the
/// states do. Needs at least 100 states. Long records are subsampled
/// (deterministic in `seed`), keeping original indices for the separation
/// test.
pub fn recurrence_check<R: Real>(
    points: &[R],
    dim: usize,
    params: &RecurrenceParams,
) -> Result<RecurrenceReport> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::Argument(format!(
            "point buffer of length {} is not a whole number of dim-{dim} states",
            points.len()
        )));
    }
    let n = points.len() / dim;
    if n < 100 {
        return Err(Error::Argument(format!(
            "recurrence check needs at least 100 states, got {n}"
        )));
    }
    if !(params.epsilon_quantile > 0.0 && params.epsilon_quantile < 1.0) {
        return Err(Error::Argument(format!(
            "epsilon_quantile must lie in (0, 1), got {}",
            params.epsilon_quantile
        )));
    }

    let idx: Vec<usize> = if n > DIAGNOSTIC_SUBSAMPLE {
        let mut rng = SplitMix64::new(SplitMix64::sub_seed(params.seed, "recurrence-subsample"));
        rng.sample_indices(n, DIAGNOSTIC_SUBSAMPLE)
    } else {
        (0..n).collect()
    };
    let ns = idx.len();
    let sub: Vec<f64> = idx
        .iter()
        .flat_map(|&r| points[r * dim..(r + 1) * dim].iter().map(|v| v.widen()))
        .collect();
    let dist2 = |a: usize, b: usize| -> f64 {
        let mut d2 = 0.0;
        for k in 0..dim {
            let d = sub[a * dim + k] - sub[b * dim + k];
            d2 += d * d;
        }
        d2
    };

    // ε from the quantile of off-diagonal distances, exact when the pair
    // count fits the budget, sampled otherwise.
    let n_pairs = ns * (ns - 1) / 2;
    let mut d: Vec<f64> = if n_pairs <= PAIR_CAP {
        (0..ns)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..ns).map(move |j| (i, j)))
            .map(|(i, j)| dist2(i, j).sqrt())
            .collect()
    } else {
        let mut rng = SplitMix64::new(SplitMix64::sub_seed(params.seed, "recurrence-pairs"));
        let mut d = Vec::with_capacity(PAIR_CAP);
        for _ in 0..PAIR_CAP {
            let i = rng.next_below(ns as u64) as usize;
            let j = rng.next_below(ns as u64) as usize;
            if i != j {
                d.push(dist2(i, j).sqrt());
            }
        }
        d
    };
    d.sort_unstable_by(|a, b| a.total_cmp(b));
    let epsilon = quantile_sorted(&d, params.epsilon_quantile);
    drop(d);

    let (min_separation, period_source) = match params.min_separation {
        Some(s) => (s, PeriodSource::Given),
        None => {
            let first: Vec<f64> = (0..n.min(PERIOD_WINDOW_CAP))
                .map(|r| points[r * dim].widen())
                .collect();
            match dominant_period(&first) {
                PeriodEstimate::Period(p) => (2 * p, PeriodSource::EstimatedPeriod(p)),
                PeriodEstimate::NoOscillation => (2 * n, PeriodSource::NoOscillation),
                PeriodEstimate::TooShort => ((n / 20).max(1), PeriodSource::Unestimable),
            }
        }
    };

    let eps2 = epsilon * epsilon;
    let count: usize = (0..ns)
        .into_par_iter()
        .filter(|&a| {
            (0..ns).any(|b| {
                idx[a].abs_diff(idx[b]) >= min_separation && dist2(a, b) < eps2
            })
        })
        .count();
    let return_fraction = count as f64 / ns as f64;
    Ok(RecurrenceReport {
        recurrent: return_fraction > 0.5,
        return_fraction,
        epsilon,
        min_separation,
        period_source,
    })
}

enum PeriodEstimate {
    Period(usize),
    NoOscillation,
    TooShort,
}

/// Dominant period of a scalar record, in samples.
///
/// Scans the centered autocorrelation for its first non-positive lag and
/// then the first strict local maximum above `PERIOD_LEVEL`. A record that
/// never dips to zero, or dips but never peaks again, has not completed an
/// oscillation.
fn dominant_period(x: &[f64]) -> PeriodEstimate {
    let w = x.len();
    if w < 8 {
        return PeriodEstimate::TooShort;
    }
    let mean = x.iter().sum::<f64>() / w as f64;
    let xc: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = xc.iter().map(|v| v * v).sum();
    if c0 <= 0.0 {
        return PeriodEstimate::TooShort;
    }
    let corr = |k: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..w - k {
            s += xc[i] * xc[i + k];
        }
        s / c0
    };
    let mut c = vec![1.0f64];
    let at = |cache: &mut Vec<f64>, k: usize| -> f64 {
        while cache.len() <= k {
            let next = cache.len();
            cache.push(corr(next));
        }
        cache[k]
    };
    let mut k0 = None;
    for k in 1..w {
        if at(&mut c, k) <= 0.0 {
            k0 = Some(k);
            break;
        }
    }
    let Some(k0) = k0 else {
        return PeriodEstimate::NoOscillation;
    };
    let mut k = k0.max(1) + 1;
    while k + 1 < w {
        let (prev, here, next) = (at(&mut c, k - 1), at(&mut c, k), at(&mut c, k + 1));
        if here > prev && here > next && here > PERIOD_LEVEL {
            return PeriodEstimate::Period(k);
        }
        k += 1;
    }
    PeriodEstimate::NoOscillation
}

// ---------------------------------------------------------------------------
// observability
// ---------------------------------------------------------------------------

/// How the observability matrix is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservabilityBackend {
    /// Exact when the system carries a polynomial field, differences
    /// otherwise.
    Auto,
    /// Nested central differences of the measurement along the flow.
    FiniteDifference,
    /// Symbolic Lie derivatives of the polynomial field.
    Exact,
}

/// Observability matrix of a measurement at one state, with its spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct ObservabilityReport {
    pub system: String,
    pub measurement: String,
    pub state: Vec<f64>,
    /// Row-major `dim × dim`: row `j` is the gradient of the j-th Lie
    /// derivative of the measurement.
    pub matrix: Vec<f64>,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Relative step used by the difference backend (0 for exact).
    pub fd_step: f64,
    pub backend: String,
}

/// Count singular values above `tol ×` the largest.
pub fn numerical_rank(report: &ObservabilityReport, tol: f64) -> usize {
    let max = report.singular_values.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    report.singular_values.iter().filter(|&&s| s > tol * max).count()
}

/// Build the observability matrix `[∇h; ∇L_f h; …]` of `measurement` at
/// `state`.
///
/// The exact backend differentiates the polynomial Lie derivatives and is
/// available when the system carries a polynomial field. The difference
/// backend nests central differences with per-coordinate step
/// `fd_step × max(1, |x_k|)`; its cost grows as `(2·dim)^order`, so it is
/// refused for dimension ≥ 7.
pub fn observability_matrix(
    spec: &SystemSpec<f64>,
    measurement: &Measurement,
    state: &[f64],
    fd_step: f64,
    backend: ObservabilityBackend,
) -> Result<ObservabilityReport> {
    let dim = spec.dim;
    if state.len() != dim {
        return Err(Error::Argument(format!(
            "state has {} components but '{}' has dimension {dim}",
            state.len(),
            spec.name
        )));
    }
    check_measurement(measurement, dim)?;
    let exact = match backend {
        ObservabilityBackend::Exact => {
            if spec.poly_field.is_none() {
                return Err(Error::Argument(format!(
                    "'{}' has no polynomial field; use the finite-difference backend",
                    spec.name
                )));
            }
            true
        }
        ObservabilityBackend::Auto => spec.poly_field.is_some(),
        ObservabilityBackend::FiniteDifference => false,
    };

    let matrix = if exact {
        exact_matrix(spec, measurement, state)?
    } else {
        if dim >= 7 {
            return Err(Error::Numerical(format!(
                "finite-difference observability needs about (2·{dim})^{} field \
                 evaluations for dimension {dim}; use the exact backend",
                dim - 1
            )));
        }
        if !(fd_step > 0.0) {
            return Err(Error::Argument(format!("fd_step must be positive, got {fd_step}")));
        }
        fd_matrix(spec, measurement, state, fd_step)?
    };

    let svd = nalgebra::DMatrix::from_row_slice(dim, dim, &matrix).svd(false, false);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));

    Ok(ObservabilityReport {
        system: spec.name.to_string(),
        measurement: measurement.label(&spec.axes),
        state: state.to_vec(),
        matrix,
        singular_values,
        fd_step: if exact { 0.0 } else { fd_step },
        backend: if exact { "exact".into() } else { "finite_difference".into() },
    })
}

fn check_measurement(measurement: &Measurement, dim: usize) -> Result<()> {
    match measurement {
        Measurement::Coord(i) if *i >= dim => Err(Error::Argument(format!(
            "measurement reads coordinate {i} but the system has dimension {dim}"
        ))),
        Measurement::Linear(c) if c.len() != dim => Err(Error::Argument(format!(
            "linear measurement has {} coefficients but the system has dimension {dim}",
            c.len()
        ))),
        _ => Ok(()),
    }
}

fn measurement_poly(measurement: &Measurement, dim: usize) -> Poly {
    match measurement {
        Measurement::Coord(i) => Poly::var(dim, *i),
        Measurement::Linear(coeffs) => coeffs
            .iter()
            .enumerate()
            .fold(Poly::zero(dim), |acc, (i, &c)| acc.add(&Poly::var(dim, i).scale(c))),
    }
}

fn exact_matrix(
    spec: &SystemSpec<f64>,
    measurement: &Measurement,
    state: &[f64],
) -> Result<Vec<f64>> {
    let field = spec.poly_field.as_ref().expect("caller checked poly_field");
    let dim = spec.dim;
    let mut matrix = vec![0.0; dim * dim];
    let mut lie = measurement_poly(measurement, dim);
    for j in 0..dim {
        for k in 0..dim {
            matrix[j * dim + k] = lie.diff(k).eval(state);
        }
        if j + 1 < dim {
            lie = lie.lie_derivative(field);
        }
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "exact observability matrix has non-finite entries at this state".into(),
        ));
    }
    Ok(matrix)
}

fn fd_matrix(
    spec: &SystemSpec<f64>,
    measurement: &Measurement,
    state: &[f64],
    fd_step: f64,
) -> Result<Vec<f64>> {
    let dim = spec.dim;
    let mut matrix = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            let v = central_diff(spec, measurement, j, state, k, fd_step)?;
            if !v.is_finite() {
                return Err(Error::Numerical(format!(
                    "finite-difference gradient of the order-{j} Lie derivative \
                     is not finite at this state"
                )));
            }
            matrix[j * dim + k] = v;
        }
    }
    Ok(matrix)
}

/// Value of the j-th Lie derivative of the measurement at `x`, by recursion:
/// `L^0 h = h`, `L^j h = f · ∇(L^{j-1} h)` with central-difference gradients.
fn lie_fd(
    spec: &SystemSpec<f64>,
    measurement: &Measurement,
    order: usize,
    x: &[f64],
    fd_step: f64,
) -> Result<f64> {
    if order == 0 {
        return Ok(measurement.apply(x));
    }
    let f = eval_vector_field(spec, x)?;
    let mut total = 0.0;
    for k in 0..spec.dim {
        total += f[k] * central_diff(spec, measurement, order - 1, x, k, fd_step)?;
    }
    if !total.is_finite() {
        return Err(Error::Numerical(format!(
            "finite-difference Lie derivative of order {order} is not finite; \
             the state may sit outside the field's usable range"
        )));
    }
    Ok(total)
}

/// Central difference of the j-th Lie derivative along coordinate `k`.
fn central_diff(
    spec: &SystemSpec<f64>,
    measurement: &Measurement,
    order: usize,
    x: &[f64],
    k: usize,
    fd_step: f64,
) -> Result<f64> {
    let h = fd_step * x[k].abs().max(1.0);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[k] += h;
    xm[k] -= h;
    let fp = lie_fd(spec, measurement, order, &xp, fd_step)?;
    let fm = lie_fd(spec, measurement, order, &xm, fd_step)?;
    Ok((fp - fm) / (2.0 * h))
}
