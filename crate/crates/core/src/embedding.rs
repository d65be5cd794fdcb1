//! Delay embedding and embedding-parameter selection.
//!
//! The lag comes from the first local minimum of time-lagged mutual
//! information; the dimension from the false-nearest-neighbor fraction
//! dropping below a threshold. Both report their full scan curves so
//! callers can export or plot them.

use crate::dynsys::TimeSeries;
use crate::error::{Error, Result};
use crate::real::Real;

/// Lag and dimension of a delay embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddingParams {
    /// Delay in samples.
    pub tau: usize,
    /// Number of delay coordinates.
    pub m: usize,
}

/// A delay-coordinate reconstruction of one scalar series.
///
/// Rows are newest-first: point `i` is
/// `(x[t], x[t−τ], …, x[t−(m−1)τ])` with `t = (m−1)τ + i`, so coordinate
/// `j` looks `j·τ` samples into the past.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowManifold<R: Real> {
    /// Row-major points, `len × m`.
    pub points: Vec<R>,
    /// Index into the source series of each row's newest coordinate.
    pub time_index: Vec<usize>,
    pub params: EmbeddingParams,
    /// Label of the series this manifold was built from.
    pub source_id: String,
}

impl<R: Real> ShadowManifold<R> {
    pub fn len(&self) -> usize {
        self.time_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_index.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.params.m
    }

    pub fn point(&self, i: usize) -> &[R] {
        let m = self.params.m;
        &self.points[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[R]> {
        self.points.chunks_exact(self.params.m)
    }

    /// Largest pairwise extent, estimated as the diagonal of the bounding
    /// box (an upper bound within √m of the true diameter, and cheap).
    pub fn bounding_diameter(&self) -> f64 {
        let m = self.params.m;
        if self.is_empty() {
            return 0.0;
        }
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for row in self.rows() {
            for (j, &v) in row.iter().enumerate() {
                let v = v.widen();
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        lo.iter()
            .zip(&hi)
            .map(|(&a, &b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// Build the delay embedding of a series.
pub fn delay_embed<R: Real>(
    series: &TimeSeries<R>,
    params: EmbeddingParams,
    source_id: &str,
) -> Result<ShadowManifold<R>> {
    let EmbeddingParams { tau, m } = params;
    if tau == 0 || m == 0 {
        return Err(Error::Argument(format!(
            "embedding needs tau >= 1 and m >= 1, got tau={tau}, m={m}"
        )));
    }
    let n = series.len();
    let span = (m - 1) * tau;
    if n <= span {
        return Err(Error::SeriesTooShort { needed: span + 1, got: n });
    }
    let count = n - span;
    let x = &series.values;
    let mut points = Vec::with_capacity(count * m);
    let mut time_index = Vec::with_capacity(count);
    for i in 0..count {
        let t = span + i;
        for j in 0..m {
            points.push(x[t - j * tau]);
        }
        time_index.push(t);
    }
    Ok(ShadowManifold { points, time_index, params, source_id: to_owned(source_id) })
}

fn to_owned(s: &str) -> String {
    s.to_string()
}

// ---------------------------------------------------------------------------
// Lag selection: time-lagged mutual information
// ---------------------------------------------------------------------------

/// Number of equal-width histogram bins used by the mutual-information
/// estimator.
pub const MI_BINS: usize = 16;

/// Default scan length for lag selection.
pub const DEFAULT_MAX_LAG: usize = 50;

/// Outcome of the lag scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LagSelection {
    /// First strict local minimum of the mutual-information curve.
    Minimum(usize),
    /// No interior local minimum inside the scanned range.
    NoMinimum,
}

/// Mutual-information curve over lags `0..=max_lag` plus the selection.
#[derive(Clone, Debug, PartialEq)]
pub struct LagScan {
    pub curve: Vec<f64>,
    pub selection: LagSelection,
}

/// Mutual information between a series and its lagged copy, in nats, from
/// a `bins × bins` equal-width joint histogram.
fn lagged_mi(binned: &[usize], lag: usize, bins: usize) -> f64 {
    let pairs = binned.len() - lag;
    let mut joint = vec![0usize; bins * bins];
    for i in 0..pairs {
        joint[binned[i] * bins + binned[i + lag]] += 1;
    }
    let mut px = vec![0usize; bins];
    let mut py = vec![0usize; bins];
    for a in 0..bins {
        for b in 0..bins {
            let cnt = joint[a * bins + b];
            px[a] += cnt;
            py[b] += cnt;
        }
    }
    let n = pairs as f64;
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            let cnt = joint[a * bins + b];
            if cnt == 0 {
                continue;
            }
            let pj = cnt as f64 / n;
            let pa = px[a] as f64 / n;
            let pb = py[b] as f64 / n;
            mi += pj * (pj / (pa * pb)).ln();
        }
    }
    mi
}

/// Scan lagged self-mutual-information and pick the first strict local
/// minimum as the embedding lag.
pub fn select_lag<R: Real>(series: &TimeSeries<R>, max_lag: usize) -> Result<LagScan> {
    if max_lag < 2 {
        return Err(Error::Argument(format!(
            "lag scan needs max_lag >= 2, got {max_lag}"
        )));
    }
    let n = series.len();
    if n < max_lag + 2 {
        return Err(Error::SeriesTooShort { needed: max_lag + 2, got: n });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &series.values {
        let v = v.widen();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return Err(Error::Degenerate(
            "series is constant; mutual information is undefined".into(),
        ));
    }
    let width = hi - lo;
    let binned: Vec<usize> = series
        .values
        .iter()
        .map(|&v| {
            let t = ((v.widen() - lo) / width * MI_BINS as f64).floor() as isize;
            t.clamp(0, MI_BINS as isize - 1) as usize
        })
        .collect();
    let curve: Vec<f64> = (0..=max_lag).map(|lag| lagged_mi(&binned, lag, MI_BINS)).collect();
    let selection = curve
        .windows(3)
        .position(|w| w[1] < w[0] && w[1] < w[2])
        .map(|i| LagSelection::Minimum(i + 1))
        .unwrap_or(LagSelection::NoMinimum);
    Ok(LagScan { curve, selection })
}

// ---------------------------------------------------------------------------
// Dimension selection: false nearest neighbors
// ---------------------------------------------------------------------------

/// False-nearest-neighbor criteria and scan limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FnnParams {
    /// Relative jump criterion: neighbor is false when the extension jump
    /// exceeds `rtol ×` its embedded distance.
    pub rtol: f64,
    /// Absolute criterion: false when the jump exceeds `atol ×` the series
    /// spread.
    pub atol: f64,
    /// A dimension is accepted when the false fraction drops below this.
    pub threshold: f64,
    pub max_dim: usize,
}

impl Default for FnnParams {
    fn default() -> Self {
        FnnParams { rtol: 15.0, atol: 2.0, threshold: 0.01, max_dim: 10 }
    }
}

/// Outcome of the dimension scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimSelection {
    /// Smallest dimension whose false-neighbor fraction is below threshold.
    FirstBelow(usize),
    /// The fraction never dropped below threshold in the scanned range.
    NoThreshold,
}

/// False-neighbor fractions per dimension plus the selection.
#[derive(Clone, Debug, PartialEq)]
pub struct DimScan {
    /// Dimensions actually scanned, starting at 1.
    pub dims: Vec<usize>,
    pub curve: Vec<f64>,
    pub selection: DimSelection,
}

/// Minimum number of embedded rows for a dimension to be scanned.
const FNN_MIN_ROWS: usize = 50;
/// Cap on the number of query rows per dimension.
const FNN_QUERY_CAP: usize = 2000;

/// Scan embedding dimensions with the false-nearest-neighbor test at a
/// fixed lag.
pub fn select_dimension<R: Real>(
    series: &TimeSeries<R>,
    tau: usize,
    params: FnnParams,
) -> Result<DimScan> {
    if tau == 0 {
        return Err(Error::Argument("dimension scan needs tau >= 1".into()));
    }
    if params.max_dim == 0 {
        return Err(Error::Argument("dimension scan needs max_dim >= 1".into()));
    }
    let x: Vec<f64> = series.values.iter().map(|v| v.widen()).collect();
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let spread = (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
    if spread == 0.0 {
        return Err(Error::Degenerate(
            "series is constant; every neighbor is degenerate".into(),
        ));
    }

    let mut dims = Vec::new();
    let mut curve = Vec::new();
    let mut selection = DimSelection::NoThreshold;
    for m in 1..=params.max_dim {
        // Rows whose forward extension x[t + tau] still exists.
        let Some(rows) = n.checked_sub(m * tau) else { break };
        if rows < FNN_MIN_ROWS {
            break;
        }
        let span = (m - 1) * tau;
        // coordinate j of row i = x[span + i − j·tau]
        let coord = |i: usize, j: usize| x[span + i - j * tau];
        let step = (rows / FNN_QUERY_CAP).max(1);
        let mut false_count = 0usize;
        let mut total = 0usize;
        let mut q = 0;
        while q < rows {
            // nearest neighbor of row q, excluding itself
            let mut best = usize::MAX;
            let mut best_d2 = f64::INFINITY;
            for i in 0..rows {
                if i == q {
                    continue;
                }
                let mut d2 = 0.0;
                for j in 0..m {
                    let d = coord(i, j) - coord(q, j);
                    d2 += d * d;
                }
                if d2 < best_d2 {
                    best_d2 = d2;
                    best = i;
                }
            }
            // A bitwise-coincident neighbor makes the relative criterion
            // undefined, so the pair is not counted at all.
            if best_d2 == 0.0 {
                q += step;
                continue;
            }
            let dd = best_d2.sqrt();
            let jump = (x[span + q + tau] - x[span + best + tau]).abs();
            let is_false = jump / dd > params.rtol || jump / spread > params.atol;
            false_count += is_false as usize;
            total += 1;
            q += step;
        }
        let frac = false_count as f64 / total.max(1) as f64;
        dims.push(m);
        curve.push(frac);
        if frac < params.threshold {
            selection = DimSelection::FirstBelow(m);
            break;
        }
    }
    if dims.is_empty() {
        return Err(Error::SeriesTooShort { needed: tau + FNN_MIN_ROWS, got: n });
    }
    Ok(DimScan { dims, curve, selection })
}
