//! Cross-module invariants on randomized and reference inputs: weight
//! normalization, segmentation bookkeeping, skill collapse on shuffled
//! series, symmetry equivariance, and half-space confinement.

use proptest::prelude::*;
use sccm_core::crossmap::{ccm_sweep, default_schedule, neighbor_weights, CcmConfig, Verdict};
use sccm_core::dynsys::{
    catalogue_system, eval_vector_field, integrate_rk4, observe, simulate_reference, Measurement,
    SymmetryTag, TimeSeries, CATALOGUE_NAMES,
};
use sccm_core::embedding::{delay_embed, EmbeddingParams};
use sccm_core::rng::SplitMix64;
use sccm_core::symmetry::{kmeans2, restrict_rows, segment_rows};

fn lorenz_xz(n: usize) -> (TimeSeries<f64>, TimeSeries<f64>) {
    let spec = catalogue_system::<f64>("lorenz63").unwrap();
    let traj = simulate_reference(&spec).unwrap();
    let x = observe(&traj, &Measurement::Coord(0)).unwrap();
    let z = observe(&traj, &Measurement::Coord(2)).unwrap();
    (
        TimeSeries { values: x.values[..n].to_vec(), dt: x.dt },
        TimeSeries { values: z.values[..n].to_vec(), dt: z.dt },
    )
}

#[test]
fn weights_normalize_and_stay_positive_on_random_queries() {
    // 10^4 random query points against the reference manifold, using the
    // pipeline's own neighbor count (m + 1).
    let (x, _) = lorenz_xz(2000);
    let man = delay_embed(&x, EmbeddingParams { tau: 9, m: 3 }, "x").unwrap();
    let (mut lo, mut hi) = (vec![f64::INFINITY; 3], vec![f64::NEG_INFINITY; 3]);
    for i in 0..man.len() {
        for j in 0..3 {
            lo[j] = lo[j].min(man.point(i)[j]);
            hi[j] = hi[j].max(man.point(i)[j]);
        }
    }
    let mut rng = SplitMix64::new(SplitMix64::sub_seed(7, "weight-queries"));
    for case in 0..10_000 {
        let q: Vec<f64> =
            (0..3).map(|j| lo[j] + rng.next_f64() * (hi[j] - lo[j])).collect();
        let mut d: Vec<f64> = (0..man.len())
            .map(|i| {
                man.point(i)
                    .iter()
                    .zip(&q)
                    .map(|(&p, &v)| (p - v) * (p - v))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w = neighbor_weights(&d[..4]);
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12, "case {case}: sum {sum}");
        assert!(w.iter().all(|&v| v > 0.0), "case {case}: {w:?}");
        // ascending distances mean non-increasing weights
        assert!(w.windows(2).all(|p| p[0] >= p[1]), "case {case}: {w:?}");
    }
    // a query sitting exactly on a library point takes the equal-weight path
    let w = neighbor_weights(&[0.0, 1.0, 2.0, 3.0]);
    assert_eq!(w, vec![0.25; 4]);
}

#[test]
fn segmentation_partitions_rows_and_transports_time_indices() {
    let (x, _) = lorenz_xz(4000);
    let man = delay_embed(&x, EmbeddingParams { tau: 9, m: 3 }, "x").unwrap();
    let labels = kmeans2(&man, 1, 100).unwrap();
    assert_eq!(labels.labels.len(), man.len());
    assert!(labels.labels.iter().all(|&l| l == 1 || l == 2));

    let parts = segment_rows(&labels, 10).unwrap();
    assert_eq!(parts[0].len() + parts[1].len(), man.len());
    let mut seen = vec![false; man.len()];
    for part in &parts {
        assert!(part.windows(2).all(|w| w[0] < w[1]), "rows must stay ordered");
        for &r in part {
            assert!(!seen[r], "row {r} assigned twice");
            seen[r] = true;
        }
    }
    assert!(seen.iter().all(|&s| s), "every row must land in a segment");

    for part in &parts {
        let sub = restrict_rows(&man, part);
        assert_eq!(sub.len(), part.len());
        for (i, &r) in part.iter().enumerate() {
            assert_eq!(sub.time_index[i], man.time_index[r]);
            assert_eq!(sub.point(i), man.point(r));
        }
    }
}

#[test]
fn shuffled_series_has_no_cross_map_skill() {
    let (x, z) = lorenz_xz(4000);
    let mut shuffled = z.values.clone();
    let mut rng = SplitMix64::new(SplitMix64::sub_seed(7, "shuffle-destruction"));
    rng.shuffle(&mut shuffled);
    let z = TimeSeries { values: shuffled, dt: z.dt };

    let res = ccm_sweep(&x, &z, EmbeddingParams { tau: 9, m: 3 }, &CcmConfig::default()).unwrap();
    assert!(res.verdict.rho_xy_final < 0.2, "xy {}", res.verdict.rho_xy_final);
    assert!(res.verdict.rho_yx_final < 0.2, "yx {}", res.verdict.rho_yx_final);
    assert_eq!(res.verdict.verdict, Verdict::NoCausality);
}

#[test]
fn symmetry_action_commutes_with_every_tagged_field() {
    let mut rng = SplitMix64::new(SplitMix64::sub_seed(11, "equivariance-states"));
    for name in CATALOGUE_NAMES {
        let spec = catalogue_system::<f64>(name).unwrap();
        if matches!(spec.symmetry, SymmetryTag::None) {
            continue;
        }
        let diagonal = spec.symmetry.diag_rep().is_some();
        for _ in 0..100 {
            let state: Vec<f64> =
                (0..spec.dim).map(|_| (rng.next_f64() - 0.5) * 20.0).collect();
            let mapped = spec.symmetry.apply(&state);
            let f_mapped = eval_vector_field(&spec, &mapped).unwrap();
            let f_state = eval_vector_field(&spec, &state).unwrap();
            // the symmetries are linear, so they act on tangents directly
            let mapped_f = spec.symmetry.apply(&f_state);
            if diagonal {
                // sign flips reuse the same expression tree: bitwise equal
                assert_eq!(f_mapped, mapped_f, "system {name}, state {state:?}");
            } else {
                // the quarter turn swaps components, so summation order
                // differs and only ulp-level agreement is available
                let scale = f_mapped.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
                for (a, b) in f_mapped.iter().zip(&mapped_f) {
                    assert!(
                        (a - b).abs() <= 1e-12 * scale,
                        "system {name}, state {state:?}: {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn kissing_attractor_never_leaves_the_positive_half_space() {
    let spec = catalogue_system::<f64>("kissing").unwrap();
    let cfg = &spec.default_config;
    let traj = integrate_rk4(&spec, &spec.x0(), cfg.dt, cfg.n_steps()).unwrap();
    let mut min_x = f64::INFINITY;
    for state in traj.states() {
        min_x = min_x.min(state[0]);
    }
    assert!(min_x > 0.0, "x dipped to {min_x}");
}

proptest! {
    #[test]
    fn embedding_first_column_replays_the_series(
        seed in 0u64..1000,
        n in 30usize..200,
        tau in 1usize..4,
        m in 1usize..4,
    ) {
        prop_assume!(n > (m - 1) * tau + 5);
        let mut rng = SplitMix64::new(seed);
        let values: Vec<f64> = (0..n).map(|_| rng.next_f64() * 4.0 - 2.0).collect();
        let s = TimeSeries { values: values.clone(), dt: 1.0 };
        let man = delay_embed(&s, EmbeddingParams { tau, m }, "s").unwrap();
        prop_assert_eq!(man.len(), n - (m - 1) * tau);
        for i in 0..man.len() {
            prop_assert_eq!(man.point(i)[0], values[(m - 1) * tau + i]);
        }
    }

    #[test]
    fn embeddings_nest_across_dimensions(
        seed in 0u64..1000,
        tau in 1usize..4,
        m in 1usize..4,
    ) {
        let n = 80;
        let mut rng = SplitMix64::new(seed);
        let values: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let s = TimeSeries { values, dt: 1.0 };
        let small = delay_embed(&s, EmbeddingParams { tau, m }, "s").unwrap();
        let big = delay_embed(&s, EmbeddingParams { tau, m: m + 1 }, "s").unwrap();
        // rows sharing a time index agree on the first m coordinates
        let offset = small.len() - big.len();
        for i in 0..big.len() {
            prop_assert_eq!(big.time_index[i], small.time_index[i + offset]);
            prop_assert_eq!(&big.point(i)[..m], small.point(i + offset));
        }
    }

    #[test]
    fn library_schedule_is_ascending_and_ends_at_the_manifold(
        n in 60usize..30_000,
        m in 1usize..6,
    ) {
        let sizes = default_schedule(n, m);
        prop_assert!(!sizes.is_empty());
        prop_assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*sizes.last().unwrap(), n);
        let lo = (5 * (m + 1)).max(50);
        if lo < n {
            prop_assert_eq!(sizes[0], lo);
        }
    }
}
