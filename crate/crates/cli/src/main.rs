//! `sccm` — causality detection between chaotic time series from the shell.
//!
//! Run without a subcommand for the full symmetry-aware pipeline
//! (`sccm --system lorenz63 --pair x,z --out report.json`), or pick a single
//! stage: `simulate`, `embed`, `select-params`, `ccm`, `sccm`, `sweep`,
//! `diagnose {recurrence,symmetry,observability,distance}`, `bench`.
//!
//! Conventions shared by every subcommand: stdout carries a short human
//! summary, `--out` writes the machine-readable report (JSON, or CSV for the
//! table emitters), warnings go to stderr, and a fixed `--seed` makes output
//! files bit-reproducible. Relative output paths are resolved inside
//! `$SCCM_OUT_DIR` when that variable is set. Usage errors exit with 2,
//! pipeline failures with 1.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use sccm_core::bench::{reproduce_table, BenchTable};
use sccm_core::crossmap::{ccm_sweep, CcmConfig};
use sccm_core::diagnostics::{
    distance_matrix, numerical_rank, observability_matrix, recurrence_check,
    ObservabilityBackend, RecurrenceParams, DEFAULT_FD_STEP, DEFAULT_RANK_TOL,
};
use sccm_core::dynsys::{
    catalogue_system, integrate_rk4, observe, simulate_reference, Measurement, Trajectory,
};
use sccm_core::embedding::{
    delay_embed, select_dimension, select_lag, DimSelection, EmbeddingParams, FnnParams,
    LagSelection, DEFAULT_MAX_LAG,
};
use sccm_core::io::{
    read_series_csv, write_dim_scan_csv, write_distance_matrix_csv, write_lag_scan_csv,
    write_manifold_csv, write_skill_curves_csv, write_trajectory_csv,
};
use sccm_core::symmetry::{
    segment_ccm, symmetry_report, CausalMethod, SccmConfig, DEFAULT_SYMMETRY_THRESHOLD,
    SYMMETRY_SUBSAMPLE,
};
use sccm_core::{Error, Result, TimeSeries64};

/// Detect causal coupling between time series by convergent cross mapping,
/// with a segmentation correction for attractors whose half-turn symmetry
/// hides one direction.
#[derive(Parser)]
#[command(name = "sccm", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// With no subcommand the full symmetry-aware pipeline runs.
    #[command(flatten)]
    run: SccmArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a catalogue system and write its trajectory as CSV
    Simulate(SimulateArgs),
    /// Delay-embed one series into a shadow manifold (CSV)
    Embed(EmbedCmdArgs),
    /// Pick embedding lag (mutual-information minimum) and dimension (FNN)
    SelectParams(SelectParamsArgs),
    /// Cross-map both directions and print the convergence verdict
    Ccm(CcmArgs),
    /// Symmetry-aware cross mapping: segment two-to-one manifolds first
    Sccm(SccmArgs),
    /// Write skill-vs-library-size curves as plot-ready CSV
    Sweep(SweepArgs),
    /// Pre-flight checks: recurrence, symmetry, observability, distances
    Diagnose {
        #[command(subcommand)]
        check: DiagnoseCmd,
    },
    /// Recompute the reference score tables and compare published values
    Bench(BenchArgs),
}

/// One input series: a simulated catalogue variable or a CSV file.
#[derive(Args, Clone)]
struct SourceArgs {
    /// Simulate this catalogue system (unknown names list the catalogue)
    #[arg(long, value_name = "NAME", conflicts_with = "input", requires = "var")]
    system: Option<String>,

    /// Observed variable of --system: an axis (`x`) or a sum (`x+z`)
    #[arg(long, value_name = "VAR", requires = "system")]
    var: Option<String>,

    /// Read the series from a CSV file with a `value` column
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
}

/// Two input series: a simulated pair of variables or two CSV files.
#[derive(Args, Clone)]
struct PairSourceArgs {
    /// Simulate this catalogue system and observe two of its variables
    #[arg(long, value_name = "NAME", requires = "pair",
          conflicts_with_all = ["input", "input_b"])]
    system: Option<String>,

    /// Two comma-separated variables of --system, e.g. `x,z` or `y,x+z`
    #[arg(long, value_name = "A,B", value_delimiter = ',', requires = "system")]
    pair: Option<Vec<String>>,

    /// First series as a CSV file with a `value` column
    #[arg(long, value_name = "FILE", requires = "input_b")]
    input: Option<PathBuf>,

    /// Second series as a CSV file with a `value` column
    #[arg(long, value_name = "FILE", requires = "input")]
    input_b: Option<PathBuf>,
}

/// Embedding overrides shared by every manifold-building subcommand.
#[derive(Args, Clone, Copy)]
struct EmbedArgs {
    /// Embedding lag in samples (default: catalogue value, else MI minimum)
    #[arg(long)]
    tau: Option<usize>,

    /// Embedding dimension (default: catalogue value, else FNN selection)
    #[arg(long, short = 'm')]
    m: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Catalogue system to integrate
    #[arg(long, value_name = "NAME")]
    system: String,

    /// Number of integration steps (default: the system's reference span)
    #[arg(long)]
    steps: Option<usize>,

    /// Step size (default: catalogue value)
    #[arg(long)]
    dt: Option<f64>,

    /// Initial state, comma separated (default: catalogue value)
    #[arg(long, value_name = "A,B,...", value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,

    /// Output CSV path [default: trajectory.csv]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedCmdArgs {
    #[command(flatten)]
    source: SourceArgs,

    #[command(flatten)]
    embed: EmbedArgs,

    /// Output CSV path [default: manifold.csv]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectParamsArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Largest lag scanned for the mutual-information minimum
    #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
    max_lag: usize,

    /// Largest embedding dimension scanned by the false-neighbor test
    #[arg(long, default_value_t = 10)]
    max_dim: usize,

    /// Write the mutual-information curve here (CSV)
    #[arg(long, value_name = "FILE")]
    mi_csv: Option<PathBuf>,

    /// Write the false-neighbor curve here (CSV)
    #[arg(long, value_name = "FILE")]
    fnn_csv: Option<PathBuf>,

    /// Write the selection as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CcmArgs {
    #[command(flatten)]
    source: PairSourceArgs,

    #[command(flatten)]
    embed: EmbedArgs,

    /// Library sizes to sweep, comma separated (default: geometric schedule)
    #[arg(long, value_name = "L1,L2,...", value_delimiter = ',')]
    schedule: Option<Vec<usize>>,

    /// Seed for every subsampling decision
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the full sweep (curves, convergence reports, verdict) as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Write the two skill curves as CSV
    #[arg(long, value_name = "FILE")]
    curves: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(next_help_heading = "Pipeline options")]
struct SccmArgs {
    #[command(flatten)]
    source: PairSourceArgs,

    #[command(flatten)]
    embed: EmbedArgs,

    /// Inversion-symmetry score below which a manifold is segmented
    #[arg(long, default_value_t = DEFAULT_SYMMETRY_THRESHOLD)]
    symmetry_threshold: f64,

    /// Seed for every subsampling decision
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the full causal report as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Write the combined skill curves as CSV
    #[arg(long, value_name = "FILE")]
    curves: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: PairSourceArgs,

    #[command(flatten)]
    embed: EmbedArgs,

    /// Library sizes to sweep, comma separated (default: geometric schedule)
    #[arg(long, value_name = "L1,L2,...", value_delimiter = ',')]
    schedule: Option<Vec<usize>>,

    /// Seed for every subsampling decision
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output CSV path [default: curves.csv]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DiagnoseCmd {
    /// Does the series revisit its past? Cross mapping assumes it does
    Recurrence(RecurrenceArgs),
    /// Inversion-symmetry score of the delay embedding
    Symmetry(SymmetryArgs),
    /// Numerical observability of a system through one measurement
    Observability(ObservabilityArgs),
    /// Pairwise state distances of the embedding, optionally thresholded
    Distance(DistanceArgs),
}

#[derive(Args)]
struct RecurrenceArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Distance quantile used as the recurrence threshold
    #[arg(long, default_value_t = 0.10)]
    epsilon_quantile: f64,

    /// Minimum return time in samples (default: derived from series length)
    #[arg(long)]
    min_separation: Option<usize>,

    /// Seed for the distance subsample
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the report as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SymmetryArgs {
    #[command(flatten)]
    source: SourceArgs,

    #[command(flatten)]
    embed: EmbedArgs,

    /// Score below this is reported as inversion symmetric
    #[arg(long, default_value_t = DEFAULT_SYMMETRY_THRESHOLD)]
    threshold: f64,

    /// Number of manifold points sampled for the score
    #[arg(long, default_value_t = SYMMETRY_SUBSAMPLE)]
    subsample: usize,

    /// Seed for the point subsample
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the report as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ObservabilityArgs {
    /// Catalogue system to analyze
    #[arg(long, value_name = "NAME")]
    system: String,

    /// Measurement: an axis (`x`) or a sum (`x+z`)
    #[arg(long, value_name = "VAR")]
    var: String,

    /// State to evaluate at, comma separated (default: the reference x0)
    #[arg(long, value_name = "A,B,...", value_delimiter = ',', allow_negative_numbers = true)]
    state: Option<Vec<f64>>,

    /// Derivative backend
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,

    /// Finite-difference step
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    fd_step: f64,

    /// Singular values below this fraction of the largest do not count
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,

    /// Write the report as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum BackendArg {
    Auto,
    Fd,
    Exact,
}

impl From<BackendArg> for ObservabilityBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Auto => ObservabilityBackend::Auto,
            BackendArg::Fd => ObservabilityBackend::FiniteDifference,
            BackendArg::Exact => ObservabilityBackend::Exact,
        }
    }
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    source: SourceArgs,

    #[command(flatten)]
    embed: EmbedArgs,

    /// Cap on the number of states entering the matrix
    #[arg(long, default_value_t = 2000)]
    max_points: usize,

    /// Emit 0/1 recurrence entries thresholded at this distance quantile
    #[arg(long, value_name = "Q")]
    epsilon_quantile: Option<f64>,

    /// Seed for the state subsample
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output CSV path [default: distance.csv]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Which reference table to recompute
    #[arg(long, value_enum, default_value_t = TableArg::All)]
    table: TableArg,

    /// Include extended-catalogue rows (reported, never gating)
    #[arg(long)]
    extended: bool,

    /// Seed for every subsampling decision
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Also write the recomputed rows to this file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// File format for --out
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(ValueEnum, Clone, Copy)]
enum TableArg {
    T2,
    T3,
    T4,
    T5,
    All,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    let command = match &cli.command {
        Some(c) => c,
        None => {
            if cli.run.source.system.is_none() && cli.run.source.input.is_none() {
                let _ = Cli::command().print_help();
                return Ok(ExitCode::from(2));
            }
            run_sccm(&cli.run)?;
            return Ok(ExitCode::SUCCESS);
        }
    };
    match command {
        Command::Simulate(a) => run_simulate(a)?,
        Command::Embed(a) => run_embed(a)?,
        Command::SelectParams(a) => run_select_params(a)?,
        Command::Ccm(a) => run_ccm(a)?,
        Command::Sccm(a) => run_sccm(a)?,
        Command::Sweep(a) => run_sweep(a)?,
        Command::Diagnose { check } => match check {
            DiagnoseCmd::Recurrence(a) => run_recurrence(a)?,
            DiagnoseCmd::Symmetry(a) => run_symmetry(a)?,
            DiagnoseCmd::Observability(a) => run_observability(a)?,
            DiagnoseCmd::Distance(a) => run_distance(a)?,
        },
        Command::Bench(a) => return run_bench(a),
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- commands

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let spec = catalogue_system::<f64>(&args.system)?;
    let cfg = &spec.default_config;
    let dt = args.dt.unwrap_or(cfg.dt);
    if !(dt > 0.0) {
        return Err(Error::Argument(format!("step size must be positive, got {dt}")));
    }
    let steps = args.steps.unwrap_or_else(|| cfg.n_steps());
    let x0 = args.x0.clone().unwrap_or_else(|| cfg.x0.clone());
    if x0.len() != spec.dim {
        return Err(Error::Argument(format!(
            "initial state has {} components, '{}' needs {}",
            x0.len(),
            spec.name,
            spec.dim
        )));
    }
    // Formula-defined members are sampled, not integrated, as long as the
    // caller does not move them off their native grid.
    let traj = match (&spec.closed_form, args.x0.is_none() && args.dt.is_none()) {
        (Some(sample), true) => {
            let mut data = Vec::with_capacity((steps + 1) * spec.dim);
            for i in 0..=steps {
                data.extend_from_slice(&sample(i));
            }
            Trajectory { dim: spec.dim, dt, t0: 0.0, data }
        }
        _ => integrate_rk4(&spec, &x0, dt, steps)?,
    };
    let out = resolve_out(args.out.clone(), "trajectory.csv")?;
    write_trajectory_csv(&out, &traj, &spec.axes)?;
    println!("wrote {} samples of '{}' to {}", traj.len(), spec.name, out.display());
    Ok(())
}

fn run_embed(args: &EmbedCmdArgs) -> Result<()> {
    let src = load_source(&args.source)?;
    let params = resolve_params(&src.series, src.catalogue, args.embed, &src.label)?;
    let man = delay_embed(&src.series, params, &src.label)?;
    let out = resolve_out(args.out.clone(), "manifold.csv")?;
    write_manifold_csv(&out, &man)?;
    println!(
        "embedded '{}' as {} states in R^{} (tau={}, m={}); wrote {}",
        src.label,
        man.len(),
        man.dim(),
        params.tau,
        params.m,
        out.display()
    );
    Ok(())
}

fn run_select_params(args: &SelectParamsArgs) -> Result<()> {
    let src = load_source(&args.source)?;
    let lag_scan = select_lag(&src.series, args.max_lag)?;
    let (tau, tau_source) = match lag_scan.selection {
        LagSelection::Minimum(l) => (l, "mi_minimum"),
        LagSelection::NoMinimum => match src.catalogue {
            Some((t, _)) => {
                eprintln!(
                    "warning: mutual information of '{}' has no local minimum within {} lags; \
                     falling back to the catalogue default tau={}",
                    src.label, args.max_lag, t
                );
                (t, "catalogue_default")
            }
            None => {
                eprintln!(
                    "warning: mutual information of '{}' has no local minimum within {} lags; \
                     falling back to tau=1",
                    src.label, args.max_lag
                );
                (1, "fallback")
            }
        },
    };
    let fnn = FnnParams { max_dim: args.max_dim, ..FnnParams::default() };
    let threshold = fnn.threshold;
    let dim_scan = select_dimension(&src.series, tau, fnn)?;
    let (m, m_source) = match dim_scan.selection {
        DimSelection::FirstBelow(d) => (d, "fnn_first_below"),
        DimSelection::NoThreshold => match src.catalogue {
            Some((_, m)) => {
                eprintln!(
                    "warning: false-neighbor fraction of '{}' never fell below {}; \
                     falling back to the catalogue default m={}",
                    src.label, threshold, m
                );
                (m, "catalogue_default")
            }
            None => {
                eprintln!(
                    "warning: false-neighbor fraction of '{}' never fell below {}; \
                     falling back to m={}",
                    src.label, threshold, args.max_dim
                );
                (args.max_dim, "fallback")
            }
        },
    };
    if let Some(p) = &args.mi_csv {
        let path = resolve_out(Some(p.clone()), "mi.csv")?;
        write_lag_scan_csv(&path, &lag_scan)?;
        println!("wrote {}", path.display());
    }
    if let Some(p) = &args.fnn_csv {
        let path = resolve_out(Some(p.clone()), "fnn.csv")?;
        write_dim_scan_csv(&path, &dim_scan)?;
        println!("wrote {}", path.display());
    }
    println!("tau={tau} ({tau_source}), m={m} ({m_source})");
    let value = serde_json::json!({
        "series": src.label,
        "tau": tau,
        "tau_source": tau_source,
        "m": m,
        "m_source": m_source,
        "max_lag": args.max_lag,
        "max_dim": args.max_dim,
    });
    emit_json(&value, &args.out)
}

fn run_ccm(args: &CcmArgs) -> Result<()> {
    let pair = load_pair(&args.source)?;
    let params = resolve_params(&pair.a, pair.catalogue, args.embed, &pair.label_a)?;
    let mut config = CcmConfig {
        seed: args.seed,
        label_x: pair.label_a.clone(),
        label_y: pair.label_b.clone(),
        ..CcmConfig::default()
    };
    config.schedule = args.schedule.clone();
    let result = ccm_sweep(&pair.a, &pair.b, params, &config)?;
    let v = &result.verdict;
    println!(
        "verdict: {}  (rho_xy={:.3}, rho_yx={:.3})",
        v.verdict.render(&config.label_x, &config.label_y),
        v.rho_xy_final,
        v.rho_yx_final
    );
    if let Some(p) = &args.curves {
        let path = resolve_out(Some(p.clone()), "curves.csv")?;
        write_skill_curves_csv(&path, &result.curve_xy, &result.curve_yx)?;
        println!("wrote {}", path.display());
    }
    if args.out.is_some() {
        emit_json(&serde_json::to_value(&result)?, &args.out)?;
    }
    Ok(())
}

fn run_sccm(args: &SccmArgs) -> Result<()> {
    let pair = load_pair(&args.source)?;
    let params_a = resolve_params(&pair.a, pair.catalogue, args.embed, &pair.label_a)?;
    let params_b = resolve_params(&pair.b, pair.catalogue, args.embed, &pair.label_b)?;
    let mut config = SccmConfig::default();
    config.symmetry_threshold = args.symmetry_threshold;
    config.ccm.seed = args.seed;
    config.ccm.label_x = pair.label_a.clone();
    config.ccm.label_y = pair.label_b.clone();
    let report = segment_ccm(&pair.a, &pair.b, params_a, params_b, &config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let method = match report.method {
        CausalMethod::SegmentCcm => "sccm",
        CausalMethod::PlainCcm => "ccm",
    };
    println!("method: {method} ({})", report.reason);
    for s in &report.segments {
        println!(
            "  segment {}: {} states, rho_xy={:.3}, rho_yx={:.3}",
            s.segment, s.rows, s.rho_xy, s.rho_yx
        );
    }
    println!(
        "verdict: {}  (rho_xy={:.3}, rho_yx={:.3})",
        report.rendered_verdict(),
        report.verdict.rho_xy_final,
        report.verdict.rho_yx_final
    );
    if let Some(p) = &args.curves {
        let path = resolve_out(Some(p.clone()), "curves.csv")?;
        write_skill_curves_csv(&path, &report.curve_xy, &report.curve_yx)?;
        println!("wrote {}", path.display());
    }
    if let Some(p) = &args.out {
        let path = resolve_out(Some(p.clone()), "report.json")?;
        std::fs::write(&path, report.to_json_pretty()? + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let pair = load_pair(&args.source)?;
    let params = resolve_params(&pair.a, pair.catalogue, args.embed, &pair.label_a)?;
    let mut config = CcmConfig {
        seed: args.seed,
        label_x: pair.label_a.clone(),
        label_y: pair.label_b.clone(),
        ..CcmConfig::default()
    };
    config.schedule = args.schedule.clone();
    let result = ccm_sweep(&pair.a, &pair.b, params, &config)?;
    let out = resolve_out(args.out.clone(), "curves.csv")?;
    write_skill_curves_csv(&out, &result.curve_xy, &result.curve_yx)?;
    println!(
        "swept {} library sizes; final rho_xy={:.3}, rho_yx={:.3}; wrote {}",
        result.curve_xy.library_sizes.len(),
        result.verdict.rho_xy_final,
        result.verdict.rho_yx_final,
        out.display()
    );
    Ok(())
}

fn run_recurrence(args: &RecurrenceArgs) -> Result<()> {
    let src = load_source(&args.source)?;
    let params = RecurrenceParams {
        epsilon_quantile: args.epsilon_quantile,
        min_separation: args.min_separation,
        seed: args.seed,
    };
    let report = recurrence_check(&src.series.values, 1, &params)?;
    println!(
        "recurrent={} (return fraction {:.3}, epsilon {:.3e}, min separation {})",
        report.recurrent, report.return_fraction, report.epsilon, report.min_separation
    );
    if !report.recurrent {
        eprintln!(
            "warning: series '{}' does not revisit its past states, so a CCM prerequisite \
             fails: cross-map skill cannot converge without recurrent (attractor) dynamics",
            src.label
        );
    }
    let mut value = serde_json::to_value(&report)?;
    value["series"] = serde_json::Value::String(src.label);
    emit_json_if_requested(&value, &args.out)
}

fn run_symmetry(args: &SymmetryArgs) -> Result<()> {
    let src = load_source(&args.source)?;
    let params = resolve_params(&src.series, src.catalogue, args.embed, &src.label)?;
    let man = delay_embed(&src.series, params, &src.label)?;
    let report = symmetry_report(&man, args.threshold, args.subsample, args.seed)?;
    println!(
        "symmetric={} (inversion score {:.3}, threshold {:.3})",
        report.is_symmetric, report.score, report.threshold
    );
    let mut value = serde_json::to_value(&report)?;
    value["series"] = serde_json::Value::String(src.label);
    value["tau"] = serde_json::Value::from(params.tau);
    value["m"] = serde_json::Value::from(params.m);
    emit_json_if_requested(&value, &args.out)
}

fn run_observability(args: &ObservabilityArgs) -> Result<()> {
    let spec = catalogue_system::<f64>(&args.system)?;
    let measurement = Measurement::parse(&args.var, &spec.axes)?;
    let state = args.state.clone().unwrap_or_else(|| spec.default_config.x0.clone());
    let report =
        observability_matrix(&spec, &measurement, &state, args.fd_step, args.backend.into())?;
    let rank = numerical_rank(&report, args.rank_tol);
    println!("rank {} of {} (backend {:?})", rank, spec.dim, report.backend);
    if rank < spec.dim {
        eprintln!(
            "warning: observability matrix is rank deficient ({} < {}); some state \
             directions are invisible through '{}'",
            rank, spec.dim, args.var
        );
    }
    let mut value = serde_json::to_value(&report)?;
    value["rank"] = serde_json::Value::from(rank);
    value["rank_tol"] = serde_json::Value::from(args.rank_tol);
    emit_json_if_requested(&value, &args.out)
}

fn run_distance(args: &DistanceArgs) -> Result<()> {
    let src = load_source(&args.source)?;
    let params = resolve_params(&src.series, src.catalogue, args.embed, &src.label)?;
    let man = delay_embed(&src.series, params, &src.label)?;
    let matrix = distance_matrix(&man.points, man.dim(), args.max_points, args.seed)?;
    let threshold = match args.epsilon_quantile {
        Some(q) => Some(matrix.quantile(q)?),
        None => None,
    };
    let out = resolve_out(args.out.clone(), "distance.csv")?;
    write_distance_matrix_csv(&out, &matrix, threshold)?;
    let n = matrix.n_states();
    match threshold {
        Some(eps) => println!(
            "wrote {n}x{n} recurrence matrix (epsilon {:.3e} at quantile {}) to {}",
            eps,
            args.epsilon_quantile.unwrap(),
            out.display()
        ),
        None => println!("wrote {n}x{n} distance matrix to {}", out.display()),
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<ExitCode> {
    let names: &[&str] = match args.table {
        TableArg::T2 => &["t2"],
        TableArg::T3 => &["t3"],
        TableArg::T4 => &["t4"],
        TableArg::T5 => &["t5"],
        TableArg::All => &["t2", "t3", "t4", "t5"],
    };
    let mut tables = Vec::with_capacity(names.len());
    for name in names {
        let table = reproduce_table(name, args.extended, args.seed)?;
        println!("{}", table.render());
        tables.push(table);
    }
    if let Some(p) = &args.out {
        let path = resolve_out(Some(p.clone()), "bench.json")?;
        match args.format {
            FormatArg::Json => {
                std::fs::write(&path, serde_json::to_string_pretty(&tables)? + "\n")?
            }
            FormatArg::Csv => std::fs::write(&path, bench_csv(&tables))?,
        }
        println!("wrote {}", path.display());
    }
    // Extended rows are informational; only catalogue-core rows gate.
    let gating_failures: Vec<String> = tables
        .iter()
        .flat_map(|t| &t.rows)
        .filter(|r| !r.extended && !r.verdict_match)
        .map(|r| format!("{}/{} ({},{})", r.table, r.system, r.a, r.b))
        .collect();
    if gating_failures.is_empty() {
        println!("all gating verdicts reproduced");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verdict mismatch on: {}", gating_failures.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn bench_csv(tables: &[BenchTable]) -> String {
    fn cell(c: &Option<&sccm_core::bench::BenchCell>) -> String {
        match c {
            Some(c) => format!("{:.6},{:.6},{:.3},{}", c.reference, c.measured, c.tolerance, c.within),
            None => ",,,".into(),
        }
    }
    let mut out = String::from(
        "table,system,a,b,sigma,extended,\
         ccm_ab_ref,ccm_ab_meas,ccm_ab_tol,ccm_ab_within,\
         ccm_ba_ref,ccm_ba_meas,ccm_ba_tol,ccm_ba_within,\
         sccm_ab_ref,sccm_ab_meas,sccm_ab_tol,sccm_ab_within,\
         sccm_ba_ref,sccm_ba_meas,sccm_ba_tol,sccm_ba_within,\
         verdict_match\n",
    );
    for row in tables.iter().flat_map(|t| &t.rows) {
        let sigma = row.sigma.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.table,
            row.system,
            row.a,
            row.b,
            sigma,
            row.extended,
            cell(&Some(&row.ccm_ab)),
            cell(&Some(&row.ccm_ba)),
            cell(&row.sccm_ab.as_ref()),
            cell(&row.sccm_ba.as_ref()),
            row.verdict_match
        ));
    }
    out
}

// ----------------------------------------------------------------- loading

struct LoadedSeries {
    series: TimeSeries64,
    label: String,
    /// Catalogue default (tau, m) when the series came from a named system.
    catalogue: Option<(usize, usize)>,
}

fn load_source(src: &SourceArgs) -> Result<LoadedSeries> {
    match (&src.system, &src.input) {
        (Some(name), None) => {
            let var = src.var.as_deref().expect("clap ties --system to --var");
            let spec = catalogue_system::<f64>(name)?;
            let measurement = Measurement::parse(var, &spec.axes)?;
            let traj = simulate_reference(&spec)?;
            Ok(LoadedSeries {
                series: observe(&traj, &measurement)?,
                label: var.to_string(),
                catalogue: Some((spec.default_config.tau, spec.default_config.m)),
            })
        }
        (None, Some(path)) => Ok(LoadedSeries {
            series: read_series_csv(path)?,
            label: file_stem(path),
            catalogue: None,
        }),
        _ => usage_bail("provide a series as --system NAME --var V or --input FILE"),
    }
}

struct LoadedPair {
    a: TimeSeries64,
    b: TimeSeries64,
    label_a: String,
    label_b: String,
    catalogue: Option<(usize, usize)>,
}

fn load_pair(src: &PairSourceArgs) -> Result<LoadedPair> {
    match (&src.system, &src.input, &src.input_b) {
        (Some(name), None, None) => {
            let pair = src.pair.as_deref().expect("clap ties --system to --pair");
            let [va, vb] = pair else {
                usage_bail("--pair takes exactly two comma-separated variables, e.g. x,z");
            };
            let spec = catalogue_system::<f64>(name)?;
            let ma = Measurement::parse(va, &spec.axes)?;
            let mb = Measurement::parse(vb, &spec.axes)?;
            let traj = simulate_reference(&spec)?;
            Ok(LoadedPair {
                a: observe(&traj, &ma)?,
                b: observe(&traj, &mb)?,
                label_a: va.clone(),
                label_b: vb.clone(),
                catalogue: Some((spec.default_config.tau, spec.default_config.m)),
            })
        }
        (None, Some(pa), Some(pb)) => {
            let a = read_series_csv(pa)?;
            let b = read_series_csv(pb)?;
            if (a.dt - b.dt).abs() > 1e-9 * a.dt.abs().max(b.dt.abs()) {
                eprintln!(
                    "warning: sampling intervals differ ({} vs {}); samples are paired by index",
                    a.dt, b.dt
                );
            }
            Ok(LoadedPair {
                a,
                b,
                label_a: file_stem(pa),
                label_b: file_stem(pb),
                catalogue: None,
            })
        }
        _ => usage_bail("provide a pair as --system NAME --pair A,B or --input FILE --input-b FILE"),
    }
}

/// Fill in tau and m: explicit flag, then catalogue default, then data-driven
/// selection (MI minimum, FNN threshold) with a warned fallback.
fn resolve_params(
    series: &TimeSeries64,
    catalogue: Option<(usize, usize)>,
    flags: EmbedArgs,
    label: &str,
) -> Result<EmbeddingParams> {
    let tau = match (flags.tau, catalogue) {
        (Some(t), _) => t,
        (None, Some((t, _))) => t,
        (None, None) => match select_lag(series, DEFAULT_MAX_LAG)?.selection {
            LagSelection::Minimum(l) => {
                eprintln!("note: '{label}': using mutual-information lag tau={l}");
                l
            }
            LagSelection::NoMinimum => {
                eprintln!(
                    "warning: '{label}': mutual information has no local minimum within \
                     {DEFAULT_MAX_LAG} lags; using tau=1"
                );
                1
            }
        },
    };
    let m = match (flags.m, catalogue) {
        (Some(m), _) => m,
        (None, Some((_, m))) => m,
        (None, None) => {
            let fnn = FnnParams::default();
            let max_dim = fnn.max_dim;
            match select_dimension(series, tau, fnn)?.selection {
                DimSelection::FirstBelow(d) => {
                    eprintln!("note: '{label}': using false-neighbor dimension m={d}");
                    d
                }
                DimSelection::NoThreshold => {
                    eprintln!(
                        "warning: '{label}': false-neighbor fraction stays above threshold; \
                         using m={max_dim}"
                    );
                    max_dim
                }
            }
        }
    };
    Ok(EmbeddingParams { tau, m })
}

// ----------------------------------------------------------------- helpers

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into())
}

/// Resolve an output path: the default name when omitted, and relative paths
/// inside `$SCCM_OUT_DIR` when that variable is set.
fn resolve_out(path: Option<PathBuf>, default_name: &str) -> Result<PathBuf> {
    let p = path.unwrap_or_else(|| PathBuf::from(default_name));
    let p = match std::env::var_os("SCCM_OUT_DIR") {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p,
    };
    if let Some(parent) = p.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(p)
}

fn emit_json(value: &serde_json::Value, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => {
            let path = resolve_out(Some(p.clone()), "report.json")?;
            std::fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
            println!("wrote {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

/// Like `emit_json`, but silent without `--out` (the stdout summary line
/// already carried the result).
fn emit_json_if_requested(value: &serde_json::Value, out: &Option<PathBuf>) -> Result<()> {
    if out.is_some() {
        emit_json(value, out)?;
    }
    Ok(())
}

fn usage_bail(msg: &str) -> ! {
    eprintln!("error: {msg}");
    eprintln!("run with --help for usage");
    std::process::exit(2);
}
