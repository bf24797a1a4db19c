//! Command-line front end: analytic means, seeded Monte Carlo sampling,
//! figure-table emission, and two-path consistency checks.
//!
//! Exit codes: 0 success; 2 invalid or conflicting flags; 3 size-guard
//! violation; 4 statistical mismatch (a z-score beyond 3); 5 unwritable
//! output path. Diagnostics go to stderr; stdout carries data only.

mod output;

use std::fs::File;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use recoh::analytics::{
    high_k_asymptote, mean_coherence, qubit_partition_mean, AnalyticsError, EvalMethod,
};
use recoh::experiments::{
    cross_validate, partition_mean_table, run_monte_carlo, sweep_table, transition_table,
    CoherenceStatistics, ExperimentConfig, ExperimentError, SweepRow, TransitionRow,
    DEFAULT_COVERAGES,
};
use recoh::sampling::SampleError;

use output::{band_label, field_f64, field_opt, record, to_json, Table, SCHEMA_VERSION};

/// Fixed default seed so bare invocations are reproducible.
const DEFAULT_SEED: u64 = 271_828_182_845;

const EXIT_INTERNAL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_GUARD: i32 = 3;
const EXIT_MISMATCH: i32 = 4;
const EXIT_UNWRITABLE: i32 = 5;

#[derive(Parser)]
#[command(
    name = "recoh",
    version,
    about = "Recoverable coherence of a qubit via measurements on an accessible \
             environment factor: exact ensemble means, seeded Monte Carlo, and \
             figure-ready tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble-mean recoverable coherence, exact or asymptotic
    Mean(MeanArgs),
    /// Seeded Monte Carlo over the induced ensemble, with percentile bands
    Sample(SampleArgs),
    /// Emit a figure-ready CSV table
    Figure(FigureArgs),
    /// Cross-validate the two sampling paths against the exact mean
    Check(CheckArgs),
}

/// One of two parameterizations: factor dimensions (--A with --K) or a
/// qubit partition (--qubits with --accessible, giving A = 2^a, K = 2^(n-a)).
#[derive(Args)]
struct DimSpec {
    /// Accessible-factor dimension A (pair with --K)
    #[arg(long = "A", value_name = "A")]
    a_dim: Option<u64>,
    /// Traced-out factor dimension K (pair with --A)
    #[arg(long = "K", value_name = "K")]
    k_dim: Option<u64>,
    /// Total environment qubits n (pair with --accessible)
    #[arg(long, value_name = "N")]
    qubits: Option<u32>,
    /// Accessible qubits a out of n (pair with --qubits)
    #[arg(long, value_name = "QUBITS")]
    accessible: Option<u32>,
}

enum Param {
    Dims { a: u64, k: u64 },
    Qubits { total: u32, accessible: u32 },
}

impl DimSpec {
    fn resolve(&self) -> Result<Param, Failure> {
        match (self.a_dim, self.k_dim, self.qubits, self.accessible) {
            (Some(a), Some(k), None, None) => Ok(Param::Dims { a, k }),
            (None, None, Some(total), Some(accessible)) => {
                Ok(Param::Qubits { total, accessible })
            }
            _ => Err(Failure::usage(
                "specify exactly one parameterization: --A with --K, or --qubits with --accessible",
            )),
        }
    }
}

/// Factor dimensions for a sampling command. Qubit splits are bounded
/// before shifting so oversized counts report a guard violation instead of
/// overflowing.
fn sampling_dims(param: &Param) -> Result<(u64, u64), Failure> {
    match *param {
        Param::Dims { a, k } => Ok((a, k)),
        Param::Qubits { total, accessible } => {
            if accessible > total {
                return Err(Failure::usage(format!(
                    "--accessible {accessible} exceeds --qubits {total}"
                )));
            }
            let inaccessible = total - accessible;
            if accessible.min(inaccessible) > 10 || total >= 26 {
                return Err(Failure::guard(format!(
                    "qubit split (n = {total}, a = {accessible}) exceeds the Monte Carlo \
                     size guards"
                )));
            }
            Ok((1u64 << accessible, 1u64 << inaccessible))
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn guard(message: impl Into<String>) -> Self {
        Failure { code: EXIT_GUARD, message: message.into() }
    }

    fn unwritable(message: impl Into<String>) -> Self {
        Failure { code: EXIT_UNWRITABLE, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INTERNAL, message: message.into() }
    }
}

fn classify_analytics(e: AnalyticsError) -> Failure {
    match e {
        AnalyticsError::TooManyTerms { .. } | AnalyticsError::TotalTooLarge { .. } => {
            Failure::guard(e.to_string())
        }
        AnalyticsError::ZeroDimension
        | AnalyticsError::UnsupportedDimension { .. }
        | AnalyticsError::PartitionOutOfRange { .. } => Failure::usage(e.to_string()),
    }
}

fn classify(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::ZeroDimension
        | ExperimentError::TooFewSamples { .. }
        | ExperimentError::CoverageOutOfRange { .. }
        | ExperimentError::RangeEmpty { .. }
        | ExperimentError::EmptyInput
        | ExperimentError::MismatchedSampleCounts { .. } => Failure::usage(e.to_string()),
        ExperimentError::EntriesBeyondLimit { .. }
        | ExperimentError::FactorBeyondLimit { .. }
        | ExperimentError::SweepBeyondLimit { .. }
        | ExperimentError::StateBeyondLimit { .. } => Failure::guard(e.to_string()),
        ExperimentError::Sample(SampleError::TooLarge { .. }) => Failure::guard(e.to_string()),
        ExperimentError::Analytics(inner) => classify_analytics(inner),
        ExperimentError::Sample(_) | ExperimentError::Coherence(_) => {
            Failure::internal(e.to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// mean

#[derive(Args)]
struct MeanArgs {
    #[command(flatten)]
    dims: DimSpec,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct MeanInputs {
    a_dim: Option<u64>,
    k_dim: Option<u64>,
    qubits: Option<u32>,
    accessible: Option<u32>,
    format: &'static str,
}

#[derive(Serialize)]
struct MeanRow {
    value: f64,
    method: EvalMethod,
    /// Large-K asymptote, present when A is 1, 2, or 3.
    asymptote: Option<f64>,
}

fn cmd_mean(args: &MeanArgs) -> Result<i32, Failure> {
    let param = args.dims.resolve()?;
    let (mean, asymptote) = match param {
        Param::Dims { a, k } => {
            let mean = mean_coherence(a, k).map_err(classify_analytics)?;
            let asymptote = if (1..=3).contains(&a) {
                Some(high_k_asymptote(a, k).map_err(classify_analytics)?)
            } else {
                None
            };
            (mean, asymptote)
        }
        Param::Qubits { total, accessible } => {
            let mean = qubit_partition_mean(total, accessible).map_err(classify_analytics)?;
            // 2^a is 1 or 2 only for a <= 1; the shift for K must also fit.
            let asymptote = if accessible <= 1 && total - accessible <= 63 {
                Some(
                    high_k_asymptote(1u64 << accessible, 1u64 << (total - accessible))
                        .map_err(classify_analytics)?,
                )
            } else {
                None
            };
            (mean, asymptote)
        }
    };
    let rows = vec![MeanRow { value: mean.value, method: mean.method, asymptote }];
    match args.format {
        Format::Json => {
            let inputs = MeanInputs {
                a_dim: args.dims.a_dim,
                k_dim: args.dims.k_dim,
                qubits: args.dims.qubits,
                accessible: args.dims.accessible,
                format: args.format.name(),
            };
            print!("{}", to_json(&record("mean", inputs, rows, None)));
        }
        Format::Csv => {
            let table = Table {
                header: vec![
                    "schema_version".into(),
                    "value".into(),
                    "method".into(),
                    "asymptote".into(),
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            SCHEMA_VERSION.into(),
                            field_f64(r.value),
                            r.method.to_string(),
                            field_opt(r.asymptote),
                        ]
                    })
                    .collect(),
            };
            print!("{}", table.render());
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// sample

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    dims: DimSpec,
    /// Number of Monte Carlo samples
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// RNG seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Central band coverages in percent, comma separated
    #[arg(long = "percentiles", value_delimiter = ',', default_values_t = [50.0, 90.0, 99.0])]
    percentiles: Vec<f64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct SampleInputs {
    a_dim: Option<u64>,
    k_dim: Option<u64>,
    qubits: Option<u32>,
    accessible: Option<u32>,
    samples: u64,
    seed: u64,
    percentiles: Vec<f64>,
    format: &'static str,
}

fn sample_table(stats: &CoherenceStatistics) -> Table {
    let mut header = vec![
        "schema_version".to_string(),
        "samples".into(),
        "mean".into(),
        "std_dev".into(),
        "std_err".into(),
        "analytic_mean".into(),
        "z_score".into(),
    ];
    let mut row = vec![
        SCHEMA_VERSION.to_string(),
        stats.samples.to_string(),
        field_f64(stats.mean),
        field_f64(stats.std_dev),
        field_f64(stats.std_err),
        field_f64(stats.analytic_mean),
        field_f64(stats.z_score),
    ];
    for band in &stats.bands {
        header.push(format!("{}_lo", band_label(band.coverage)));
        header.push(format!("{}_hi", band_label(band.coverage)));
        row.push(field_f64(band.lower));
        row.push(field_f64(band.upper));
    }
    Table { header, rows: vec![row] }
}

fn cmd_sample(args: &SampleArgs) -> Result<i32, Failure> {
    let (a, k) = sampling_dims(&args.dims.resolve()?)?;
    let config = ExperimentConfig {
        accessible_dim: a,
        inaccessible_dim: k,
        samples: args.samples,
        seed: args.seed,
        coverages: args.percentiles.clone(),
    };
    let stats = run_monte_carlo(&config).map_err(classify)?;
    match args.format {
        Format::Json => {
            let inputs = SampleInputs {
                a_dim: args.dims.a_dim,
                k_dim: args.dims.k_dim,
                qubits: args.dims.qubits,
                accessible: args.dims.accessible,
                samples: args.samples,
                seed: args.seed,
                percentiles: args.percentiles.clone(),
                format: args.format.name(),
            };
            print!(
                "{}",
                to_json(&record("sample", inputs, vec![stats.clone()], Some(args.seed)))
            );
        }
        Format::Csv => print!("{}", sample_table(&stats).render()),
    }
    if stats.z_score.abs() > 3.0 {
        eprintln!(
            "statistical mismatch: |z| = {:.3} exceeds 3 (mean {}, exact {})",
            stats.z_score.abs(),
            stats.mean,
            stats.analytic_mean
        );
        return Ok(EXIT_MISMATCH);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// figure

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    /// Exact mean vs its approximations over K at fixed A
    Fig3,
    /// Monte Carlo partition sweeps with percentile bands
    Fig4,
    /// Analytic partition profile for a large register
    Fig5,
}

#[derive(Args)]
struct FigureArgs {
    /// Which figure table to emit
    #[arg(long, value_enum)]
    which: Figure,
    /// Accessible-factor dimension A (fig3; default 100)
    #[arg(long = "A", value_name = "A")]
    a_dim: Option<u64>,
    /// Largest traced-out dimension K (fig3; default 400)
    #[arg(long = "Kmax", value_name = "KMAX")]
    k_max: Option<u64>,
    /// Smallest total qubit count (fig4; default 3)
    #[arg(long)]
    nmin: Option<u32>,
    /// Largest total qubit count (fig4; default 11)
    #[arg(long)]
    nmax: Option<u32>,
    /// Monte Carlo samples per partition point (fig4; default 10000)
    #[arg(long)]
    samples: Option<u64>,
    /// RNG seed (fig4)
    #[arg(long)]
    seed: Option<u64>,
    /// Total qubit count (fig5; default 200)
    #[arg(long)]
    n: Option<u32>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn reject_inapplicable(args: &FigureArgs) -> Result<(), Failure> {
    let fig3_flags = args.a_dim.is_some() || args.k_max.is_some();
    let fig4_flags = args.nmin.is_some()
        || args.nmax.is_some()
        || args.samples.is_some()
        || args.seed.is_some();
    let fig5_flags = args.n.is_some();
    let stray = match args.which {
        Figure::Fig3 if fig4_flags => Some("--nmin/--nmax/--samples/--seed apply to fig4 only"),
        Figure::Fig3 if fig5_flags => Some("--n applies to fig5 only"),
        Figure::Fig4 if fig3_flags => Some("--A/--Kmax apply to fig3 only"),
        Figure::Fig4 if fig5_flags => Some("--n applies to fig5 only"),
        Figure::Fig5 if fig3_flags => Some("--A/--Kmax apply to fig3 only"),
        Figure::Fig5 if fig4_flags => Some("--nmin/--nmax/--samples/--seed apply to fig4 only"),
        _ => None,
    };
    match stray {
        Some(message) => Err(Failure::usage(message)),
        None => Ok(()),
    }
}

fn fig3_table(rows: &[TransitionRow]) -> Table {
    Table {
        header: vec!["K".into(), "exact".into(), "linear".into(), "asymptote".into()],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.inaccessible_dim.to_string(),
                    field_f64(r.exact),
                    field_f64(r.linear),
                    field_opt(r.asymptote),
                ]
            })
            .collect(),
    }
}

fn fig4_table(rows: &[SweepRow]) -> Table {
    let mut header = vec!["n".to_string(), "a".into(), "mean".into()];
    for &coverage in DEFAULT_COVERAGES.iter() {
        header.push(format!("{}_lo", band_label(coverage)));
        header.push(format!("{}_hi", band_label(coverage)));
    }
    Table {
        header,
        rows: rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.total_qubits.to_string(),
                    r.accessible_qubits.to_string(),
                    field_f64(r.mean),
                ];
                for band in &r.bands {
                    row.push(field_f64(band.lower));
                    row.push(field_f64(band.upper));
                }
                row
            })
            .collect(),
    }
}

fn cmd_figure(args: &FigureArgs) -> Result<i32, Failure> {
    reject_inapplicable(args)?;
    let table = match args.which {
        Figure::Fig3 => {
            let rows = transition_table(args.a_dim.unwrap_or(100), args.k_max.unwrap_or(400))
                .map_err(classify)?;
            fig3_table(&rows)
        }
        Figure::Fig4 => {
            let rows = sweep_table(
                args.nmin.unwrap_or(3),
                args.nmax.unwrap_or(11),
                args.samples.unwrap_or(10_000),
                args.seed.unwrap_or(DEFAULT_SEED),
            )
            .map_err(classify)?;
            fig4_table(&rows)
        }
        Figure::Fig5 => {
            let rows = partition_mean_table(args.n.unwrap_or(200)).map_err(classify)?;
            Table {
                header: vec!["a".into(), "value".into(), "method".into()],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.accessible_qubits.to_string(),
                            field_f64(r.value),
                            r.method.to_string(),
                        ]
                    })
                    .collect(),
            }
        }
    };
    let data_rows = table.rows.len();
    let csv = table.render();
    match &args.out {
        None => print!("{csv}"),
        Some(path) => {
            let mut file = File::create(path).map_err(|e| {
                Failure::unwritable(format!("cannot create {}: {e}", path.display()))
            })?;
            file.write_all(csv.as_bytes()).map_err(|e| {
                Failure::unwritable(format!("cannot write {}: {e}", path.display()))
            })?;
            eprintln!("wrote {data_rows} data rows to {}", path.display());
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// check

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    dims: DimSpec,
    /// Number of Monte Carlo samples per path
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// RNG seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Serialize)]
struct CheckInputs {
    a_dim: Option<u64>,
    k_dim: Option<u64>,
    qubits: Option<u32>,
    accessible: Option<u32>,
    samples: u64,
    seed: u64,
    format: &'static str,
}

#[derive(Serialize)]
struct CheckRow {
    path: &'static str,
    samples: u64,
    mean: f64,
    std_dev: f64,
    std_err: f64,
    analytic_mean: f64,
    z_score: f64,
    z_between: f64,
    flagged: bool,
}

fn check_row(
    path: &'static str,
    stats: &CoherenceStatistics,
    z_between: f64,
    flagged: bool,
) -> CheckRow {
    CheckRow {
        path,
        samples: stats.samples,
        mean: stats.mean,
        std_dev: stats.std_dev,
        std_err: stats.std_err,
        analytic_mean: stats.analytic_mean,
        z_score: stats.z_score,
        z_between,
        flagged,
    }
}

fn cmd_check(args: &CheckArgs) -> Result<i32, Failure> {
    let (a, k) = sampling_dims(&args.dims.resolve()?)?;
    let report = cross_validate(a, k, args.samples, args.seed).map_err(classify)?;
    let rows = vec![
        check_row("induced", &report.induced, report.z_between, report.flagged),
        check_row("pure", &report.pure_path, report.z_between, report.flagged),
    ];
    match args.format {
        Format::Json => {
            let inputs = CheckInputs {
                a_dim: args.dims.a_dim,
                k_dim: args.dims.k_dim,
                qubits: args.dims.qubits,
                accessible: args.dims.accessible,
                samples: args.samples,
                seed: args.seed,
                format: args.format.name(),
            };
            print!("{}", to_json(&record("check", inputs, rows, Some(args.seed))));
        }
        Format::Csv => {
            let table = Table {
                header: vec![
                    "schema_version".into(),
                    "path".into(),
                    "samples".into(),
                    "mean".into(),
                    "std_dev".into(),
                    "std_err".into(),
                    "analytic_mean".into(),
                    "z_score".into(),
                    "z_between".into(),
                    "flagged".into(),
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            SCHEMA_VERSION.into(),
                            r.path.to_string(),
                            r.samples.to_string(),
                            field_f64(r.mean),
                            field_f64(r.std_dev),
                            field_f64(r.std_err),
                            field_f64(r.analytic_mean),
                            field_f64(r.z_score),
                            field_f64(r.z_between),
                            r.flagged.to_string(),
                        ]
                    })
                    .collect(),
            };
            print!("{}", table.render());
        }
    }
    if report.flagged {
        eprintln!(
            "statistical mismatch: induced z = {:.3}, pure z = {:.3}, between z = {:.3}",
            report.induced.z_score, report.pure_path.z_score, report.z_between
        );
        return Ok(EXIT_MISMATCH);
    }
    Ok(0)
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mean(args) => cmd_mean(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}
