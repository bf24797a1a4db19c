//! Deterministic Monte Carlo over the induced-measure ensemble: summary
//! statistics with percentile bands, qubit-partition sweeps, figure-ready
//! tables, and a two-path cross-validation of the sampling pipeline.
//!
//! Determinism contract: sample `i` of a run always draws from
//! [`RngStream::substream`]`(seed, i)`, and results are collected in sample
//! order, so outputs are byte-identical regardless of how many worker
//! threads execute the loop (`RAYON_NUM_THREADS` only changes wall time).

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{
    self, high_k_asymptote, linear_approximation, mean_coherence, qubit_partition_mean,
    AnalyticsError, EvalMethod, MAX_EXACT_TERMS,
};
use crate::coherence::{recoverable_coherence, trace_norm, CoherenceError};
use crate::sampling::{
    partial_trace, sample_complex_gaussian, sample_haar_pure, RngStream, SampleError,
    MAX_DRAW_ENTRIES,
};

/// Largest min(A, K) a Monte Carlo run will factorise per sample; beyond
/// this the per-sample SVD cost leaves desk scale.
pub const MAX_FACTOR_DIM: u64 = 1 << 10;
/// Largest total qubit count for a full partition sweep.
pub const MAX_SWEEP_QUBITS: u32 = 13;
/// Largest full register dimension 2*A*K the pure-state path materialises.
pub const MAX_PURE_STATE_DIM: u128 = 1 << 12;
/// Largest reduced dimension 2*A the pure-state path reduces onto.
pub const MAX_PURE_REDUCED_DIM: u64 = 256;
/// Central band coverages (percent) used when none are specified.
pub const DEFAULT_COVERAGES: [f64; 3] = [50.0, 90.0, 99.0];

/// Errors from the experiment layer.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    ZeroDimension,
    TooFewSamples { samples: u64 },
    /// The Gaussian draw 2*A*K would exceed [`MAX_DRAW_ENTRIES`].
    EntriesBeyondLimit { entries: u128 },
    /// min(A, K) exceeds [`MAX_FACTOR_DIM`].
    FactorBeyondLimit { factor: u64 },
    CoverageOutOfRange { coverage: f64 },
    SweepBeyondLimit { total: u32 },
    RangeEmpty { lo: u32, hi: u32 },
    /// The full register 2*A*K exceeds what the pure-state path materialises.
    StateBeyondLimit { dim: u128 },
    EmptyInput,
    MismatchedSampleCounts { first: u64, other: u64 },
    Sample(SampleError),
    Coherence(CoherenceError),
    Analytics(AnalyticsError),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::ZeroDimension => write!(f, "dimensions must be at least 1"),
            ExperimentError::TooFewSamples { samples } => {
                write!(f, "need at least 2 samples, got {samples}")
            }
            ExperimentError::EntriesBeyondLimit { entries } => write!(
                f,
                "per-sample draw of {entries} complex entries exceeds {MAX_DRAW_ENTRIES}"
            ),
            ExperimentError::FactorBeyondLimit { factor } => write!(
                f,
                "per-sample factorisation dimension {factor} exceeds {MAX_FACTOR_DIM}"
            ),
            ExperimentError::CoverageOutOfRange { coverage } => {
                write!(f, "band coverage {coverage} must lie strictly between 0 and 100")
            }
            ExperimentError::SweepBeyondLimit { total } => {
                write!(f, "sweep over {total} qubits exceeds the limit of {MAX_SWEEP_QUBITS}")
            }
            ExperimentError::RangeEmpty { lo, hi } => {
                write!(f, "qubit range {lo}..={hi} is empty")
            }
            ExperimentError::StateBeyondLimit { dim } => write!(
                f,
                "pure-state register dimension {dim} exceeds {MAX_PURE_STATE_DIM}"
            ),
            ExperimentError::EmptyInput => write!(f, "input slice is empty"),
            ExperimentError::MismatchedSampleCounts { first, other } => write!(
                f,
                "sample counts differ across entries: {first} vs {other}"
            ),
            ExperimentError::Sample(e) => write!(f, "sampling failed: {e}"),
            ExperimentError::Coherence(e) => write!(f, "coherence evaluation failed: {e}"),
            ExperimentError::Analytics(e) => write!(f, "analytic reference failed: {e}"),
        }
    }
}

impl std::error::Error for ExperimentError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ExperimentError::Sample(e) => Some(e),
            ExperimentError::Coherence(e) => Some(e),
            ExperimentError::Analytics(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SampleError> for ExperimentError {
    fn from(e: SampleError) -> Self {
        ExperimentError::Sample(e)
    }
}

impl From<CoherenceError> for ExperimentError {
    fn from(e: CoherenceError) -> Self {
        ExperimentError::Coherence(e)
    }
}

impl From<AnalyticsError> for ExperimentError {
    fn from(e: AnalyticsError) -> Self {
        ExperimentError::Analytics(e)
    }
}

/// One Monte Carlo run: dimensions, sample count, seed and band coverages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub accessible_dim: u64,
    pub inaccessible_dim: u64,
    pub samples: u64,
    pub seed: u64,
    /// Central band coverages in percent, e.g. 50 for the interquartile band.
    pub coverages: Vec<f64>,
}

impl ExperimentConfig {
    /// Config with the default 50/90/99 bands.
    pub fn new(accessible_dim: u64, inaccessible_dim: u64, samples: u64, seed: u64) -> Self {
        Self {
            accessible_dim,
            inaccessible_dim,
            samples,
            seed,
            coverages: DEFAULT_COVERAGES.to_vec(),
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.accessible_dim == 0 || self.inaccessible_dim == 0 {
            return Err(ExperimentError::ZeroDimension);
        }
        if self.samples < 2 {
            return Err(ExperimentError::TooFewSamples { samples: self.samples });
        }
        let entries = 2 * self.accessible_dim as u128 * self.inaccessible_dim as u128;
        if entries > MAX_DRAW_ENTRIES {
            return Err(ExperimentError::EntriesBeyondLimit { entries });
        }
        let factor = self.accessible_dim.min(self.inaccessible_dim);
        if factor > MAX_FACTOR_DIM {
            return Err(ExperimentError::FactorBeyondLimit { factor });
        }
        for &coverage in &self.coverages {
            if !(coverage > 0.0 && coverage < 100.0) {
                return Err(ExperimentError::CoverageOutOfRange { coverage });
            }
        }
        Ok(())
    }
}

/// Central percentile band: the sample quantiles cutting `coverage` percent
/// symmetrically out of the middle of the distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Band {
    pub coverage: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Summary of one Monte Carlo run, with the exact mean attached.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceStatistics {
    pub samples: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub std_err: f64,
    pub bands: Vec<Band>,
    pub analytic_mean: f64,
    /// (mean - analytic_mean) / std_err.
    pub z_score: f64,
}

/// Linear-interpolation sample quantile (the common "type 7" estimator).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(values: &[f64], coverages: &[f64]) -> (f64, f64, f64, Vec<Band>) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std_dev = var.sqrt();
    let std_err = std_dev / (n as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let bands = coverages
        .iter()
        .map(|&coverage| {
            let tail = (100.0 - coverage) / 200.0;
            Band {
                coverage,
                lower: quantile_sorted(&sorted, tail),
                upper: quantile_sorted(&sorted, 1.0 - tail),
            }
        })
        .collect();
    (mean, std_dev, std_err, bands)
}

/// Recoverable coherence of one induced-measure draw, computed from the two
/// Gaussian half-blocks without materialising the density operator:
/// `C = 2 ||G0 G1^H||_tr / ||G||_F^2`. When K < A the singular values of
/// `G0 G1^H` equal those of `R0 R1^H` from thin QR factors, shrinking the
/// factorisation from A x A to K x K.
fn draw_coherence(
    accessible_dim: usize,
    inaccessible_dim: usize,
    stream: RngStream,
) -> Result<f64, ExperimentError> {
    let a = accessible_dim;
    let k = inaccessible_dim;
    let g = sample_complex_gaussian(2 * a, k, stream)?;
    let total = g.norm_squared();
    let g0 = g.view((0, 0), (a, k));
    let g1 = g.view((a, 0), (a, k));
    let product = if k < a {
        let r0 = g0.into_owned().qr().r();
        let r1 = g1.into_owned().qr().r();
        &r0 * r1.adjoint()
    } else {
        g0 * g1.adjoint()
    };
    Ok(2.0 * trace_norm(&product)? / total)
}

/// The per-sample coherence sequence of a run: sample `i` uses substream `i`
/// of the seed, independent of scheduling.
pub fn sample_coherences(
    accessible_dim: u64,
    inaccessible_dim: u64,
    samples: u64,
    seed: u64,
) -> Result<Vec<f64>, ExperimentError> {
    let a = accessible_dim as usize;
    let k = inaccessible_dim as usize;
    (0..samples)
        .into_par_iter()
        .map(|i| draw_coherence(a, k, RngStream::substream(seed, i)))
        .collect()
}

/// Runs one seeded Monte Carlo experiment and summarises it against the
/// exact ensemble mean.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<CoherenceStatistics, ExperimentError> {
    config.validate()?;
    let values = sample_coherences(
        config.accessible_dim,
        config.inaccessible_dim,
        config.samples,
        config.seed,
    )?;
    let (mean, std_dev, std_err, bands) = summarize(&values, &config.coverages);
    // Under the run guards min(A, K) <= 2^10 < 2^14, so the exact series is
    // always available as the reference.
    let analytic = mean_coherence(config.accessible_dim, config.inaccessible_dim)?;
    debug_assert_eq!(analytic.method, EvalMethod::Exact);
    Ok(CoherenceStatistics {
        samples: config.samples,
        mean,
        std_dev,
        std_err,
        bands,
        analytic_mean: analytic.value,
        z_score: (mean - analytic.value) / std_err,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-(total, accessible) seed so every sweep point runs an
/// independent, reproducible stream family.
fn derive_seed(seed: u64, total: u32, accessible: u32) -> u64 {
    splitmix64(seed ^ splitmix64(((total as u64) << 32) | accessible as u64))
}

/// One partition point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionPoint {
    pub total_qubits: u32,
    pub accessible_qubits: u32,
    pub stats: CoherenceStatistics,
}

/// Monte Carlo over every split a = 0..=n of an n-qubit environment into
/// accessible (A = 2^a) and inaccessible (K = 2^(n-a)) halves.
pub fn sweep_partition(
    total: u32,
    samples: u64,
    seed: u64,
) -> Result<Vec<PartitionPoint>, ExperimentError> {
    if total > MAX_SWEEP_QUBITS {
        return Err(ExperimentError::SweepBeyondLimit { total });
    }
    (0..=total)
        .map(|accessible| {
            let config = ExperimentConfig::new(
                1u64 << accessible,
                1u64 << (total - accessible),
                samples,
                derive_seed(seed, total, accessible),
            );
            Ok(PartitionPoint {
                total_qubits: total,
                accessible_qubits: accessible,
                stats: run_monte_carlo(&config)?,
            })
        })
        .collect()
}

/// Sample dispersion per total qubit count, for concentration-of-measure
/// comparisons across register sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TypicalityPoint {
    pub total_qubits: u32,
    pub std_dev: f64,
}

/// Extracts the per-n dispersion from sweep points, requiring equal sample
/// counts so the comparison across n is fair.
pub fn typicality_metric(points: &[PartitionPoint]) -> Result<Vec<TypicalityPoint>, ExperimentError> {
    let first = points.first().ok_or(ExperimentError::EmptyInput)?;
    for p in points {
        if p.stats.samples != first.stats.samples {
            return Err(ExperimentError::MismatchedSampleCounts {
                first: first.stats.samples,
                other: p.stats.samples,
            });
        }
    }
    Ok(points
        .iter()
        .map(|p| TypicalityPoint {
            total_qubits: p.total_qubits,
            std_dev: p.stats.std_dev,
        })
        .collect())
}

/// Exact mean against its two approximations at fixed A, K = 1..=k_max.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitionRow {
    pub inaccessible_dim: u64,
    pub exact: f64,
    /// Linear law 1 - K/(4A), extended past its regime (negative beyond 4A).
    pub linear: f64,
    /// Large-K asymptote, available for A in {1, 2, 3}.
    pub asymptote: Option<f64>,
}

/// Table behind the transition plot: exact mean, linear law and (when A is
/// small enough to have one) the large-K asymptote, for K = 1..=k_max.
pub fn transition_table(
    accessible_dim: u64,
    k_max: u64,
) -> Result<Vec<TransitionRow>, ExperimentError> {
    if accessible_dim == 0 || k_max == 0 {
        return Err(ExperimentError::ZeroDimension);
    }
    if accessible_dim > MAX_EXACT_TERMS {
        return Err(ExperimentError::Analytics(AnalyticsError::TooManyTerms {
            terms: accessible_dim,
        }));
    }
    let has_asymptote = accessible_dim <= 3;
    (1..=k_max)
        .map(|k| {
            let exact = mean_coherence(accessible_dim, k)?;
            debug_assert_eq!(exact.method, EvalMethod::Exact);
            Ok(TransitionRow {
                inaccessible_dim: k,
                exact: exact.value,
                linear: linear_approximation(accessible_dim, k)?,
                asymptote: if has_asymptote {
                    Some(high_k_asymptote(accessible_dim, k)?)
                } else {
                    None
                },
            })
        })
        .collect()
}

/// One row of the sweep table: Monte Carlo mean and bands at a partition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub total_qubits: u32,
    pub accessible_qubits: u32,
    pub mean: f64,
    pub bands: Vec<Band>,
}

/// Table behind the partition plot: sweeps for every n in n_min..=n_max with
/// the default 50/90/99 bands.
pub fn sweep_table(
    n_min: u32,
    n_max: u32,
    samples: u64,
    seed: u64,
) -> Result<Vec<SweepRow>, ExperimentError> {
    if n_min > n_max {
        return Err(ExperimentError::RangeEmpty { lo: n_min, hi: n_max });
    }
    let mut rows = Vec::new();
    for total in n_min..=n_max {
        for point in sweep_partition(total, samples, seed)? {
            rows.push(SweepRow {
                total_qubits: point.total_qubits,
                accessible_qubits: point.accessible_qubits,
                mean: point.stats.mean,
                bands: point.stats.bands,
            });
        }
    }
    Ok(rows)
}

/// One row of the large-register table: the analytic mean at a partition of
/// n qubits, tagged with the method that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartitionMeanRow {
    pub accessible_qubits: u32,
    pub value: f64,
    pub method: EvalMethod,
}

/// Table behind the large-register plot: the analytic mean across every
/// split a = 0..=n, purely analytic so n can be far beyond Monte Carlo.
pub fn partition_mean_table(total: u32) -> Result<Vec<PartitionMeanRow>, ExperimentError> {
    (0..=total)
        .map(|accessible| {
            let mean = qubit_partition_mean(total, accessible)?;
            Ok(PartitionMeanRow {
                accessible_qubits: accessible,
                value: mean.value,
                method: mean.method,
            })
        })
        .collect()
}

/// Outcome of the two-path consistency check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidation {
    pub induced: CoherenceStatistics,
    pub pure_path: CoherenceStatistics,
    /// Two-sample z between the paths' means.
    pub z_between: f64,
    /// True when any |z| exceeds 3.
    pub flagged: bool,
}

/// Cross-validates the block sampler against the long way round — Haar
/// vector on the full register, partial trace, trace-norm of the cross
/// block — and both against the exact mean. The paths draw from disjoint
/// substream ranges, so agreement is a real two-sample test.
pub fn cross_validate(
    accessible_dim: u64,
    inaccessible_dim: u64,
    samples: u64,
    seed: u64,
) -> Result<CrossValidation, ExperimentError> {
    let config = ExperimentConfig::new(accessible_dim, inaccessible_dim, samples, seed);
    config.validate()?;
    let state_dim = 2 * accessible_dim as u128 * inaccessible_dim as u128;
    if state_dim > MAX_PURE_STATE_DIM {
        return Err(ExperimentError::StateBeyondLimit { dim: state_dim });
    }
    if 2 * accessible_dim > MAX_PURE_REDUCED_DIM {
        return Err(ExperimentError::StateBeyondLimit {
            dim: 2 * accessible_dim as u128,
        });
    }

    let induced = run_monte_carlo(&config)?;

    let a = accessible_dim as usize;
    let dim = state_dim as usize;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64, ExperimentError> {
            let state = sample_haar_pure(dim, RngStream::substream(seed, samples + i))?;
            let rho = partial_trace(&state, 2 * a)?;
            Ok(recoverable_coherence(&rho, a)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (mean, std_dev, std_err, bands) = summarize(&values, &config.coverages);
    let analytic = analytics::mean_coherence(accessible_dim, inaccessible_dim)?;
    let pure_path = CoherenceStatistics {
        samples,
        mean,
        std_dev,
        std_err,
        bands,
        analytic_mean: analytic.value,
        z_score: (mean - analytic.value) / std_err,
    };

    let z_between = (induced.mean - pure_path.mean)
        / (induced.std_err.powi(2) + pure_path.std_err.powi(2)).sqrt();
    let flagged =
        induced.z_score.abs() > 3.0 || pure_path.z_score.abs() > 3.0 || z_between.abs() > 3.0;
    Ok(CrossValidation {
        induced,
        pure_path,
        z_between,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_induced_density;

    #[test]
    fn fast_path_matches_full_decomposition() {
        // Same stream, two routes: the block shortcut must equal
        // recoverable_coherence of the materialised density operator.
        for (a, k) in [(1u64, 1u64), (2, 3), (3, 2), (4, 4), (5, 1), (1, 6)] {
            for idx in 0..5u64 {
                let stream = RngStream::substream(99, idx);
                let fast = draw_coherence(a as usize, k as usize, stream).unwrap();
                let rho = sample_induced_density(a as usize, k as usize, stream).unwrap();
                let slow = recoverable_coherence(&rho, a as usize).unwrap();
                assert!(
                    (fast - slow).abs() < 1e-10,
                    "A={a}, K={k}, idx={idx}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn quantiles_interpolate_linearly() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        assert!((quantile_sorted(&xs, 0.5) - 2.5).abs() < 1e-15);
        let ys = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&ys, 0.5), 3.0);
        assert!((quantile_sorted(&ys, 0.25) - 2.0).abs() < 1e-15);
        assert_eq!(quantile_sorted(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn summary_relations_hold() {
        let config = ExperimentConfig::new(2, 2, 4000, 11);
        let stats = run_monte_carlo(&config).unwrap();
        assert_eq!(stats.samples, 4000);
        assert!((stats.std_err - stats.std_dev / (4000f64).sqrt()).abs() < 1e-15);
        assert!(stats.mean > 0.0 && stats.mean < 1.0);
        assert!(stats.z_score.abs() < 4.0);
        // Default bands nest: wider coverage contains narrower.
        let b = &stats.bands;
        assert_eq!(b.len(), 3);
        assert!(b[0].lower >= b[1].lower && b[1].lower >= b[2].lower);
        assert!(b[0].upper <= b[1].upper && b[1].upper <= b[2].upper);
        for band in b {
            assert!(band.lower <= stats.mean && stats.mean <= band.upper);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let config = ExperimentConfig::new(3, 5, 500, 42);
        let first = run_monte_carlo(&config).unwrap();
        let second = run_monte_carlo(&config).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn worker_count_does_not_change_values() {
        let config = ExperimentConfig::new(2, 4, 800, 7);
        let reference = run_monte_carlo(&config).unwrap();
        for workers in [1usize, 2, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let stats = pool.install(|| run_monte_carlo(&config)).unwrap();
            assert_eq!(stats, reference, "workers={workers}");
        }
    }

    #[test]
    fn config_guards_reject_out_of_range_runs() {
        assert!(matches!(
            run_monte_carlo(&ExperimentConfig::new(0, 4, 100, 1)),
            Err(ExperimentError::ZeroDimension)
        ));
        assert!(matches!(
            run_monte_carlo(&ExperimentConfig::new(2, 4, 1, 1)),
            Err(ExperimentError::TooFewSamples { samples: 1 })
        ));
        assert!(matches!(
            run_monte_carlo(&ExperimentConfig::new(4096, 4096, 10, 1)),
            Err(ExperimentError::FactorBeyondLimit { factor: 4096 })
        ));
        assert!(matches!(
            run_monte_carlo(&ExperimentConfig::new(1 << 3, 1 << 24, 10, 1)),
            Err(ExperimentError::EntriesBeyondLimit { .. })
        ));
        let mut config = ExperimentConfig::new(2, 2, 100, 1);
        config.coverages = vec![100.0];
        assert!(matches!(
            run_monte_carlo(&config),
            Err(ExperimentError::CoverageOutOfRange { .. })
        ));
    }

    #[test]
    fn sweep_covers_every_partition_and_replays() {
        let points = sweep_partition(3, 400, 5).unwrap();
        assert_eq!(points.len(), 4);
        for (a, p) in points.iter().enumerate() {
            assert_eq!(p.accessible_qubits, a as u32);
            assert_eq!(p.total_qubits, 3);
            assert!(p.stats.z_score.abs() < 4.0, "a={a}: z={}", p.stats.z_score);
        }
        assert_eq!(sweep_partition(3, 400, 5).unwrap(), points);
        // More accessible qubits, more recoverable coherence.
        assert!(points[3].stats.mean > points[0].stats.mean);
        assert!(matches!(
            sweep_partition(14, 10, 1),
            Err(ExperimentError::SweepBeyondLimit { total: 14 })
        ));
    }

    #[test]
    fn sweep_points_use_distinct_streams() {
        let a = sweep_partition(2, 100, 9).unwrap();
        let b = sweep_partition(3, 100, 9).unwrap();
        // Same (samples, seed) but different n: the shared a-values must not
        // replay the same draws, or panel data would be correlated.
        assert_ne!(a[0].stats.mean, b[0].stats.mean);
    }

    #[test]
    fn typicality_checks_sample_counts() {
        let mut points = sweep_partition(2, 200, 3).unwrap();
        let metric = typicality_metric(&points).unwrap();
        assert_eq!(metric.len(), 3);
        assert!(metric.iter().all(|m| m.std_dev > 0.0));
        points[1].stats.samples = 999;
        assert!(matches!(
            typicality_metric(&points),
            Err(ExperimentError::MismatchedSampleCounts { .. })
        ));
        assert!(matches!(
            typicality_metric(&[]),
            Err(ExperimentError::EmptyInput)
        ));
    }

    #[test]
    fn transition_table_shape_and_reference_row() {
        let rows = transition_table(100, 400).unwrap();
        assert_eq!(rows.len(), 400);
        let last = rows.last().unwrap();
        assert_eq!(last.inaccessible_dim, 400);
        // The linear law has hit zero by K = 4A while the exact mean is still
        // large: the law under-estimates past the transition, never over.
        assert!((last.exact - 0.41350226366243591583).abs() < 1e-13);
        assert_eq!(last.linear, 0.0);
        assert!(last.exact > last.linear);
        assert!(last.asymptote.is_none());
        let mut prev = f64::INFINITY;
        for row in &rows {
            assert!(row.exact <= 1.0 + 1e-12 && row.exact > 0.0);
            assert!(row.exact >= row.linear);
            assert!(row.exact < prev);
            prev = row.exact;
        }
    }

    #[test]
    fn transition_table_asymptote_column() {
        let rows = transition_table(2, 1024).unwrap();
        assert!(rows.iter().all(|r| r.asymptote.is_some()));
        let last = rows.last().unwrap();
        let rel = (last.asymptote.unwrap() - last.exact).abs() / last.exact;
        assert!(rel < 3e-4, "relative gap at K=1024: {rel}");
        assert!(matches!(
            transition_table((1 << 14) + 1, 10),
            Err(ExperimentError::Analytics(AnalyticsError::TooManyTerms { .. }))
        ));
    }

    #[test]
    fn sweep_table_flattens_all_partitions() {
        let rows = sweep_table(3, 4, 200, 13).unwrap();
        assert_eq!(rows.len(), 4 + 5);
        assert_eq!(rows[0].total_qubits, 3);
        assert_eq!(rows[0].accessible_qubits, 0);
        assert_eq!(rows.last().unwrap().total_qubits, 4);
        for row in &rows {
            assert_eq!(row.bands.len(), 3);
            assert!(row.bands[0].coverage == 50.0);
        }
        assert!(matches!(
            sweep_table(5, 4, 10, 1),
            Err(ExperimentError::RangeEmpty { lo: 5, hi: 4 })
        ));
    }

    #[test]
    fn partition_mean_table_spans_all_regimes() {
        let rows = partition_mean_table(200).unwrap();
        assert_eq!(rows.len(), 201);
        assert_eq!(rows[60].method, EvalMethod::BelowResolution);
        assert_eq!(rows[60].value, 0.0);
        assert_eq!(rows[103].method, EvalMethod::LinearAsymptote);
        assert!((rows[103].value - 0.99609375).abs() < 1e-15);
        assert_eq!(rows[0].method, EvalMethod::Exact);
        assert!(rows[0].value > 0.0 && rows[0].value < 1e-29);
        assert_eq!(rows[200].method, EvalMethod::Exact);
        assert!((rows[200].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_validation_passes_on_healthy_config() {
        let report = cross_validate(2, 2, 3000, 17).unwrap();
        assert!(!report.flagged, "induced z={}, pure z={}, between={}",
            report.induced.z_score, report.pure_path.z_score, report.z_between);
        assert_eq!(report.induced.analytic_mean, report.pure_path.analytic_mean);
        assert!(report.induced.samples == 3000 && report.pure_path.samples == 3000);
    }

    #[test]
    fn cross_validation_guards_pure_path() {
        assert!(matches!(
            cross_validate(64, 64, 100, 1),
            Err(ExperimentError::StateBeyondLimit { .. })
        ));
    }
}
