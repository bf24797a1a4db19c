//! Exact ensemble means of the recoverable coherence, their closed forms at
//! small accessible dimension, and the asymptotic laws on both sides of the
//! transition.
//!
//! The exact mean at dimensions (A, K) is a terminating hypergeometric-type
//! series with min(A, K) positive summands:
//!
//! ```text
//!     <C> = 2 pi A c(A)^2 c(K) * sum_{l=0}^{min(A,K)-1} t_l,    t_0 = 1,
//!     t_{l+1} = t_l * (1/2+l)(1-A+l)^2(1-K+l) / ((1/2-A+l)^2(1/2-K+l)(l+1))
//! ```
//!
//! where `c(n) = binom(2n, n) / 4^n` is the Wallis ratio. Dimensions enter
//! only through these ratios, so power-of-two dimensions far beyond `u64`
//! (from the qubit-partition interface) evaluate exactly in `f64`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

/// Largest min(A, K) the exact series will sum.
pub const MAX_EXACT_TERMS: u64 = 1 << 14;
/// Largest total qubit count the partition interface accepts; beyond this
/// 2^n overflows the f64 exponent range long before the series matters.
pub const MAX_TOTAL_QUBITS: u32 = 1000;

/// Above this argument the Wallis ratio switches from the literal product to
/// a short asymptotic series (the product would cost 2^20+ multiplies and
/// gain nothing: the series is accurate to ~1e-33 there).
const WALLIS_PRODUCT_LIMIT: f64 = (1u64 << 20) as f64;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Errors from the analytic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    ZeroDimension,
    /// min(A, K) exceeds [`MAX_EXACT_TERMS`], so the exact series is refused.
    TooManyTerms { terms: u64 },
    /// Closed forms exist for A in {1, 2}; asymptotes for A in {1, 2, 3}.
    UnsupportedDimension { a_dim: u64 },
    /// accessible exceeds total in a qubit partition.
    PartitionOutOfRange { total: u32, accessible: u32 },
    TotalTooLarge { total: u32 },
}

impl fmt::Display for AnalyticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticsError::ZeroDimension => write!(f, "dimensions must be at least 1"),
            AnalyticsError::TooManyTerms { terms } => write!(
                f,
                "exact series needs {terms} terms, above the limit of {MAX_EXACT_TERMS}"
            ),
            AnalyticsError::UnsupportedDimension { a_dim } => {
                write!(f, "no reduction is implemented for accessible dimension {a_dim}")
            }
            AnalyticsError::PartitionOutOfRange { total, accessible } => {
                write!(f, "accessible count {accessible} exceeds total {total}")
            }
            AnalyticsError::TotalTooLarge { total } => {
                write!(f, "total qubit count {total} exceeds {MAX_TOTAL_QUBITS}")
            }
        }
    }
}

impl std::error::Error for AnalyticsError {}

/// How a mean value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EvalMethod {
    /// Terminating series, exact to floating-point accuracy.
    #[serde(rename = "exact")]
    Exact,
    /// Deep accessible-dominated regime: 1 - K/(4A).
    #[serde(rename = "linear-asymptote")]
    LinearAsymptote,
    /// Deep inaccessible-dominated regime: the mean underflows any plotting
    /// resolution and is reported as 0.
    #[serde(rename = "below-resolution")]
    BelowResolution,
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalMethod::Exact => "exact",
            EvalMethod::LinearAsymptote => "linear-asymptote",
            EvalMethod::BelowResolution => "below-resolution",
        };
        f.write_str(s)
    }
}

/// A mean-coherence value tagged with the method that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanCoherence {
    pub value: f64,
    pub method: EvalMethod,
    /// Number of series terms summed when the method is exact.
    pub terms: Option<u64>,
}

/// Wallis ratio `c(n) = binom(2n, n) / 4^n = Gamma(n + 1/2) / (sqrt(pi) n!)`.
///
/// The literal product `prod_{j=1..n} (2j-1)/(2j)` is exact-to-rounding for
/// moderate n; for huge n (the qubit interface produces n up to 2^1000) a
/// 1/n series replaces it. Never evaluated through lgamma differences,
/// which cancel catastrophically at this scale.
fn wallis_ratio(n: f64) -> f64 {
    debug_assert!(n >= 0.0 && n == n.trunc());
    if n <= WALLIS_PRODUCT_LIMIT {
        let mut acc = 1.0;
        let mut j = 1.0;
        while j <= n {
            acc *= (2.0 * j - 1.0) / (2.0 * j);
            j += 1.0;
        }
        acc
    } else {
        let x = 1.0 / n;
        (1.0 / (PI * n).sqrt())
            * (1.0 + x * (-0.125 + x * (0.0078125 + x * (0.0048828125 - x * 0.000640869140625))))
    }
}

/// Exact mean at real-valued dimensions; `terms = min(a, k)` must already be
/// validated. Every summand of the series is positive, which the loop
/// asserts while accumulating.
fn exact_mean(a: f64, k: f64, terms: u64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for l in 0..terms.saturating_sub(1) {
        let lf = l as f64;
        term *= ((0.5 + lf) * (1.0 - a + lf) * (1.0 - a + lf) * (1.0 - k + lf))
            / ((0.5 - a + lf) * (0.5 - a + lf) * (0.5 - k + lf) * (lf + 1.0));
        assert!(term > 0.0, "series summand turned non-positive at l={l}");
        sum += term;
    }
    2.0 * PI * a * wallis_ratio(a).powi(2) * wallis_ratio(k) * sum
}

/// Half-moment of the squared-singular-value distribution of the raw cross
/// ensemble: `2K` times the exact mean coherence.
pub fn half_moment(a_dim: u64, k_dim: u64) -> Result<f64, AnalyticsError> {
    if a_dim == 0 || k_dim == 0 {
        return Err(AnalyticsError::ZeroDimension);
    }
    let terms = a_dim.min(k_dim);
    if terms > MAX_EXACT_TERMS {
        return Err(AnalyticsError::TooManyTerms { terms });
    }
    Ok(exact_mean(a_dim as f64, k_dim as f64, terms) * 2.0 * k_dim as f64)
}

/// Ensemble mean of the recoverable coherence at dimensions (A, K).
///
/// Dispatch: the exact series when min(A, K) <= 2^14; the linear asymptote
/// `1 - K/(4A)` when the series is out of reach but A >= K; otherwise the
/// value is below resolution and reported as 0.
pub fn mean_coherence(a_dim: u64, k_dim: u64) -> Result<MeanCoherence, AnalyticsError> {
    if a_dim == 0 || k_dim == 0 {
        return Err(AnalyticsError::ZeroDimension);
    }
    let terms = a_dim.min(k_dim);
    if terms <= MAX_EXACT_TERMS {
        Ok(MeanCoherence {
            value: exact_mean(a_dim as f64, k_dim as f64, terms),
            method: EvalMethod::Exact,
            terms: Some(terms),
        })
    } else if a_dim >= k_dim {
        Ok(MeanCoherence {
            value: 1.0 - k_dim as f64 / (4.0 * a_dim as f64),
            method: EvalMethod::LinearAsymptote,
            terms: None,
        })
    } else {
        Ok(MeanCoherence {
            value: 0.0,
            method: EvalMethod::BelowResolution,
            terms: None,
        })
    }
}

/// Closed forms of the mean at A = 1 and A = 2, stable at any K:
///
/// ```text
///     <C>_1(K) = (pi / 2) c(K)
///     <C>_2(K) = pi (22K - 13) c(K-1) / (32 K)
/// ```
pub fn mean_coherence_closed_form(a_dim: u64, k_dim: u64) -> Result<f64, AnalyticsError> {
    if a_dim == 0 || k_dim == 0 {
        return Err(AnalyticsError::ZeroDimension);
    }
    let k = k_dim as f64;
    match a_dim {
        1 => Ok(0.5 * PI * wallis_ratio(k)),
        2 => Ok(PI * (22.0 * k - 13.0) * wallis_ratio(k - 1.0) / (32.0 * k)),
        _ => Err(AnalyticsError::UnsupportedDimension { a_dim }),
    }
}

/// Large-K asymptote `c_A / sqrt(K)` with c_1 = sqrt(pi)/2,
/// c_2 = 11 sqrt(pi)/16, c_3 = 107 sqrt(pi)/128.
///
/// At small K the formula can exceed 1; it is an asymptote, not a bound.
pub fn high_k_asymptote(a_dim: u64, k_dim: u64) -> Result<f64, AnalyticsError> {
    if a_dim == 0 || k_dim == 0 {
        return Err(AnalyticsError::ZeroDimension);
    }
    let coefficient = match a_dim {
        1 => SQRT_PI / 2.0,
        2 => 11.0 * SQRT_PI / 16.0,
        3 => 107.0 * SQRT_PI / 128.0,
        _ => return Err(AnalyticsError::UnsupportedDimension { a_dim }),
    };
    Ok(coefficient / (k_dim as f64).sqrt())
}

/// Accessible-dominated linear law `1 - K / (4A)`, exact to leading order
/// for K <= A and crossing zero at K = 4A.
pub fn linear_approximation(a_dim: u64, k_dim: u64) -> Result<f64, AnalyticsError> {
    if a_dim == 0 || k_dim == 0 {
        return Err(AnalyticsError::ZeroDimension);
    }
    Ok(1.0 - k_dim as f64 / (4.0 * a_dim as f64))
}

/// Mean coherence for an n-qubit environment split into `accessible` qubits
/// (A = 2^a) and `n - accessible` qubits (K = 2^(n-a)).
///
/// Same dispatch as [`mean_coherence`]: exact when min(a, n-a) <= 14, the
/// qubit form of the linear law `1 - 2^(k-a-2)` when a >= n-a, else 0.
pub fn qubit_partition_mean(total: u32, accessible: u32) -> Result<MeanCoherence, AnalyticsError> {
    if accessible > total {
        return Err(AnalyticsError::PartitionOutOfRange { total, accessible });
    }
    if total > MAX_TOTAL_QUBITS {
        return Err(AnalyticsError::TotalTooLarge { total });
    }
    let a_exp = accessible;
    let k_exp = total - accessible;
    let min_exp = a_exp.min(k_exp);
    if u64::from(min_exp) <= MAX_EXACT_TERMS.trailing_zeros() as u64 {
        let a = 2f64.powi(a_exp as i32);
        let k = 2f64.powi(k_exp as i32);
        let terms = 1u64 << min_exp;
        Ok(MeanCoherence {
            value: exact_mean(a, k, terms),
            method: EvalMethod::Exact,
            terms: Some(terms),
        })
    } else if a_exp >= k_exp {
        Ok(MeanCoherence {
            value: 1.0 - 2f64.powi(k_exp as i32 - a_exp as i32 - 2),
            method: EvalMethod::LinearAsymptote,
            terms: None,
        })
    } else {
        Ok(MeanCoherence {
            value: 0.0,
            method: EvalMethod::BelowResolution,
            terms: None,
        })
    }
}
