//! Seeded ensemble sampling: complex Gaussian matrices, induced-measure
//! density operators, Haar-random pure states and unitaries, and the partial
//! trace connecting them.
//!
//! Every sampler takes an [`RngStream`], a value describing one reproducible
//! random stream. The same stream always replays the same draws, and
//! distinct stream indices under one seed are statistically independent, so
//! parallel experiments can hand stream `i` to sample `i` and stay
//! deterministic regardless of scheduling.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::coherence::{CoherenceError, DensityMatrix};
use crate::{ComplexMatrix, ComplexVector};

/// Largest number of complex entries a single draw may allocate.
pub const MAX_DRAW_ENTRIES: u128 = 1 << 26;

/// A reproducible random stream: a base seed plus a stream index.
///
/// The pair fully determines the draw sequence. Samplers consume a fixed
/// number of draws per call (documented on each), so a stream handed to one
/// call is unaffected by any other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

impl RngStream {
    /// Stream 0 of the given seed.
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Stream `index` of the given seed; independent streams for parallel work.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self {
            seed,
            stream: index,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream
    }

    fn generator(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Haar-random pure state: a unit-norm complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Wraps a vector after checking unit norm (tolerance 1e-12).
    pub fn try_new(amplitudes: ComplexVector) -> Result<Self, SampleError> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(SampleError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }
}

/// Errors from the sampling layer.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleError {
    /// A requested dimension was zero.
    ZeroDimension,
    /// The draw would allocate more than [`MAX_DRAW_ENTRIES`] complex entries.
    TooLarge { entries: u128 },
    /// The kept factor does not divide the state dimension.
    NotDivisible { dim: usize, keep: usize },
    /// A vector that must be unit norm is not.
    NotNormalized { norm: f64 },
    /// A draw with numerically zero norm cannot be normalised.
    ZeroNorm,
    /// A sampled operator failed a density-matrix invariant.
    InvalidDensity(CoherenceError),
}

impl fmt::Display for SampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleError::ZeroDimension => write!(f, "dimensions must be at least 1"),
            SampleError::TooLarge { entries } => write!(
                f,
                "draw of {entries} complex entries exceeds the limit of {MAX_DRAW_ENTRIES}"
            ),
            SampleError::NotDivisible { dim, keep } => {
                write!(f, "kept dimension {keep} does not divide state dimension {dim}")
            }
            SampleError::NotNormalized { norm } => {
                write!(f, "state norm {norm} is not 1 within 1e-12")
            }
            SampleError::ZeroNorm => write!(f, "draw has numerically zero norm"),
            SampleError::InvalidDensity(e) => write!(f, "sampled operator invalid: {e}"),
        }
    }
}

impl std::error::Error for SampleError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SampleError::InvalidDensity(e) => Some(e),
            _ => None,
        }
    }
}

impl From<CoherenceError> for SampleError {
    fn from(e: CoherenceError) -> Self {
        SampleError::InvalidDensity(e)
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<(), SampleError> {
    if rows == 0 || cols == 0 {
        return Err(SampleError::ZeroDimension);
    }
    let entries = rows as u128 * cols as u128;
    if entries > MAX_DRAW_ENTRIES {
        return Err(SampleError::TooLarge { entries });
    }
    Ok(())
}

/// Fills a rows x cols matrix with standard complex Gaussian entries,
/// consuming exactly 2*rows*cols real normals in row-major order.
fn fill_gaussian(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    m
}

/// Matrix with independent standard complex Gaussian entries: real and
/// imaginary parts are each unit-variance normals, so E|entry|^2 = 2.
///
/// Consumes exactly `2 * rows * cols` draws from the stream.
pub fn sample_complex_gaussian(
    rows: usize,
    cols: usize,
    stream: RngStream,
) -> Result<ComplexMatrix, SampleError> {
    check_dims(rows, cols)?;
    let mut rng = stream.generator();
    Ok(fill_gaussian(&mut rng, rows, cols))
}

/// Density operator induced on the qubit + accessible factor by a
/// Haar-random pure state of the full register: for a 2A x K Gaussian draw
/// G, returns G G^H / tr(G G^H).
pub fn sample_induced_density(
    accessible_dim: usize,
    inaccessible_dim: usize,
    stream: RngStream,
) -> Result<DensityMatrix, SampleError> {
    if accessible_dim == 0 || inaccessible_dim == 0 {
        return Err(SampleError::ZeroDimension);
    }
    let g = sample_complex_gaussian(2 * accessible_dim, inaccessible_dim, stream)?;
    let total = g.norm_squared();
    if total <= 0.0 {
        return Err(SampleError::ZeroNorm);
    }
    let rho = (&g * g.adjoint()).unscale(total);
    Ok(DensityMatrix::try_new(rho)?)
}

/// Haar-random unit vector of the given dimension.
///
/// Consumes exactly `2 * dim` draws from the stream.
pub fn sample_haar_pure(dim: usize, stream: RngStream) -> Result<PureState, SampleError> {
    let g = sample_complex_gaussian(dim, 1, stream)?;
    let norm = g.norm();
    if norm <= 0.0 {
        return Err(SampleError::ZeroNorm);
    }
    let amplitudes = ComplexVector::from_column_slice(g.as_slice()).unscale(norm);
    PureState::try_new(amplitudes)
}

/// Reduced state on the leading factor of dimension `keep_dim`; the trailing
/// factor of dimension `dim / keep_dim` is traced out.
///
/// Amplitude layout is row-major over (kept, traced): index `i * env + e`.
pub fn partial_trace(state: &PureState, keep_dim: usize) -> Result<DensityMatrix, SampleError> {
    let dim = state.dim();
    if keep_dim == 0 {
        return Err(SampleError::ZeroDimension);
    }
    if dim % keep_dim != 0 {
        return Err(SampleError::NotDivisible { dim, keep: keep_dim });
    }
    let env = dim / keep_dim;
    // Reshape the amplitudes into a keep x env matrix M; the reduced state is M M^H.
    let mut m = DMatrix::zeros(keep_dim, env);
    for i in 0..keep_dim {
        for e in 0..env {
            m[(i, e)] = state.amplitudes()[i * env + e];
        }
    }
    let rho = &m * m.adjoint();
    Ok(DensityMatrix::try_new(rho)?)
}

/// Product M = G1 G2^H of two independent A x K standard complex Gaussian
/// draws: the raw cross-block ensemble before normalisation.
///
/// Consumes exactly `4 * a_dim * k_dim` draws (both factors) from the stream.
pub fn sample_cross_product(
    a_dim: usize,
    k_dim: usize,
    stream: RngStream,
) -> Result<ComplexMatrix, SampleError> {
    check_dims(a_dim, k_dim)?;
    let entries = 2 * a_dim as u128 * k_dim as u128;
    if entries > MAX_DRAW_ENTRIES {
        return Err(SampleError::TooLarge { entries });
    }
    let mut rng = stream.generator();
    let g1 = fill_gaussian(&mut rng, a_dim, k_dim);
    let g2 = fill_gaussian(&mut rng, a_dim, k_dim);
    Ok(&g1 * g2.adjoint())
}

/// Haar-distributed random unitary: QR of a Gaussian draw with the R-diagonal
/// phases absorbed into Q so the distribution is exactly invariant.
pub fn haar_unitary(dim: usize, stream: RngStream) -> Result<ComplexMatrix, SampleError> {
    let g = sample_complex_gaussian(dim, dim, stream)?;
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag > 0.0 {
            let phase = d.unscale(mag);
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(q)
}
