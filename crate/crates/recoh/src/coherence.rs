//! Block structure of qubit-plus-environment states, the trace-norm measure
//! of recoverable coherence, and the measurement basis that attains it.
//!
//! States live on a 2A-dimensional space ordered qubit-major: basis index
//! `q * A + i` pairs qubit branch `q` with accessible-environment index `i`.
//! Writing the state in qubit blocks
//!
//! ```text
//!     rho = [ R0   X  ]
//!           [ X^H  R1 ]
//! ```
//!
//! the coherence recoverable by measuring the accessible factor is
//! `2 * ||X||_tr`, and it is attained by measuring in the eigenbasis of the
//! unitary polar factor of X.

use std::fmt;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::{ComplexMatrix, ComplexVector};

/// Maximum allowed deviation from exact Hermiticity.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Maximum allowed deviation of the trace from 1.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues may undershoot zero by at most this much.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Orthonormality tolerance for measurement bases.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Outcomes with probability below this are treated as impossible.
pub const OUTCOME_PROBABILITY_FLOOR: f64 = 1e-14;

/// Above this dimension, construction checks positivity only on the diagonal
/// instead of running a full eigendecomposition.
const FULL_SPECTRUM_CHECK_DIM: usize = 1024;

/// Errors from state validation and coherence evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum CoherenceError {
    NotSquare { rows: usize, cols: usize },
    NotHermitian { defect: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { eigenvalue: f64 },
    /// The state dimension does not equal 2 * accessible_dim.
    DimensionMismatch { dim: usize, accessible_dim: usize },
    NotNormalized { norm: f64 },
    NotOrthonormal { defect: f64 },
    OverlapTooLarge { magnitude: f64 },
    /// The measurement outcome has probability below the floor.
    OutcomeImpossible { probability: f64 },
    ZeroDimension,
}

impl fmt::Display for CoherenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoherenceError::NotSquare { rows, cols } => {
                write!(f, "matrix is {rows}x{cols}, expected square")
            }
            CoherenceError::NotHermitian { defect } => {
                write!(f, "Hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.0e}")
            }
            CoherenceError::TraceNotOne { trace } => {
                write!(f, "trace {trace} differs from 1 by more than {TRACE_TOL:.0e}")
            }
            CoherenceError::NotPositive { eigenvalue } => {
                write!(f, "eigenvalue {eigenvalue:.3e} below floor {EIGENVALUE_FLOOR:.0e}")
            }
            CoherenceError::DimensionMismatch { dim, accessible_dim } => write!(
                f,
                "state dimension {dim} does not equal 2 * accessible dimension {accessible_dim}"
            ),
            CoherenceError::NotNormalized { norm } => {
                write!(f, "vector norm {norm} is not 1 within tolerance")
            }
            CoherenceError::NotOrthonormal { defect } => {
                write!(f, "orthonormality defect {defect:.3e} exceeds {ORTHONORMALITY_TOL:.0e}")
            }
            CoherenceError::OverlapTooLarge { magnitude } => {
                write!(f, "overlap magnitude {magnitude} exceeds 1")
            }
            CoherenceError::OutcomeImpossible { probability } => {
                write!(f, "outcome probability {probability:.3e} is numerically zero")
            }
            CoherenceError::ZeroDimension => write!(f, "dimension must be at least 1"),
        }
    }
}

impl std::error::Error for CoherenceError {}

fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// A validated density operator: Hermitian, unit trace, positive.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix.
    ///
    /// Checks Hermiticity (1e-12), unit trace (1e-12) and positivity
    /// (eigenvalues >= -1e-10). Above dimension 1024 the positivity check
    /// falls back to the diagonal, since the operators produced by the
    /// samplers are Gram matrices and positive by construction.
    pub fn try_new(mat: ComplexMatrix) -> Result<Self, CoherenceError> {
        let (rows, cols) = (mat.nrows(), mat.ncols());
        if rows != cols {
            return Err(CoherenceError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(CoherenceError::ZeroDimension);
        }
        let defect = hermiticity_defect(&mat);
        if !(defect <= HERMITICITY_TOL) {
            return Err(CoherenceError::NotHermitian { defect });
        }
        let trace = mat.trace().re;
        if !((trace - 1.0).abs() <= TRACE_TOL) {
            return Err(CoherenceError::TraceNotOne { trace });
        }
        if rows <= FULL_SPECTRUM_CHECK_DIM {
            let eig = SymmetricEigen::new(mat.clone());
            for &v in eig.eigenvalues.iter() {
                if !(v >= EIGENVALUE_FLOOR) {
                    return Err(CoherenceError::NotPositive { eigenvalue: v });
                }
            }
        } else {
            for i in 0..rows {
                let d = mat[(i, i)].re;
                if !(d >= EIGENVALUE_FLOOR) {
                    return Err(CoherenceError::NotPositive { eigenvalue: d });
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.mat
    }
}

/// Qubit-block view of a state: conditional environment blocks R0, R1 and
/// the cross block X.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    r0: ComplexMatrix,
    r1: ComplexMatrix,
    cross: ComplexMatrix,
}

impl BlockDecomposition {
    /// Accessible-environment dimension A.
    pub fn accessible_dim(&self) -> usize {
        self.r0.nrows()
    }

    /// Block paired with qubit branch 0.
    pub fn r0(&self) -> &ComplexMatrix {
        &self.r0
    }

    /// Block paired with qubit branch 1.
    pub fn r1(&self) -> &ComplexMatrix {
        &self.r1
    }

    /// Upper-right cross block carrying all recoverable coherence.
    pub fn cross(&self) -> &ComplexMatrix {
        &self.cross
    }

    /// Rebuilds the full 2A x 2A matrix from the blocks.
    pub fn reassemble(&self) -> ComplexMatrix {
        let a = self.accessible_dim();
        let mut m = ComplexMatrix::zeros(2 * a, 2 * a);
        for i in 0..a {
            for j in 0..a {
                m[(i, j)] = self.r0[(i, j)];
                m[(i, a + j)] = self.cross[(i, j)];
                m[(a + i, j)] = self.cross[(j, i)].conj();
                m[(a + i, a + j)] = self.r1[(i, j)];
            }
        }
        m
    }
}

/// Splits a 2A-dimensional state into its qubit blocks.
pub fn decompose_blocks(
    rho: &DensityMatrix,
    accessible_dim: usize,
) -> Result<BlockDecomposition, CoherenceError> {
    let dim = rho.dim();
    if accessible_dim == 0 {
        return Err(CoherenceError::ZeroDimension);
    }
    if dim != 2 * accessible_dim {
        return Err(CoherenceError::DimensionMismatch { dim, accessible_dim });
    }
    let a = accessible_dim;
    let m = rho.matrix();
    Ok(BlockDecomposition {
        r0: m.view((0, 0), (a, a)).into_owned(),
        r1: m.view((a, a), (a, a)).into_owned(),
        cross: m.view((0, a), (a, a)).into_owned(),
    })
}

/// Hermitian dilation `[[0, M], [M^H, 0]]`, whose eigenvalues are the
/// singular values of M in plus/minus pairs.
fn dilation(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.nrows();
    let mut t = ComplexMatrix::zeros(2 * n, 2 * n);
    t.view_mut((0, n), (n, n)).copy_from(m);
    t.view_mut((n, 0), (n, n)).copy_from(&m.adjoint());
    t
}

/// Trace norm: the sum of singular values.
///
/// Computed as half the absolute-eigenvalue sum of the Hermitian dilation.
/// The bidiagonal SVD produced inaccurate singular values for some
/// rank-deficient inputs, so this and the polar factor below rely on the
/// symmetric eigensolver only.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64, CoherenceError> {
    if m.nrows() != m.ncols() {
        return Err(CoherenceError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(CoherenceError::ZeroDimension);
    }
    let eig = SymmetricEigen::new(dilation(m));
    Ok(eig.eigenvalues.iter().map(|v| v.abs()).sum::<f64>() / 2.0)
}

/// Coherence recoverable by the best measurement of the accessible factor:
/// `2 * ||X||_tr` for the cross block X.
pub fn recoverable_coherence(
    rho: &DensityMatrix,
    accessible_dim: usize,
) -> Result<f64, CoherenceError> {
    let blocks = decompose_blocks(rho, accessible_dim)?;
    Ok(2.0 * trace_norm(blocks.cross())?)
}

/// Recoverable coherence of a qubit entangled with two fixed environment
/// states: amplitudes alpha, beta against branch states whose inner product
/// is `overlap`. Equals `2 |alpha conj(beta) overlap|`.
pub fn pure_pair_coherence(
    alpha: Complex64,
    beta: Complex64,
    overlap: Complex64,
) -> Result<f64, CoherenceError> {
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(CoherenceError::NotNormalized { norm });
    }
    let magnitude = overlap.norm();
    if magnitude > 1.0 + 1e-12 {
        return Err(CoherenceError::OverlapTooLarge { magnitude });
    }
    Ok(2.0 * (alpha * beta.conj() * overlap).norm())
}

/// Orthonormal measurement basis on the accessible factor.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    columns: ComplexMatrix,
}

impl MeasurementBasis {
    /// Wraps a matrix whose columns are the basis vectors, checking
    /// orthonormality within 1e-10.
    pub fn try_new(columns: ComplexMatrix) -> Result<Self, CoherenceError> {
        if columns.nrows() != columns.ncols() {
            return Err(CoherenceError::NotSquare {
                rows: columns.nrows(),
                cols: columns.ncols(),
            });
        }
        if columns.nrows() == 0 {
            return Err(CoherenceError::ZeroDimension);
        }
        let gram = columns.adjoint() * &columns;
        let mut defect: f64 = 0.0;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((gram[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        if defect > ORTHONORMALITY_TOL {
            return Err(CoherenceError::NotOrthonormal { defect });
        }
        Ok(Self { columns })
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    /// The j-th basis vector.
    pub fn vector(&self, j: usize) -> ComplexVector {
        self.columns.column(j).into_owned()
    }

    pub fn columns(&self) -> &ComplexMatrix {
        &self.columns
    }
}

/// Eigenbasis of a unitary matrix, using only Hermitian eigensolvers.
///
/// U is normal, so its Hermitian and anti-Hermitian parts commute and share
/// eigenspaces with it. Stage 1 diagonalises Re U and clusters
/// near-degenerate eigenvalues; stage 2 splits each cluster by Im U; stage 3
/// splits what remains (eigenphase pairs symmetric about the imaginary
/// axis of the cluster phase) by a quarter-turn-rotated Hermitian part.
/// Pairs still together after that are genuine degeneracies, where any
/// orthonormal completion is an eigenbasis.
fn unitary_eigenbasis(u: &ComplexMatrix) -> ComplexMatrix {
    const STAGE1_CLUSTER_TOL: f64 = 1e-4;
    const STAGE2_CLUSTER_TOL: f64 = 1e-7;

    let n = u.nrows();
    if n == 1 {
        return ComplexMatrix::identity(1, 1);
    }

    let half = Complex64::new(0.5, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5);
    let h1 = (u + u.adjoint()) * half;
    let h2 = (u - u.adjoint()) * minus_half_i;

    // Stage 1: eigenbasis of the Hermitian part, sorted by eigenvalue.
    let eig1 = SymmetricEigen::new(h1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig1.eigenvalues[i].partial_cmp(&eig1.eigenvalues[j]).unwrap());
    let mut basis = ComplexMatrix::zeros(n, n);
    let mut values = vec![0.0; n];
    for (col, &idx) in order.iter().enumerate() {
        basis.set_column(col, &eig1.eigenvectors.column(idx));
        values[col] = eig1.eigenvalues[idx];
    }

    for (start, len) in clusters(&values, STAGE1_CLUSTER_TOL) {
        if len < 2 {
            continue;
        }
        // Stage 2: split the cluster by the anti-Hermitian part.
        let q = basis.columns(start, len).into_owned();
        let restricted = hermitian_part(&(q.adjoint() * &h2 * &q));
        let eig2 = SymmetricEigen::new(restricted);
        let mut inner: Vec<usize> = (0..len).collect();
        inner.sort_by(|&i, &j| eig2.eigenvalues[i].partial_cmp(&eig2.eigenvalues[j]).unwrap());
        let mut sub_values = vec![0.0; len];
        let mut rotation = ComplexMatrix::zeros(len, len);
        for (col, &idx) in inner.iter().enumerate() {
            rotation.set_column(col, &eig2.eigenvectors.column(idx));
            sub_values[col] = eig2.eigenvalues[idx];
        }
        let rotated = &q * &rotation;
        for col in 0..len {
            basis.set_column(start + col, &rotated.column(col));
        }

        for (sub_start, sub_len) in clusters(&sub_values, STAGE2_CLUSTER_TOL) {
            if sub_len < 2 {
                continue;
            }
            // Stage 3: both Re and Im coincide across the sub-cluster, which
            // happens either for a true degeneracy or for eigenphases placed
            // symmetrically about the cluster phase. A Hermitian part taken
            // after rotating the phase by a quarter turn separates the
            // symmetric pair and leaves true degeneracies alone.
            let qs = basis.columns(start + sub_start, sub_len).into_owned();
            let m = qs.adjoint() * u * &qs;
            let trace = m.trace();
            let theta = trace.arg();
            let phase = Complex64::from_polar(1.0, -(theta + std::f64::consts::FRAC_PI_4));
            let h3 = hermitian_part(&(m * phase));
            let eig3 = SymmetricEigen::new(h3);
            let mut inner3: Vec<usize> = (0..sub_len).collect();
            inner3.sort_by(|&i, &j| {
                eig3.eigenvalues[i].partial_cmp(&eig3.eigenvalues[j]).unwrap()
            });
            let mut rot3 = ComplexMatrix::zeros(sub_len, sub_len);
            for (col, &idx) in inner3.iter().enumerate() {
                rot3.set_column(col, &eig3.eigenvectors.column(idx));
            }
            let rotated3 = &qs * &rot3;
            for col in 0..sub_len {
                basis.set_column(start + sub_start + col, &rotated3.column(col));
            }
        }
    }
    basis
}

/// Runs of consecutive sorted values whose neighbouring gaps stay within tol.
fn clusters(sorted: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            out.push((start, i - start));
            start = i;
        }
    }
    out
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Modified Gram-Schmidt in place, preserving each column's phase. Inputs
/// are already orthonormal up to small defects; this polishes them to
/// solver precision.
fn orthonormalize_columns(m: &mut ComplexMatrix) {
    for j in 0..m.ncols() {
        for i in 0..j {
            let qi = m.column(i).into_owned();
            let coeff = qi.dotc(&m.column(j).into_owned());
            let scaled = qi * coeff;
            let mut cj = m.column_mut(j);
            cj -= &scaled;
        }
        let norm = m.column(j).norm();
        m.column_mut(j).unscale_mut(norm);
    }
}

/// Orthonormal basis of the orthogonal complement of the given orthonormal
/// columns, extracted by pivoted QR of the complement projector.
fn complement_columns(basis: &ComplexMatrix) -> ComplexMatrix {
    let n = basis.nrows();
    let r = basis.ncols();
    let mut projector = ComplexMatrix::identity(n, n);
    projector -= basis * basis.adjoint();
    let q = projector.col_piv_qr().q();
    q.columns(0, n - r).into_owned()
}

/// Unitary polar factor of a square matrix, or `None` when the matrix is
/// numerically zero.
///
/// A dilation eigenvector (x, y) with eigenvalue sigma > 0 yields a singular
/// pair v = x/|x|, w = y/|y| with `M w = sigma v`; the factor maps each w to
/// its v and is completed unitarily on the null space, so `M = U H` with H
/// positive semidefinite. Both singular-vector families come out of one
/// orthonormal eigenbasis and need only a phase-preserving polish.
fn polar_unitary(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(dilation(m));
    let sigma_max = eig.eigenvalues.amax();
    if !(sigma_max > 1e-300) {
        return None;
    }
    let cut = sigma_max * 1e-12;
    let mut kept: Vec<usize> = (0..2 * n).filter(|&i| eig.eigenvalues[i] > cut).collect();
    kept.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    kept.truncate(n);
    let rank = kept.len();

    let mut v = ComplexMatrix::zeros(n, rank);
    let mut w = ComplexMatrix::zeros(n, rank);
    for (col, &idx) in kept.iter().enumerate() {
        let full = eig.eigenvectors.column(idx);
        let x = full.rows(0, n).into_owned();
        let y = full.rows(n, n).into_owned();
        v.set_column(col, &x.unscale(x.norm()));
        w.set_column(col, &y.unscale(y.norm()));
    }
    orthonormalize_columns(&mut v);
    orthonormalize_columns(&mut w);

    if rank < n {
        let mut v_full = ComplexMatrix::zeros(n, n);
        v_full.view_mut((0, 0), (n, rank)).copy_from(&v);
        v_full
            .view_mut((0, rank), (n, n - rank))
            .copy_from(&complement_columns(&v));
        let mut w_full = ComplexMatrix::zeros(n, n);
        w_full.view_mut((0, 0), (n, rank)).copy_from(&w);
        w_full
            .view_mut((0, rank), (n, n - rank))
            .copy_from(&complement_columns(&w));
        Some(&v_full * w_full.adjoint())
    } else {
        Some(&v * w.adjoint())
    }
}

/// Measurement basis attaining the recoverable coherence: the eigenbasis of
/// the unitary polar factor of the cross block.
///
/// For a rank-deficient cross block the unitary completion on the null
/// space is one valid choice among many; for a numerically zero block any
/// basis attains the (zero) bound and the standard basis is returned.
pub fn optimal_erasure_basis(cross: &ComplexMatrix) -> Result<MeasurementBasis, CoherenceError> {
    if cross.nrows() != cross.ncols() {
        return Err(CoherenceError::NotSquare {
            rows: cross.nrows(),
            cols: cross.ncols(),
        });
    }
    let a = cross.nrows();
    if a == 0 {
        return Err(CoherenceError::ZeroDimension);
    }
    match polar_unitary(cross) {
        None => MeasurementBasis::try_new(ComplexMatrix::identity(a, a)),
        Some(factor) => MeasurementBasis::try_new(unitary_eigenbasis(&factor)),
    }
}

/// Qubit state conditioned on one measurement outcome of the accessible
/// factor, along with the outcome probability.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalQubitState {
    probability: f64,
    state: ComplexMatrix,
}

impl ConditionalQubitState {
    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// The conditional 2x2 qubit state.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.state
    }
}

/// Conditions the qubit on outcome `outcome` of an accessible-factor
/// measurement: probability `<u|R0|u> + <u|R1|u>` and the renormalised 2x2
/// state built from the blocks.
pub fn conditional_qubit_state(
    blocks: &BlockDecomposition,
    outcome: &ComplexVector,
) -> Result<ConditionalQubitState, CoherenceError> {
    let a = blocks.accessible_dim();
    if outcome.len() != a {
        return Err(CoherenceError::DimensionMismatch {
            dim: outcome.len(),
            accessible_dim: a,
        });
    }
    let norm = outcome.norm();
    if (norm - 1.0).abs() > ORTHONORMALITY_TOL {
        return Err(CoherenceError::NotNormalized { norm });
    }
    let p0 = outcome.dotc(&(blocks.r0() * outcome)).re;
    let p1 = outcome.dotc(&(blocks.r1() * outcome)).re;
    let x = outcome.dotc(&(blocks.cross() * outcome));
    let probability = p0 + p1;
    if probability < OUTCOME_PROBABILITY_FLOOR {
        return Err(CoherenceError::OutcomeImpossible { probability });
    }
    let mut state = ComplexMatrix::zeros(2, 2);
    state[(0, 0)] = Complex64::new(p0 / probability, 0.0);
    state[(1, 1)] = Complex64::new(p1 / probability, 0.0);
    state[(0, 1)] = x / probability;
    state[(1, 0)] = (x / probability).conj();
    Ok(ConditionalQubitState { probability, state })
}

/// Coherence of a 2x2 state: twice the off-diagonal magnitude.
pub fn qubit_coherence(rho2: &ComplexMatrix) -> Result<f64, CoherenceError> {
    if rho2.nrows() != 2 || rho2.ncols() != 2 {
        return Err(CoherenceError::NotSquare {
            rows: rho2.nrows(),
            cols: rho2.ncols(),
        });
    }
    let defect = hermiticity_defect(rho2);
    if defect > HERMITICITY_TOL {
        return Err(CoherenceError::NotHermitian { defect });
    }
    let trace = rho2.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(CoherenceError::TraceNotOne { trace });
    }
    // 2x2 positivity: non-negative diagonal and determinant.
    let det = rho2[(0, 0)].re * rho2[(1, 1)].re - rho2[(0, 1)].norm_sqr();
    if rho2[(0, 0)].re < EIGENVALUE_FLOOR
        || rho2[(1, 1)].re < EIGENVALUE_FLOOR
        || det < EIGENVALUE_FLOOR
    {
        return Err(CoherenceError::NotPositive { eigenvalue: det });
    }
    Ok(2.0 * rho2[(0, 1)].norm())
}

/// Probability-weighted average of the conditional qubit coherences over a
/// measurement basis. Outcomes below the probability floor contribute 0.
///
/// For the basis from [`optimal_erasure_basis`] this equals the recoverable
/// coherence; for any other orthonormal basis it cannot exceed it.
pub fn average_conditional_coherence(
    rho: &DensityMatrix,
    accessible_dim: usize,
    basis: &MeasurementBasis,
) -> Result<f64, CoherenceError> {
    let blocks = decompose_blocks(rho, accessible_dim)?;
    if basis.dim() != accessible_dim {
        return Err(CoherenceError::DimensionMismatch {
            dim: basis.dim(),
            accessible_dim,
        });
    }
    let mut total = 0.0;
    for j in 0..basis.dim() {
        let outcome = basis.vector(j);
        match conditional_qubit_state(&blocks, &outcome) {
            Ok(cond) => {
                // p_j * C(rho_j) = 2 |<u_j|X|u_j>|
                total += cond.probability() * 2.0 * cond.matrix()[(0, 1)].norm();
            }
            Err(CoherenceError::OutcomeImpossible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}
