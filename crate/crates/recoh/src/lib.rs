//! Numerics for the recoverable coherence of a qubit coupled to a partially
//! accessible environment.
//!
//! A register holding one qubit plus an environment is split into an
//! accessible factor of dimension `A` and an inaccessible factor of
//! dimension `K`. Measuring the accessible factor in the right basis
//! recovers qubit coherence that naive tracing would discard; this crate
//! samples that ensemble, computes the optimal measurement, and evaluates
//! the exact ensemble means alongside their asymptotic forms.
//!
//! - [`sampling`]: seeded Gaussian / induced-measure / Haar ensembles.
//! - [`coherence`]: block decomposition, trace-norm coherence, and the
//!   measurement basis that attains it.
//! - [`analytics`]: exact series for the ensemble mean plus closed forms
//!   and asymptotes.
//! - [`experiments`]: deterministic Monte Carlo harness, partition sweeps,
//!   figure tables, and cross-validation.

pub mod analytics;
pub mod coherence;
pub mod experiments;
pub mod sampling;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex matrix used throughout.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

pub use coherence::{
    average_conditional_coherence, decompose_blocks, optimal_erasure_basis, qubit_coherence,
    recoverable_coherence, trace_norm, BlockDecomposition, ConditionalQubitState, DensityMatrix,
    MeasurementBasis,
};
pub use sampling::{PureState, RngStream};
