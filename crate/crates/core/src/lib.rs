//! Participation-factor analysis of nonlinear dynamical systems.
//!
//! The pipeline runs from a [`QuadraticModel`] (second-order Taylor
//! truncation of `x' = f(x)`) through the [`ModalBasis`] of its state
//! matrix and the second-order normal form [`SecondOrderNF`] to linear,
//! nonlinear and time-variant participation factors. [`simkit`] integrates
//! the model directly and serves as an independent check on the modal
//! reconstruction.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bundled;
pub mod error;
pub mod modal;
pub mod normalform;
pub mod participation;
pub mod simkit;
pub mod sysmodel;
pub mod tensor;

pub use error::{Error, Result};
pub use modal::{contribution_factors, decompose, linear_pf, ModalBasis};
pub use normalform::{
    h2_coefficients, invert_initial_condition, reconstruct_response, second_order_coeffs,
    ResonantTriple, SecondOrderNF, DEFAULT_DENOM_TOL,
};
pub use num_complex::Complex64;
pub use participation::{
    convolve_at, extended_pf, nonlinear_modes, nonlinear_pf, pf_spectrum, rank_states,
    tnpf_profile, tnpf_terms, Band, ParticipationSet, PfSpectrum, TnpfConfig, TnpfTerms,
    DEFAULT_SIGMA_HZ,
};
pub use simkit::{dominant_frequencies, integrate, reconstruction_error, Trajectory};
pub use sysmodel::{
    build_swing_model, quadratize_finite_diff, solve_equilibrium, LoadedModel, ModelFile,
    QuadraticModel, SwingParams, SwingSystem, VectorField,
};
pub use tensor::Tensor3;
