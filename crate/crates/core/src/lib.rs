//! Projection-operator quantization of first-class constrained systems on
//! truncated Hilbert spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`operator`] builds Fock-basis and position-grid representations, coherent
//!   states and the dense/tridiagonal spectral primitives.
//! * [`projector`] turns a constraint operator into its physical-subspace
//!   projector `E` and the averaged approximations `F` (spectral window, sinc
//!   weight, interval average, compact Haar average), and certifies
//!   `||F - E|| <= 1/(L Delta)`.
//! * [`constraint`] holds the concrete constraint operators: the quartic
//!   oscillator constraint and the mixed-spectrum grid constraint.
//! * [`reparam`] evaluates the reparameterization-invariant free-particle
//!   kernels, each by quadrature and by closed form.
//! * [`elevation`] handles the elevated Lagrange multiplier sector and the
//!   tensor factorization of the projector.
//!
//! Conventions: `hbar = 1`; coherent states are
//! `<k|p,q> = pi^(-1/4) exp[-(k-p)^2/2 - i k q]` in the momentum
//! representation, so that `<x|p,q> = pi^(-1/4) exp[i p (x-q) - (x-q)^2/2]`.

pub mod constraint;
pub mod elevation;
pub mod error;
pub mod expm;
pub mod operator;
pub mod projector;
pub mod quadrature;
pub mod reparam;
pub mod special;
pub mod tridiag;

pub use num_complex::Complex64 as C64;

pub use constraint::{
    mixed_constraint, mixed_potential, quartic_constraint, zero_mode_report, SnapPolicy,
    ZeroModeReport,
};
pub use elevation::{
    factorization_residual, pi_sector_kernel, rank_one_report, RankOneReport, SectorPoint,
};
pub use error::{Error, Result};
pub use operator::{
    build_operator, coherent_state, eigendecompose, operator_norm, BasisSpec, GridSpec,
    OperatorExpr, OperatorMatrix, PhasePoint, Polynomial, Spectrum, StateVector,
};
pub use projector::{
    averaged_projector, bound_report, spectral_gap, spectral_projector, BoundReport, GapReport,
    ProjectorScheme,
};
pub use reparam::{
    extended_kernel, gram_matrix, propagation_residual, reduced_kernel, sharp_q_propagator,
    KernelValue, QuadratureSpec,
};
