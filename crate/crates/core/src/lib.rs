//! q-calculus numerics: q-special functions, q-derivatives, Laplace and
//! Mellin transforms of q-derivatives, and Fourier spectral solvers for the
//! q-diffusion, q-wave and n-th order q-evolution equations.
//!
//! Every operation takes a [`QParameter`] (a base `0 < q < 1`) and, where a
//! series or product is truncated, a [`SeriesControl`].  Fallible operations
//! return [`QError`]; nothing panics on bad input.

mod dd;

pub mod error;
pub mod eval;
pub mod grid;
pub mod oracle;
pub mod param;
pub mod profiles;
pub mod qderiv;
pub mod quad;
pub mod solvers;
pub mod special;
pub mod transforms;
pub mod verify;

pub use error::{QError, Result};
pub use eval::{ComplexEvaluable, Evaluable, SpaceTimeField, WithTaylor};
pub use grid::{GridFunction, GridSpec, SpectralField, FOURIER_CONVENTION};
pub use param::{QParameter, SeriesControl};
pub use profiles::{Profile, ProfileError};
pub use qderiv::{dq, dq_forward, dq_forward_power, dq_power, dq_standard, dq_standard_power, QDerivative};
pub use solvers::{
    solve_q_diffusion, solve_q_nth, solve_q_wave, Diagnostics, DiffusionProblem, NthOrderProblem, SolveReport,
    SpectralSolution, WaveProblem,
};
pub use special::{
    q_cos, q_cos_real, q_exp, q_exp_auto, q_exp_with, q_gamma, q_gamma_real, q_gamma_residue, q_number,
    q_number_complex, q_pochhammer_inf, q_pow, q_shifted_factorial, q_sin, q_sin_cos, q_sin_cos_real, q_sin_real,
    ExpMethod, Truncated,
};
pub use transforms::{
    fourier_forward, fourier_inverse, inverse_mellin_qgamma_kernel, laplace_numeric, laplace_of_dq_rhs,
    mellin_numeric, mellin_of_dq_power_rhs, DecayCheck, TransformValue,
};
