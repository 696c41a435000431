//! Tension-tuned compliant joint.
//!
//! The joint's exact torque law is reduced to a Duffing oscillator whose
//! periodic response is predicted three ways: harmonic balance
//! ([`harmonic_balance`]), a truncated Volterra series ([`volterra`]) and
//! direct integration ([`simulator`]).
//!
//! ```
//! use duffjoint::{critical_tension, duffing_coeffs, solve_amplitudes, Forcing, JointParams};
//!
//! let joint = JointParams::reference();
//! let f_star = critical_tension(&joint);
//! let coeffs = duffing_coeffs(0.8 * f_star, &joint).unwrap();
//! let forcing = Forcing::from_hz(joint.reference_q0(), 1.5).unwrap();
//! let roots = solve_amplitudes(&coeffs, &forcing).unwrap();
//! assert_eq!(roots.len(), 1);
//! ```

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod config;
pub mod cubic;
pub mod error;
pub mod export;
pub mod harmonic_balance;
pub mod joint;
pub mod ode;
pub mod optimize;
pub mod signal;
pub mod simulator;
pub mod volterra;
pub mod wake;

pub use error::{Error, Result};
pub use harmonic_balance::{
    amplitude_polynomial, duffing_coeffs, line_of_maxima, observed_amplitude, response_surface,
    solve_amplitudes, AmplitudePolynomial, AmplitudeRoot, AmplitudeSurface, DuffingCoeffs, Forcing,
    MaximaLine, MaximaPoint, SurfaceModel, SurfaceSpec,
};
pub use joint::{
    critical_tension, derive_geometry, optimal_linear_tension, taylor_coeffs, torque, validity_angle,
    DerivedGeometry, JointParams, TaylorSeries, ValidityAngle, ValidityConfig,
};
pub use signal::{analytic_envelope, harmonic_amplitudes, SampledSignal};
pub use simulator::{simulate, simulate_duffing, steady_state_amplitude, SimConfig, TorqueModel, Trajectory};
pub use volterra::{
    h1, kernel, multi_tone_spectrum, single_tone_response, KernelContext, OutputSpectrum, SpectrumLine,
};
pub use wake::{wake_to_forcing, WakeCalibration, WakeParams};

#[cfg(test)]
mod tests;
