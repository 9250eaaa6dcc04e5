//! Spectral analysis of 2x2 canonical systems `J Y' + Q Y = lambda Y` with a
//! real symmetric pi-periodic potential `Q`.
//!
//! The fundamental matrix `Y(z, lambda)` starts at the identity; its value at
//! `z = pi` is the monodromy matrix whose trace is the discriminant.

pub mod asymptotics;
pub mod error;
pub mod inverse;
pub mod linalg;
pub mod monodromy;
pub mod ode;
pub mod potential;
pub mod prufer;
pub mod quadrature;
pub mod roots;
pub mod selftest;
pub mod spectra;

pub use error::{Result, SpectralError};
pub use linalg::{Mat2, SymmetricMatrix2};
pub use monodromy::{IntegratorOptions, Monodromy};
pub use potential::{GaugeAngle, PotentialSpec, ScalarFunction, TraceSplit, TrigPoly};
