//! Convex quasi-linear quantum time evolution.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, exponentials and Hermitian eigensolves.
//! * [`state`]: density matrices, Bloch vectors and state vectors.
//! * [`quasilinear`]: Kraus families, the normalized (trace-divided) map and the
//!   ensemble-coefficient law.
//! * [`dynamics`]: the nonlinear GKSL generator, RK4 integration and the
//!   closed-form propagator for vanishing Lindblad operators.
//! * [`qubit`]: closed-form two-level solutions used as oracles.
//! * [`models`]: Jaynes-Cummings blocks, Dirac spin in constant fields and
//!   solar-neutrino flavor evolution.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod policy;
pub mod quasilinear;
pub mod qubit;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianSpectrum};
pub use policy::NumericPolicy;
pub use state::{BlochVector, DensityMatrix, StateVector};

/// Complex scalar used throughout.
pub use num_complex::Complex64;
/// Real 3-vector used for Bloch vectors and field directions.
pub type Vec3 = nalgebra::Vector3<f64>;
