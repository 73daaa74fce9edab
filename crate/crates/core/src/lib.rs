//! Semi-classical Riemannian Brownian bridges on manifolds with a pole.
//!
//! The crate simulates the horizontal frame-bundle SDE of the bridge in the
//! global normal chart at the pole, evaluates Cameron–Martin directional
//! derivatives and divergence weights of cylindrical functionals along the
//! simulated frames, and checks the resulting integration-by-parts identity
//! and its supporting facts by Monte Carlo and finite differences.

pub mod config;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod pathspace;
pub mod report;
pub mod rng;
pub mod run;
pub mod sde;
pub mod verify;

pub use error::{Error, Result};
