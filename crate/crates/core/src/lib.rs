//! Escape of a quantum Brownian particle from a metastable well.
//!
//! The pipeline: a Lorentzian heat bath with exponential memory kernel
//! ([`bath`]) drives a particle in a cubic potential ([`potential`]).
//! Relaxation functions of the linearized dynamics are built by exact
//! partial-fraction inversion ([`resolvent`]), the lowest-order quantum
//! dispersion of the system adds a c-number forcing ([`dispersion`]),
//! variances of the mean position/velocity follow from the
//! fluctuation-dissipation relation ([`moments`]), and the time-dependent
//! Fokker-Planck coefficients with their long-time limits ([`fpcoeffs`])
//! feed the flux-over-population barrier-crossing rate ([`rate`]).
//! An independent stochastic integrator ([`sim`]) provides first-passage
//! rates for cross-validation.

pub mod bath;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod expsum;
pub mod fpcoeffs;
pub mod moments;
pub mod potential;
pub mod quad;
pub mod rate;
pub mod resolvent;
pub mod sim;
pub mod stats;

pub use bath::{BathSpec, FdrMode};
pub use config::Config;
pub use dispersion::FluctuationState;
pub use error::Error;
pub use expsum::ExpSum;
pub use fpcoeffs::{AsymptoticCoefficients, FpCoefficients};
pub use moments::VarianceSet;
pub use potential::CubicPotential;
pub use rate::{RateFormula, RateResult, TransmissionParams};
pub use resolvent::{Region, Relaxation};
pub use sim::{FptEstimate, SimConfig};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
