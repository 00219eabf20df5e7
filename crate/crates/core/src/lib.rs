//! Simulation library for strings of entangled photons emitted by a driven
//! optical transition whose qubit is periodically mapped onto a nuclear spin.
//!
//! The crate is organized bottom-up:
//! - [`statevec`]: dense state vectors and density matrices over labeled
//!   two-level subsystems, with the gate, projection, and factorization
//!   primitives everything else is built from.
//! - [`nvmodel`]: the emitter-specific operations (bright/dark filtering,
//!   photon emission, re-excitation).
//! - [`noise`]: gate angle errors and quasi-static dephasing baths.
//! - [`protocol`]: the cycle-based generation protocol, sequence calibration,
//!   ideal targets, and fidelity curves.
//! - [`stats`]: event-rate and chain-length statistics.
//!
//! Everything is deterministic given a seed: all randomness flows through
//! caller-provided RNGs or named streams derived in [`rng`].

pub mod error;
pub mod noise;
pub mod nvmodel;
pub mod protocol;
pub mod rng;
pub mod statevec;
pub mod stats;

pub use error::{Error, Result};
