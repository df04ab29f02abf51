//! Simulator for undoing an unknown single-qubit unitary by gate teleportation.
//!
//! A singlet resource carries the black-box unitary `U` on one half; a Bell
//! measurement against the input qubit leaves the other half in
//! `U⁻¹XⁱZʲ|φ⟩`. Outcome `(0, 0)` heralds the exact inverse, other outcomes
//! are undone with one more query and the round restarts.
//!
//! Modules:
//! - [`qmath`]: small dense complex matrices, states, Kronecker products.
//! - [`protocol`]: the oracle, Bell measurement and the repeat-until-success loop.
//! - [`noise`]: depolarizing surrogate noise and its calibration.
//! - [`tomography`]: process tomography with maximum-likelihood reconstruction.
//! - [`runner`]: the experiment driver behind the command-line tool.

pub mod error;
pub mod noise;
pub mod parallel;
pub mod protocol;
pub mod qmath;
pub mod rng;
pub mod runner;
pub mod svg;
pub mod tomography;

pub use error::{Error, Result};
