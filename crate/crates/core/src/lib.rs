//! Design and calibration toolkit for an optical six-axis force/torque sensor
//! built around a three-spoke T-beam elastomer read by six reflective
//! photocouplers.
//!
//! The crate is organised bottom-up:
//!
//! - [`beam_model`]: closed-form Timoshenko compliance of the elastomer.
//! - [`sensitivity`]: the 6×6 displacement-per-wrench matrix and its metrics.
//! - [`optimizer`]: constrained multi-start search over the seven design variables.
//! - [`simulator`]: synthetic photocoupler traces for desk-scale validation.
//! - [`calibration`]: polynomial linearization, decoupling and error metrics.
//! - [`trace_io`]: the CSV trace formats shared by the simulator and calibration.
//! - [`reference`]: published reference values used for cross-checks.

pub mod beam_model;
pub mod calibration;
mod error;
pub mod optimizer;
pub mod reference;
pub mod sensitivity;
pub mod simulator;
pub mod trace_io;

pub use error::{Error, Result};

/// Millimetres to metres.
pub const MM: f64 = 1e-3;
