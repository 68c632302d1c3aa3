//! Discrete-time pole placement adaptive control built on the ideal
//! projection estimator, with the admissible parameters confined to a
//! convex compact box.
//!
//! The crate couples three pieces and the instruments to interrogate them:
//!
//! * [`estimation`] -- the ideal projection algorithm (optionally with a
//!   deadzone) and the classical normalized-gradient algorithm, both kept
//!   inside the admissible box by exact clamping;
//! * [`synthesis`] -- certainty-equivalence pole placement through the
//!   Sylvester form of the Diophantine equation, the strictly proper
//!   control law, and the closed-loop matrix whose characteristic
//!   polynomial is pinned to the design target;
//! * [`simulation`] -- the deterministic closed-loop driver with
//!   disturbances, parameter schedules, and an exponentially weighted
//!   unmodelled-dynamics block;
//! * [`analysis`] -- pathwise checks of the estimator's descent
//!   inequalities, exponential envelope certificates, gain measurements,
//!   and the counterexample experiment that separates the ideal update
//!   from the classical one.

pub mod analysis;
pub mod config;
pub mod error;
pub mod estimation;
pub mod figures;
pub mod matrix;
pub mod poly;
pub mod sample;
pub mod signal;
pub mod simulation;
pub mod synthesis;

pub use error::{Error, Result};
