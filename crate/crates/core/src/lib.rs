//! Steady-state simulation of a reservoir-engineered pair of massive
//! oscillators, with interchangeable quantum and measurement-feedback
//! gravity models, analytic cross-checks, and a brute-force Fock-space
//! validator.

pub mod closedform;
pub mod config;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod gaussian;
pub mod models;
pub mod params;

pub use constants::*;
pub use error::{Error, Result};
