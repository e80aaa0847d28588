//! Output tracking for differentially flat systems with Newton–Raphson
//! controllers.
//!
//! The crate is `no_std` and needs only `alloc`. It provides dense linear
//! algebra, the flat predictor, plant models, the dynamical and statical
//! controllers, stability certificates and a fixed-step simulator.

#![no_std]

extern crate alloc;

pub mod control;
pub mod error;
pub mod flat;
pub mod linalg;
pub mod plants;
pub mod reference;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
