//! Information gain versus disturbance for finite-strength quantum
//! measurements.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod majorize;
pub mod matcore;
pub mod measure;
pub mod qubit;
pub mod search;
pub mod states;
pub mod strength;
pub mod verify;

pub use error::{Error, Result};
