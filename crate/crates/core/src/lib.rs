//! Path-integral estimates of Kubo-transformed time-correlation functions
//! for one-dimensional quantum systems.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod model;
pub mod oracle;
pub mod ringpoly;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result, Warning};
pub use model::{ModelKind, Potential, PotentialModel, ThermoParams};
pub use ringpoly::{Observable, RingPolymerState};
