//! Simulation and analysis of reverse-anneal + h-gain state-transition
//! susceptibility on small transverse-field Ising problems.

pub mod analysis;
pub mod error;
pub mod instance;
pub mod instances;
pub mod network;
pub mod ising;
pub mod schedule;
pub mod seed;
pub mod topology;
pub mod sim;

pub use error::{Error, Result};
pub use ising::{GroundStateSet, IsingProblem, SpinState};
