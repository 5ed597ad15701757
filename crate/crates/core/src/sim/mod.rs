//! Closed-system annealing simulation and a classical rotor baseline.

mod hamiltonian;
mod runs;
mod sampling;
mod schrodinger;
mod svmc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hamiltonian::{build_hamiltonian, DiagonalTerms, MAX_DENSE_VARIABLES};
pub use runs::{forward_anneal_run, hgain_encode, reverse_anneal_run, Presets};
pub use sampling::{sample, sample_exact, Distribution, Observation, SampleSet};
pub use schrodinger::{evolve, evolve_traced, step_plan, transition_probabilities, NormTrace, Step};
pub use svmc::svmc_evolve;

/// Radians per GHz·µs.
pub const PHASE_FACTOR: f64 = 2.0 * std::f64::consts::PI * 1e3;

/// Largest relative norm drift tolerated at any step before giving up.
pub const NORM_FAILURE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Schrodinger,
    Svmc,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schrodinger" => Ok(Self::Schrodinger),
            "svmc" => Ok(Self::Svmc),
            other => Err(Error::invalid(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Integration step in µs for segments whose controls vary.
    pub dt: f64,
    /// When set, results are refined by halving `dt` until successive
    /// distributions agree to this total variation.
    pub convergence_tolerance: Option<f64>,
    /// Metropolis sweeps per SVMC read, spread evenly over the anneal.
    pub sweeps: u64,
    /// SVMC temperature in GHz.
    pub temperature: f64,
    pub seed: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::Schrodinger,
            dt: 2.5e-4,
            convergence_tolerance: None,
            sweeps: 1000,
            temperature: 0.05,
            seed: 0,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be positive"));
        }
        if self.sweeps == 0 {
            return Err(Error::invalid("sweeps must be positive"));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::invalid("temperature must be positive"));
        }
        if let Some(tol) = self.convergence_tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::invalid("convergence_tolerance must be positive"));
            }
        }
        Ok(())
    }
}

/// Total variation distance between two distributions of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
