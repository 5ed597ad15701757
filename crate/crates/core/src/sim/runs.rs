//! Reverse and forward anneal presets.

use serde::{Deserialize, Serialize};

use super::sampling::{sample, Observation};
use super::schrodinger::evolve;
use super::svmc::svmc_evolve;
use super::{BackendConfig, BackendKind};
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, SpinState};
use crate::schedule::{default_envelope, AnnealEnvelope, AnnealSpec, PiecewiseLinearSchedule};

/// Schedule shapes on a 100-unit clock, stretched by `time_scale` µs per unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Presets {
    pub time_scale: f64,
    pub reverse_anchors: Vec<[f64; 2]>,
    /// Multiplied by the plateau strength `h`.
    pub hgain_shape: Vec<[f64; 2]>,
    pub forward_anchors: Vec<[f64; 2]>,
    pub num_reads: u64,
    pub forward_reads: u64,
    /// Report exact probabilities instead of sampling reads.
    pub exact: bool,
    #[serde(skip, default = "default_envelope")]
    pub envelope: AnnealEnvelope,
}

impl Default for Presets {
    fn default() -> Self {
        Self {
            time_scale: 0.01,
            reverse_anchors: vec![[0.0, 1.0], [20.0, 0.65], [80.0, 0.65], [100.0, 1.0]],
            hgain_shape: vec![
                [0.0, 0.0],
                [0.05, 0.0],
                [0.1, 1.0],
                [99.1, 1.0],
                [99.15, 0.0],
                [100.0, 0.0],
            ],
            forward_anchors: vec![[0.0, 0.0], [100.0, 1.0]],
            num_reads: 1000,
            forward_reads: 10_000,
            exact: true,
            envelope: default_envelope(),
        }
    }
}

impl Presets {
    fn scaled(&self, anchors: &[[f64; 2]], amplitude: f64) -> Result<PiecewiseLinearSchedule> {
        PiecewiseLinearSchedule::from_pairs(anchors)?
            .scaled(self.time_scale)?
            .amplified(amplitude)
    }

    pub fn annealing_time(&self) -> Result<f64> {
        Ok(self.scaled(&self.reverse_anchors, 1.0)?.duration())
    }

    /// Reverse anneal from `initial` with the h-gain plateau at `h`.
    pub fn reverse_spec(&self, initial: &SpinState, h: f64) -> Result<AnnealSpec> {
        let anneal = self.scaled(&self.reverse_anchors, 1.0)?;
        let spec = AnnealSpec {
            annealing_time: anneal.duration(),
            anneal_schedule: anneal,
            hgain_schedule: Some(self.scaled(&self.hgain_shape, h)?),
            initial_state: Some(initial.clone()),
            num_reads: self.num_reads,
            reinitialize_state: true,
            time_scale: self.time_scale,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn forward_spec(&self) -> Result<AnnealSpec> {
        let anneal = self.scaled(&self.forward_anchors, 1.0)?;
        let spec = AnnealSpec {
            annealing_time: anneal.duration(),
            anneal_schedule: anneal,
            hgain_schedule: None,
            initial_state: None,
            num_reads: self.forward_reads,
            reinitialize_state: true,
            time_scale: self.time_scale,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `problem` with its linear terms replaced by the complement of `target`,
/// which makes `target` the unique minimizer of the linear part.
pub fn hgain_encode(problem: &IsingProblem, target: &SpinState) -> Result<IsingProblem> {
    if target.len() != problem.num_variables() {
        return Err(Error::invalid(format!(
            "target has {} spins for {} variables",
            target.len(),
            problem.num_variables()
        )));
    }
    problem.with_linear(
        target
            .spins()
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, -f64::from(s))),
    )
}

fn observe(
    problem: &IsingProblem,
    spec: &AnnealSpec,
    presets: &Presets,
    backend: &BackendConfig,
) -> Result<Observation> {
    match backend.kind {
        BackendKind::Schrodinger => {
            let dist = evolve(problem, &presets.envelope, spec, backend)?;
            Ok(if presets.exact {
                Observation::Exact(dist)
            } else {
                Observation::Samples(sample(&dist, spec.num_reads, backend.seed))
            })
        }
        BackendKind::Svmc => Ok(Observation::Samples(svmc_evolve(
            problem,
            &presets.envelope,
            spec,
            backend,
        )?)),
    }
}

/// Reverse anneal from `initial` with plateau strength `h`. With a `target`,
/// the linear terms are first replaced by its h-gain encoding.
pub fn reverse_anneal_run(
    problem: &IsingProblem,
    initial: &SpinState,
    target: Option<&SpinState>,
    h: f64,
    presets: &Presets,
    backend: &BackendConfig,
) -> Result<Observation> {
    let encoded;
    let problem = match target {
        Some(t) => {
            encoded = hgain_encode(problem, t)?;
            &encoded
        }
        None => problem,
    };
    observe(problem, &presets.reverse_spec(initial, h)?, presets, backend)
}

pub fn forward_anneal_run(
    problem: &IsingProblem,
    presets: &Presets,
    backend: &BackendConfig,
) -> Result<Observation> {
    observe(problem, &presets.forward_spec()?, presets, backend)
}
