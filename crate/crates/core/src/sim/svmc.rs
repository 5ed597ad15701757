//! Spin-vector Monte Carlo: each qubit is a planar rotor at angle `theta`,
//! updated by Metropolis moves against
//! `E = -(A/2) sum sin(theta_i) + (B/2)(g sum h_i cos(theta_i) + sum J_ij cos(theta_i) cos(theta_j))`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sampling::SampleSet;
use super::{BackendConfig, BackendKind};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::schedule::{AnnealEnvelope, AnnealSpec};

/// Reads are drawn one after another from a single stream seeded by
/// `cfg.seed`. `cfg.sweeps == 0` returns the initial states unchanged.
pub fn svmc_evolve(
    problem: &IsingProblem,
    envelope: &AnnealEnvelope,
    spec: &AnnealSpec,
    cfg: &BackendConfig,
) -> Result<SampleSet> {
    if cfg.kind != BackendKind::Svmc {
        return Err(Error::invalid("svmc_evolve requires the svmc backend"));
    }
    if !(cfg.temperature > 0.0 && cfg.temperature.is_finite()) {
        return Err(Error::invalid("temperature must be positive"));
    }
    spec.validate()?;
    let n = problem.num_variables();
    let start: Vec<f64> = match &spec.initial_state {
        Some(s) if s.len() != n => {
            return Err(Error::invalid(format!(
                "initial state has {} spins for {n} variables",
                s.len()
            )))
        }
        Some(s) => s.spins().iter().map(|&x| if x > 0 { 0.0 } else { PI }).collect(),
        None => vec![FRAC_PI_2; n],
    };

    let mut neighbours: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(i, j), &w) in problem.quadratic() {
        neighbours[i].push((j, w));
        neighbours[j].push((i, w));
    }
    let h: Vec<f64> = (0..n).map(|i| problem.bias(i)).collect();

    let schedule: Vec<(f64, f64, f64)> = (0..cfg.sweeps)
        .map(|k| {
            let t = (k as f64 + 0.5) / cfg.sweeps as f64 * spec.annealing_time;
            let (s, g) = spec.controls(t);
            let (a, b) = envelope.eval(s);
            (a, b, g)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut counts = BTreeMap::new();
    let mut theta = start.clone();
    let mut cos: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    for _ in 0..spec.num_reads {
        theta.copy_from_slice(&start);
        for (c, t) in cos.iter_mut().zip(&theta) {
            *c = t.cos();
        }
        for &(a, b, g) in &schedule {
            for i in 0..n {
                let field = g * h[i] + neighbours[i].iter().map(|&(j, w)| w * cos[j]).sum::<f64>();
                let local = |t: f64| -0.5 * a * t.sin() + 0.5 * b * field * t.cos();
                let proposal = rng.random::<f64>() * PI;
                let delta = local(proposal) - local(theta[i]);
                if delta <= 0.0 || rng.random::<f64>() < (-delta / cfg.temperature).exp() {
                    theta[i] = proposal;
                    cos[i] = proposal.cos();
                }
            }
        }
        let index = cos
            .iter()
            .enumerate()
            .filter(|(_, &c)| c < 0.0)
            .fold(0u64, |acc, (i, _)| acc | (1 << i));
        *counts.entry(index).or_insert(0) += 1;
    }
    Ok(SampleSet::from_counts(counts, format!("svmc seed={}", cfg.seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::PiecewiseLinearSchedule;
    use crate::ising::SpinState;

    fn forward(reads: u64) -> AnnealSpec {
        AnnealSpec {
            anneal_schedule: PiecewiseLinearSchedule::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap(),
            hgain_schedule: None,
            annealing_time: 1.0,
            initial_state: None,
            num_reads: reads,
            reinitialize_state: true,
            time_scale: 0.01,
        }
    }

    fn cfg(sweeps: u64, seed: u64) -> BackendConfig {
        BackendConfig {
            kind: BackendKind::Svmc,
            sweeps,
            seed,
            ..BackendConfig::default()
        }
    }

    #[test]
    fn single_spin_without_transverse_field_aligns_against_bias() {
        let p = IsingProblem::new(1, [(0, 1.0)], []).unwrap();
        let env = AnnealEnvelope::Analytic { a_max: 0.0, b_max: 12.0 };
        let out = svmc_evolve(&p, &env, &forward(1000), &cfg(200, 3)).unwrap();
        assert!(out.count(1) as f64 >= 0.99 * 1000.0, "{out:?}");
    }

    #[test]
    fn deterministic_per_seed() {
        let p = IsingProblem::new(3, [(0, 0.3)], [((0, 1), 1.0), ((1, 2), -1.0)]).unwrap();
        let env = crate::schedule::default_envelope();
        let a = svmc_evolve(&p, &env, &forward(200), &cfg(50, 11)).unwrap();
        assert_eq!(a, svmc_evolve(&p, &env, &forward(200), &cfg(50, 11)).unwrap());
        assert_eq!(a.total_reads, 200);
    }

    #[test]
    fn zero_sweeps_returns_initial_states() {
        let p = IsingProblem::new(3, [], [((0, 1), 1.0), ((1, 2), -1.0)]).unwrap();
        let env = crate::schedule::default_envelope();
        let mut spec = forward(50);
        spec.anneal_schedule =
            PiecewiseLinearSchedule::new(vec![(0.0, 1.0), (0.5, 0.5), (1.0, 1.0)]).unwrap();
        spec.initial_state = Some(SpinState::new(vec![1, -1, -1]).unwrap());
        let out = svmc_evolve(&p, &env, &spec, &cfg(0, 1)).unwrap();
        assert_eq!(out.counts, BTreeMap::from([(6, 50)]));
    }
}
