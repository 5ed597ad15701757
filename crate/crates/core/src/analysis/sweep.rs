use super::{pgs, HGrid, ResponseCurve};
use crate::error::{Error, Result};
use crate::ising::{enumerate_ground_states, IsingProblem, SpinState};
use crate::seed::derive_seed;
use crate::sim::{
    hgain_encode, sample, svmc_evolve, transition_probabilities, BackendConfig, BackendKind,
    Observation, Presets,
};

fn require_ground_state(problem: &IsingProblem, target: u64) -> Result<SpinState> {
    let gs = enumerate_ground_states(problem)?;
    if !gs.contains(target) {
        return Err(Error::invalid(format!(
            "target {target} is not a ground state (ground states: {:?})",
            gs.states
        )));
    }
    SpinState::from_index(target, problem.num_variables())
}

/// Final observations of reverse anneals from each of `initials` toward the
/// h-gain encoding of `target` at plateau `h`. Sampled runs seed each initial
/// state with `derive_seed(backend.seed, [initial])`.
pub fn target_distributions(
    problem: &IsingProblem,
    target: u64,
    h: f64,
    initials: &[u64],
    presets: &Presets,
    backend: &BackendConfig,
) -> Result<Vec<Observation>> {
    let n = problem.num_variables();
    let target_state = SpinState::from_index(target, n)?;
    let encoded = hgain_encode(problem, &target_state)?;
    match backend.kind {
        BackendKind::Schrodinger => {
            let spec = presets.reverse_spec(&target_state, h)?;
            let dists = transition_probabilities(&encoded, &presets.envelope, &spec, initials, backend)?;
            Ok(dists
                .into_iter()
                .zip(initials)
                .map(|(d, &init)| {
                    if presets.exact {
                        Observation::Exact(d)
                    } else {
                        Observation::Samples(sample(&d, presets.num_reads, derive_seed(backend.seed, &[init])))
                    }
                })
                .collect())
        }
        BackendKind::Svmc => initials
            .iter()
            .map(|&init| {
                let spec = presets.reverse_spec(&SpinState::from_index(init, n)?, h)?;
                let cfg = BackendConfig {
                    seed: derive_seed(backend.seed, &[init]),
                    ..backend.clone()
                };
                Ok(Observation::Samples(svmc_evolve(&encoded, &presets.envelope, &spec, &cfg)?))
            })
            .collect(),
    }
}

/// Curves from every one of `initials` toward `target`, with the per-h
/// observations behind each curve. Grid point `j` runs under
/// `derive_seed(backend.seed, [j])`.
pub fn response_curves(
    problem: &IsingProblem,
    target: u64,
    initials: &[u64],
    grid: &HGrid,
    presets: &Presets,
    backend: &BackendConfig,
) -> Result<Vec<(ResponseCurve, Vec<Observation>)>> {
    require_ground_state(problem, target)?;
    let mut out: Vec<(ResponseCurve, Vec<Observation>)> = initials
        .iter()
        .map(|&init| {
            (
                ResponseCurve {
                    initial_state: init,
                    target_gs: target,
                    p_gs: Vec::with_capacity(grid.len()),
                },
                Vec::with_capacity(grid.len()),
            )
        })
        .collect();
    for (j, &h) in grid.values().iter().enumerate() {
        let cfg = BackendConfig {
            seed: derive_seed(backend.seed, &[j as u64]),
            ..backend.clone()
        };
        let obs = target_distributions(problem, target, h, initials, presets, &cfg)?;
        for ((curve, history), o) in out.iter_mut().zip(obs) {
            curve.p_gs.push(pgs(&o, target)?);
            history.push(o);
        }
    }
    Ok(out)
}

/// Single-mapping form of [`response_curves`].
pub fn sweep_response_curve(
    problem: &IsingProblem,
    initial: &SpinState,
    target: &SpinState,
    grid: &HGrid,
    presets: &Presets,
    backend: &BackendConfig,
) -> Result<(ResponseCurve, Vec<Observation>)> {
    if initial.len() != problem.num_variables() || target.len() != problem.num_variables() {
        return Err(Error::invalid("state length does not match the problem"));
    }
    let mut all = response_curves(problem, target.index(), &[initial.index()], grid, presets, backend)?;
    Ok(all.remove(0))
}
