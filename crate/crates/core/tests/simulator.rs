use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use susmap::ising::{complement_index, energy, enumerate_ground_states, IsingProblem, SpinState};
use susmap::schedule::{default_envelope, AnnealEnvelope, AnnealSpec};
use susmap::sim::{
    evolve, evolve_traced, svmc_evolve, total_variation, transition_probabilities, BackendConfig, BackendKind,
    DiagonalTerms, Presets, PHASE_FACTOR,
};

/// Classical RK4 on the Schrodinger equation with a Hamiltonian assembled
/// from Kronecker products of Pauli matrices.
struct Rk4 {
    n: usize,
    h: Vec<f64>,
    j: Vec<(usize, usize, f64)>,
}

impl Rk4 {
    fn new(problem: &IsingProblem) -> Self {
        let n = problem.num_variables();
        Self {
            n,
            h: (0..n).map(|i| problem.bias(i)).collect(),
            j: problem.quadratic().iter().map(|(&(a, b), &w)| (a, b, w)).collect(),
        }
    }

    fn kron_op(&self, site_ops: &[(usize, [[f64; 2]; 2])]) -> Vec<Vec<f64>> {
        let eye = [[1.0, 0.0], [0.0, 1.0]];
        let mut m = vec![vec![1.0]];
        // Qubit 0 is the least significant bit, so it is the innermost factor.
        for q in (0..self.n).rev() {
            let op = site_ops.iter().find(|(s, _)| *s == q).map_or(eye, |(_, o)| *o);
            let d = m.len();
            let mut out = vec![vec![0.0; 2 * d]; 2 * d];
            for (r, row) in m.iter().enumerate() {
                for (c, &x) in row.iter().enumerate() {
                    for a in 0..2 {
                        for b in 0..2 {
                            out[2 * r + a][2 * c + b] = x * op[a][b];
                        }
                    }
                }
            }
            m = out;
        }
        m
    }

    /// `(sum sigma_x, sum h_i sigma_z, sum J_ij sigma_z sigma_z)`.
    fn terms(&self) -> [Vec<Vec<f64>>; 3] {
        let x = [[0.0, 1.0], [1.0, 0.0]];
        let z = [[1.0, 0.0], [0.0, -1.0]];
        let dim = 1 << self.n;
        let mut out = [vec![vec![0.0; dim]; dim], vec![vec![0.0; dim]; dim], vec![vec![0.0; dim]; dim]];
        let add = |acc: &mut Vec<Vec<f64>>, m: Vec<Vec<f64>>, c: f64| {
            for r in 0..dim {
                for k in 0..dim {
                    acc[r][k] += c * m[r][k];
                }
            }
        };
        for i in 0..self.n {
            add(&mut out[0], self.kron_op(&[(i, x)]), 1.0);
            add(&mut out[1], self.kron_op(&[(i, z)]), self.h[i]);
        }
        for &(p, q, w) in &self.j {
            add(&mut out[2], self.kron_op(&[(p, z), (q, z)]), w);
        }
        out
    }

    fn run(&self, env: &AnnealEnvelope, spec: &AnnealSpec, psi0: Vec<(f64, f64)>, steps: usize) -> Vec<f64> {
        let dim = psi0.len();
        let [sx, zh, zz] = self.terms();
        let deriv = |t: f64, psi: &[(f64, f64)]| -> Vec<(f64, f64)> {
            let (s, g) = spec.controls(t.min(spec.annealing_time));
            let (a, b) = env.eval(s);
            (0..dim)
                .map(|r| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for k in 0..dim {
                        let h = -a / 2.0 * sx[r][k] + b / 2.0 * (g * zh[r][k] + zz[r][k]);
                        re += h * psi[k].0;
                        im += h * psi[k].1;
                    }
                    // -i * omega * (H psi)
                    (PHASE_FACTOR * im, -PHASE_FACTOR * re)
                })
                .collect()
        };
        let axpy = |psi: &[(f64, f64)], k: &[(f64, f64)], c: f64| -> Vec<(f64, f64)> {
            psi.iter().zip(k).map(|(p, d)| (p.0 + c * d.0, p.1 + c * d.1)).collect()
        };
        let dt = spec.annealing_time / steps as f64;
        let mut psi = psi0;
        for step in 0..steps {
            let t = step as f64 * dt;
            let k1 = deriv(t, &psi);
            let k2 = deriv(t + dt / 2.0, &axpy(&psi, &k1, dt / 2.0));
            let k3 = deriv(t + dt / 2.0, &axpy(&psi, &k2, dt / 2.0));
            let k4 = deriv(t + dt, &axpy(&psi, &k3, dt));
            for i in 0..dim {
                psi[i].0 += dt / 6.0 * (k1[i].0 + 2.0 * k2[i].0 + 2.0 * k3[i].0 + k4[i].0);
                psi[i].1 += dt / 6.0 * (k1[i].1 + 2.0 * k2[i].1 + 2.0 * k3[i].1 + k4[i].1);
            }
        }
        psi.iter().map(|(r, i)| r * r + i * i).collect()
    }
}

fn forward(problem_time_us: f64) -> AnnealSpec {
    let presets = Presets { time_scale: problem_time_us / 100.0, ..Presets::default() };
    presets.forward_spec().unwrap()
}

fn cfg(dt: f64) -> BackendConfig {
    BackendConfig { dt, ..BackendConfig::default() }
}

fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> IsingProblem {
    let lin: Vec<_> = (0..n).map(|i| (i, rng.random_range(-1.0..1.0))).collect();
    let quad: Vec<_> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter_map(|e| rng.random_bool(0.6).then(|| (e, if rng.random_bool(0.5) { 1.0 } else { -1.0 })))
        .collect();
    IsingProblem::new(n, lin, quad).unwrap()
}

#[test]
fn single_spin_adiabatic_limit_matches_rk4() {
    let p = IsingProblem::new(1, [(0, 1.0)], []).unwrap();
    let env = default_envelope();
    let spec = forward(0.2);
    let ours = evolve(&p, &env, &spec, &cfg(1e-5)).unwrap();
    let dim = 2;
    let uniform = vec![(1.0 / (dim as f64).sqrt(), 0.0); dim];
    let oracle = Rk4::new(&p).run(&env, &spec, uniform, 400_000);
    assert!(ours.probability(1) >= 0.99, "p(-1) = {}", ours.probability(1));
    assert!(total_variation(ours.probabilities(), &oracle) < 1e-6, "{:?} vs {oracle:?}", ours.probabilities());
}

#[test]
fn reverse_anneal_with_hgain_matches_rk4() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = random_problem(&mut rng, 3);
    let env = default_envelope();
    let presets = Presets { time_scale: 0.002, ..Presets::default() };
    let spec = presets.reverse_spec(&SpinState::from_index(5, 3).unwrap(), 1.7).unwrap();
    let ours = evolve(&p, &env, &spec, &cfg(2e-6)).unwrap();
    let mut psi0 = vec![(0.0, 0.0); 8];
    psi0[5] = (1.0, 0.0);
    let oracle = Rk4::new(&p).run(&env, &spec, psi0, 1_000_000);
    assert!(total_variation(ours.probabilities(), &oracle) < 1e-5, "{:?} vs {oracle:?}", ours.probabilities());
}

#[test]
fn norm_is_preserved_at_every_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let p = random_problem(&mut rng, 6);
    let spec = Presets::default().reverse_spec(&SpinState::from_index(22, 6).unwrap(), 2.0).unwrap();
    let (dist, trace) = evolve_traced(&p, &default_envelope(), &spec, &cfg(2.5e-4)).unwrap();
    assert!(!trace.deviations.is_empty());
    assert!(trace.max_deviation() < 1e-9, "{}", trace.max_deviation());
    assert!((dist.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn no_transverse_field_keeps_the_basis_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let n = rng.random_range(1..=6);
        let p = random_problem(&mut rng, n);
        let k = rng.random_range(0..1u64 << n);
        let spec = Presets::default().reverse_spec(&SpinState::from_index(k, n).unwrap(), 1.0).unwrap();
        let env = default_envelope().without_transverse_field();
        let d = evolve(&p, &env, &spec, &cfg(2.5e-4)).unwrap();
        let mut point = vec![0.0; 1 << n];
        point[k as usize] = 1.0;
        assert!(total_variation(d.probabilities(), &point) < 1e-9);
    }
}

#[test]
fn halving_dt_converges() {
    let p = IsingProblem::new(4, [(0, 0.3), (2, -0.4)], [((0, 1), 1.0), ((1, 2), -1.0), ((2, 3), 1.0), ((0, 3), 1.0)])
        .unwrap();
    let spec = Presets::default().reverse_spec(&SpinState::from_index(6, 4).unwrap(), 1.5).unwrap();
    let env = default_envelope();
    let dt = 2e-6;
    let a = evolve(&p, &env, &spec, &cfg(dt)).unwrap();
    let b = evolve(&p, &env, &spec, &cfg(dt / 2.0)).unwrap();
    let tv = total_variation(a.probabilities(), b.probabilities());
    assert!(tv < 1e-6, "tv {tv}");
}

#[test]
fn refinement_meets_its_tolerance() {
    let p = IsingProblem::new(3, [], [((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), -1.0)]).unwrap();
    let spec = Presets::default().reverse_spec(&SpinState::from_index(2, 3).unwrap(), 0.5).unwrap();
    let env = default_envelope();
    let loose = BackendConfig { convergence_tolerance: Some(1e-4), ..cfg(1e-3) };
    let refined = evolve(&p, &env, &spec, &loose).unwrap();
    let reference = evolve(&p, &env, &spec, &cfg(1e-6)).unwrap();
    assert!(total_variation(refined.probabilities(), reference.probabilities()) < 5e-4);
}

#[test]
fn global_spin_flip_is_covariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 5;
    let p = random_problem(&mut rng, n);
    let flipped = p.with_linear(p.linear().iter().map(|(&i, &h)| (i, -h))).unwrap();
    let env = default_envelope();
    let presets = Presets::default();
    let k = 13;
    let kc = complement_index(k, n);
    let a = evolve(&p, &env, &presets.reverse_spec(&SpinState::from_index(k, n).unwrap(), 1.2).unwrap(), &cfg(2.5e-4))
        .unwrap();
    let b = evolve(&flipped, &env, &presets.reverse_spec(&SpinState::from_index(kc, n).unwrap(), 1.2).unwrap(), &cfg(2.5e-4))
        .unwrap();
    for s in 0..1u64 << n {
        let diff = (a.probability(s) - b.probability(complement_index(s, n))).abs();
        assert!(diff < 1e-10, "state {s}: {diff}");
    }


    // The rotor backend draws unmirrored proposals, so covariance holds in distribution only.
    let sv = BackendConfig { kind: BackendKind::Svmc, sweeps: 200, seed: 4, ..BackendConfig::default() };
    let reads = 400;
    let run = |prob: &IsingProblem, start: u64| {
        let mut spec = presets.reverse_spec(&SpinState::from_index(start, n).unwrap(), 1.2).unwrap();
        spec.num_reads = reads;
        svmc_evolve(prob, &env, &spec, &sv).unwrap()
    };
    let (sa, sb) = (run(&p, k), run(&flipped, kc));
    for s in 0..1u64 << n {
        let fa = sa.count(s) as f64 / reads as f64;
        let fb = sb.count(complement_index(s, n)) as f64 / reads as f64;
        // Five binomial standard deviations of a difference at p = 1/2.
        assert!((fa - fb).abs() < 5.0 * (0.5f64 / reads as f64).sqrt(), "state {s}: {fa} vs {fb}");
    }
}

#[test]
fn final_energy_matches_classical_energies() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let p = random_problem(&mut rng, 4);
    let presets = Presets::default();
    let spec = presets.reverse_spec(&SpinState::from_index(9, 4).unwrap(), 0.0).unwrap();
    let env = default_envelope();
    let d = evolve(&p, &env, &spec, &cfg(2.5e-4)).unwrap();
    let (s_end, g_end) = spec.controls(spec.annealing_time);
    let (a_end, b_end) = env.eval(s_end);
    assert_eq!(a_end, 0.0);
    let diag: Vec<f64> = DiagonalTerms::new(&p).unwrap().diagonal(b_end, g_end).collect();
    let expectation: f64 = d.probabilities().iter().zip(&diag).map(|(p, e)| p * e).sum();
    // g is zero at the end of the anneal, leaving only the couplers.
    let couplers = p.with_linear([]).unwrap();
    let classical: f64 = (0..16u64)
        .map(|k| d.probability(k) * energy(&couplers, &SpinState::from_index(k, 4).unwrap()).unwrap())
        .sum();
    assert_eq!(g_end, 0.0);
    assert!((expectation - b_end / 2.0 * classical).abs() < 1e-12);
}

#[test]
fn backends_agree_on_a_gapped_ferromagnet() {
    let p = IsingProblem::new(2, [(0, 0.5), (1, 0.5)], [((0, 1), -1.0)]).unwrap();
    let gs = enumerate_ground_states(&p).unwrap();
    assert_eq!(gs.states, vec![3]);
    let env = default_envelope();
    let spec = Presets::default().forward_spec().unwrap();
    let d = evolve(&p, &env, &spec, &cfg(2.5e-4)).unwrap();
    assert_eq!(d.argmax(), 3);
    assert!(d.probability(3) > 0.9);

    let mut spec = spec;
    spec.num_reads = 500;
    let sv = BackendConfig { kind: BackendKind::Svmc, seed: 8, ..BackendConfig::default() };
    let set = svmc_evolve(&p, &env, &spec, &sv).unwrap();
    assert_eq!(set.mode(), Some(3));
    assert!(set.count(3) as f64 > 0.9 * set.total_reads as f64);
}

#[test]
fn shared_propagation_matches_single_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let p = random_problem(&mut rng, 4);
    let env = default_envelope();
    let presets = Presets::default();
    let spec = presets.reverse_spec(&SpinState::from_index(0, 4).unwrap(), 0.8).unwrap();
    let all = transition_probabilities(&p, &env, &spec, &[0, 7, 15], &cfg(2.5e-4)).unwrap();
    for (d, k) in all.iter().zip([0u64, 7, 15]) {
        let single = presets.reverse_spec(&SpinState::from_index(k, 4).unwrap(), 0.8).unwrap();
        let e = evolve(&p, &env, &single, &cfg(2.5e-4)).unwrap();
        assert!(total_variation(d.probabilities(), e.probabilities()) < 1e-12);
    }
}

#[test]
fn over_limit_is_a_capability_error() {
    let p = IsingProblem::new(15, [], [((0, 1), 1.0)]).unwrap();
    let e = evolve(&p, &default_envelope(), &forward(1.0), &cfg(1e-3)).unwrap_err();
    assert_eq!(e.kind(), "capability");
}
