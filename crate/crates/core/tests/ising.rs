use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use susmap::instance::{parse_instance, to_instance_string};
use susmap::ising::{
    complement, delta_metric, energy, enumerate_ground_states, hamming_distance_proportion, IsingProblem,
    SpinState,
};

/// Exhaustive loop written against plain arrays, sharing nothing with the library.
fn brute_force(n: usize, h: &[f64], j: &[(usize, usize, f64)]) -> (f64, Vec<u64>) {
    let spin = |k: u64, i: usize| if (k >> i) & 1 == 0 { 1.0 } else { -1.0 };
    let energies: Vec<f64> = (0..1u64 << n)
        .map(|k| {
            let lin: f64 = (0..n).map(|i| h[i] * spin(k, i)).sum();
            let quad: f64 = j.iter().map(|&(a, b, w)| w * spin(k, a) * spin(k, b)).sum();
            lin + quad
        })
        .collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let states = (0..1u64 << n).filter(|&k| energies[k as usize] - min < 1e-9).collect();
    (min, states)
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, with_fields: bool) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
    let h = (0..n)
        .map(|_| if with_fields { f64::from(rng.random_range(-2i32..=2)) * 0.5 } else { 0.0 })
        .collect();
    let mut j = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.5) {
                j.push((a, b, if rng.random_bool(0.5) { 1.0 } else { -1.0 }));
            }
        }
    }
    (h, j)
}

fn build(n: usize, h: &[f64], j: &[(usize, usize, f64)]) -> IsingProblem {
    IsingProblem::new(
        n,
        h.iter().copied().enumerate().filter(|(_, v)| *v != 0.0),
        j.iter().map(|&(a, b, w)| ((a, b), w)),
    )
    .unwrap()
}

#[test]
fn ground_states_match_exhaustive_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for trial in 0..60 {
        let n = rng.random_range(3..=12);
        let (h, j) = random_instance(&mut rng, n, trial % 2 == 1);
        let (e, states) = brute_force(n, &h, &j);
        let gs = enumerate_ground_states(&build(n, &h, &j)).unwrap();
        assert!((gs.energy - e).abs() < 1e-12, "trial {trial}");
        assert_eq!(gs.states, states, "trial {trial}");
    }
}

#[test]
fn hand_checked_frustrated_triangle() {
    // Antiferromagnetic triangle: six states with one unsatisfied bond, energy -1.
    let p = IsingProblem::new(3, [], [((0, 1), 1.0), ((0, 2), 1.0), ((1, 2), 1.0)]).unwrap();
    let gs = enumerate_ground_states(&p).unwrap();
    assert_eq!(gs.energy, -1.0);
    assert_eq!(gs.states, vec![1, 2, 3, 4, 5, 6]);
}

#[test]
fn delta_reflexive_and_one_flip() {
    // Star with five leaves: flipping only the hub differs at a degree-5 vertex.
    let p = IsingProblem::new(6, [], (1..6).map(|i| ((0, i), -1.0))).unwrap();
    let gs = SpinState::from_index(0, 6).unwrap();
    assert_eq!(delta_metric(&p, &gs, &gs).unwrap(), 6.0);
    let hub = SpinState::from_index(1, 6).unwrap();
    assert_eq!(delta_metric(&p, &hub, &gs).unwrap(), 5.0);
}

fn problem_strategy() -> impl Strategy<Value = IsingProblem> {
    (2usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        (
            Just(n),
            Just(pairs),
            prop::collection::vec(prop::option::of(-2.0f64..2.0), m),
            prop::collection::vec(prop::option::of(-1.0f64..1.0), n),
        )
    })
    .prop_map(|(n, pairs, ws, hs)| {
        let quad: Vec<_> = pairs.into_iter().zip(ws).filter_map(|(p, w)| w.map(|w| (p, w))).collect();
        let lin: Vec<_> = hs.into_iter().enumerate().filter_map(|(i, h)| h.map(|h| (i, h))).collect();
        IsingProblem::new(n, lin, quad).unwrap()
    })
}

proptest! {
    #[test]
    fn quadratic_energy_is_flip_symmetric(p in problem_strategy(), k in any::<u64>()) {
        let p = IsingProblem::new(p.num_variables(), [], p.quadratic().iter().map(|(&e, &w)| (e, w))).unwrap();
        let s = SpinState::from_index(k % p.num_states(), p.num_variables()).unwrap();
        prop_assert!((energy(&p, &s).unwrap() - energy(&p, &complement(&s)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn index_round_trip(n in 1usize..=12, k in any::<u64>()) {
        let k = k % (1u64 << n);
        let s = SpinState::from_index(k, n).unwrap();
        prop_assert_eq!(s.index(), k);
        prop_assert_eq!(SpinState::new(s.spins().to_vec()).unwrap(), s);
    }

    #[test]
    fn hamming_is_scaled_metric(n in 1usize..=12, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let m = 1u64 << n;
        let [a, b, c] = [a, b, c].map(|k| SpinState::from_index(k % m, n).unwrap());
        let d = |x: &SpinState, y: &SpinState| hamming_distance_proportion(x, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&d(&a, &b)));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b) == 0.0, a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    }

    #[test]
    fn delta_bounds(p in problem_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let n = p.num_variables();
        let (a, b) = (SpinState::from_index(a % p.num_states(), n).unwrap(), SpinState::from_index(b % p.num_states(), n).unwrap());
        let max_degree = p.degrees().into_iter().max().unwrap() as f64;
        let d = delta_metric(&p, &a, &b).unwrap();
        if a == b {
            prop_assert_eq!(d, max_degree + 1.0);
        } else {
            prop_assert!(d <= max_degree);
            // Isolated vertices contribute degree zero.
            let touches_edge = p.degrees().iter().enumerate().any(|(v, &g)| g > 0 && a.spins()[v] != b.spins()[v]);
            prop_assert_eq!(d > 0.0, touches_edge);
        }
    }

    #[test]
    fn instance_text_round_trip(p in problem_strategy()) {
        let back = parse_instance(&to_instance_string(&p)).unwrap();
        prop_assert_eq!(back, p);
    }
}
