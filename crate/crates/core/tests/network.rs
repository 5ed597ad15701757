use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use susmap::analysis::{response_curves, HGrid};
use susmap::ising::{complement_index, IsingProblem};
use susmap::network::{build_path, export_network, parse_network_json, union_network, DominantPath, NetworkFormat};
use susmap::sim::{BackendConfig, Presets};

fn chain(n: usize) -> IsingProblem {
    IsingProblem::new(n, [], (1..n).map(|i| ((i - 1, i), if i % 2 == 0 { 1.0 } else { -1.0 }))).unwrap()
}

fn sequences() -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0u64..16, 1..12), 1..10)
}

proptest! {
    #[test]
    fn paths_have_no_repeats(seq in prop::collection::vec(0u64..16, 1..40)) {
        let p = DominantPath::from_sequence(seq[0], 3, seq.clone());
        prop_assert!(p.states.windows(2).all(|w| w[0] != w[1]));
        prop_assert_eq!(p.states.first(), seq.first());
        prop_assert_eq!(p.states.last(), seq.last());
    }

    #[test]
    fn union_counts_consecutive_occurrences(seqs in sequences()) {
        let problem = chain(4);
        let paths: Vec<_> = seqs.iter().map(|s| DominantPath::from_sequence(s[0], 0, s.clone())).collect();
        let net = union_network(&paths, &problem);

        let nodes: BTreeSet<u64> = paths.iter().flat_map(|p| p.states.iter().copied()).collect();
        prop_assert_eq!(net.nodes.keys().copied().collect::<BTreeSet<_>>(), nodes);
        prop_assert!(net.nodes.len() <= 16);

        let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for p in &paths {
            for w in p.states.windows(2) {
                *counts.entry((w[0].min(w[1]), w[0].max(w[1]))).or_default() += 1;
            }
        }
        let got: BTreeMap<(u64, u64), u64> = net.edges.iter().map(|(&k, s)| (k, s.multiplicity)).collect();
        prop_assert_eq!(got, counts);
        for ((u, v), s) in &net.edges {
            prop_assert!(net.nodes.contains_key(u) && net.nodes.contains_key(v));
            prop_assert_eq!(s.ascending + s.descending, s.multiplicity);
        }

        // Union is order independent.
        let mut rev = paths.clone();
        rev.reverse();
        prop_assert_eq!(union_network(&rev, &problem), net.clone());

        let back = parse_network_json(&export_network(&net, NetworkFormat::Json)).unwrap();
        prop_assert_eq!(back, net);
    }
}

#[test]
fn text_exports_list_every_node_and_edge() {
    let problem = chain(4);
    let paths = [DominantPath::from_sequence(1, 0, [1, 3, 2, 0]), DominantPath::from_sequence(2, 0, [2, 3, 0])];
    let net = union_network(&paths, &problem);
    let graphml = export_network(&net, NetworkFormat::Graphml);
    assert_eq!(graphml.matches("<node ").count(), net.nodes.len());
    assert_eq!(graphml.matches("<edge ").count(), net.edges.len());
    let dot = export_network(&net, NetworkFormat::Dot);
    assert_eq!(dot.matches(" -- ").count(), net.edges.len());
    assert!(dot.contains("energy="));
}

#[test]
fn complement_targets_give_isomorphic_networks() {
    // Distinct couplers leave the global flip as the only symmetry, so no two
    // states tie in probability and argmax tie-breaking never matters.
    let p = IsingProblem::new(
        5,
        [],
        [((0, 1), 1.0), ((1, 2), -0.8), ((2, 3), 0.6), ((3, 4), 1.3), ((0, 4), -0.5), ((1, 3), 0.9)],
    )
    .unwrap();
    let gs = susmap::ising::enumerate_ground_states(&p).unwrap().states;
    assert_eq!(gs.len(), 2);
    let initials: Vec<u64> = (0..32).collect();
    let grid = HGrid::new(vec![0.0, 0.5, 1.0, 2.0, 3.0]).unwrap();
    let net = |g| {
        let curves = response_curves(&p, g, &initials, &grid, &Presets::default(), &BackendConfig::default()).unwrap();
        let paths: Vec<_> = curves
            .iter()
            .map(|(c, obs)| {
                let path = build_path(c.initial_state, g, obs).unwrap();
                if *c.p_gs.last().unwrap() > 0.5 {
                    assert_eq!(*path.states.last().unwrap(), g);
                }
                path
            })
            .collect();
        union_network(&paths, &p)
    };
    let (a, b) = (net(gs[0]), net(gs[1]));
    assert_eq!(gs[1], complement_index(gs[0], 5));
    assert!(a.edges.len() > 1);
    assert_eq!(a.relabeled(|s| complement_index(s, 5)), b);
}
