mod common;

use std::path::Path;

use ergm_core::anneal::energy;
use ergm_core::experiments::ecoli_model;
use ergm_core::io::{parse_edge_list, write_edge_list, Preprocessing};
use ergm_core::mple::design_rows;
use ergm_core::{enumerate, mple, Dyad, ModelSpec, Network, StatTerm};
use proptest::prelude::*;

fn arb_network(max_n: usize) -> impl Strategy<Value = Network> {
    (3..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let edges = common::dyads(n).into_iter().zip(bits).filter(|(_, b)| *b).map(|(d, _)| d);
            Network::from_edges(n, edges).unwrap()
        })
    })
}

fn every_term() -> ModelSpec {
    ModelSpec::new(vec![
        StatTerm::Edges,
        StatTerm::Triangles,
        StatTerm::KStar { k: 2 },
        StatTerm::KStar { k: 3 },
        StatTerm::DegreeCount { d: 0 },
        StatTerm::DegreeCount { d: 2 },
        StatTerm::GwDegree { decay: 0.25 },
        StatTerm::GwDegree { decay: 1.5 },
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn toggle_delta_matches_recomputation(net in arb_network(12), k in any::<usize>()) {
        let spec = every_term();
        let n = net.node_count();
        let d = Dyad::from_linear_index(k % net.dyad_count(), n).unwrap();
        let before = spec.stat_vector(&net);
        let delta = spec.toggle_delta(&net, d);
        let mut after_net = net.clone();
        after_net.toggle(d);
        let after = spec.stat_vector(&after_net);
        for j in 0..spec.dim() {
            prop_assert!((after[j] - before[j] - delta[j]).abs() < 1e-9, "term {j}: {} vs {}", after[j] - before[j], delta[j]);
        }
    }

    #[test]
    fn statistics_are_invariant_under_relabelling(net in arb_network(10), seed in any::<u64>()) {
        let spec = ecoli_model();
        let n = net.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let relabelled = net.permuted(&perm).unwrap();
        let (a, b) = (spec.stat_vector(&net), spec.stat_vector(&relabelled));
        for j in 0..spec.dim() {
            prop_assert!((a[j] - b[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn edge_list_round_trips(net in arb_network(15)) {
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let loaded = parse_edge_list(&text, Path::new("mem"), Preprocessing::AsIs).unwrap();
        prop_assert_eq!(loaded.network, net);
    }

    #[test]
    fn energy_vanishes_exactly_at_the_target(net in arb_network(9), other in arb_network(9)) {
        let spec = ModelSpec::edges_triangles();
        let t = spec.stat_vector(&net);
        prop_assert_eq!(energy(&spec, &net, &t, &[1.0, 1.0]), 0.0);
        let e = energy(&spec, &other, &t, &[1.0, 1.0]);
        prop_assert_eq!(e == 0.0, spec.stat_vector(&other) == t);
    }

    #[test]
    fn mple_score_vanishes_when_it_converges(net in arb_network(9)) {
        let spec = ModelSpec::edges_triangles();
        if let Ok(fit) = mple(&spec, &net) {
            let mut score = [0.0; 2];
            for row in design_rows(&spec, &net) {
                let eta: f64 = fit.theta.iter().zip(row.covariates.iter()).map(|(a, b)| a * b).sum();
                let resid = f64::from(u8::from(row.response)) - 1.0 / (1.0 + (-eta).exp());
                for j in 0..2 {
                    score[j] += resid * row.covariates[j];
                }
            }
            prop_assert!(score.iter().all(|s| s.abs() < 1e-6), "{score:?}");
        }
    }

    #[test]
    fn exact_normalizer_matches_naive_sum(n in 2usize..=5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let table = enumerate(&ModelSpec::edges_triangles(), n, 9).unwrap();
        prop_assert_eq!(table.total(), 1u128 << (n * (n - 1) / 2));
        let naive = common::naive_log_normalizer(&common::naive_table(n), &[a, b]);
        prop_assert!((table.log_normalizer(&[a, b]) - naive).abs() < 1e-9);
    }
}
