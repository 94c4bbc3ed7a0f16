use proptest::prelude::*;
use stablecut::graph::{apply_perturbation, contract, merge_vertices, quadratic_form, Perturbation};
use stablecut::oracle::{brute_force_max_cut, local_stability_gamma, stability_gamma, OracleConfig};
use stablecut::spectral::{build_diagonal_from_cut, kernel_residual};
use stablecut::{cut_value, Cut, WeightedGraph};

fn arb_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..10.0], n * (n - 1) / 2).prop_map(move |ws| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if ws[k] > 0.0 {
                        edges.push((i, j, ws[k]));
                    }
                    k += 1;
                }
            }
            WeightedGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn arb_graph_and_cut(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Cut)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n))
            .prop_map(|(g, s)| (g, Cut::new(s).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cut_value_ignores_orientation((g, c) in arb_graph_and_cut(10)) {
        prop_assert_eq!(cut_value(&g, &c).unwrap(), cut_value(&g, &c.negated()).unwrap());
    }

    #[test]
    fn merge_preserves_cut_values((g, c) in arb_graph_and_cut(9), i in 0usize..9, j in 0usize..9) {
        let (i, j) = (i % g.n(), j % g.n());
        prop_assume!(i != j);
        let (h, map) = merge_vertices(&g, i, j).unwrap();
        prop_assert_eq!(h.n(), g.n() - 1);
        let small: Vec<i8> = (0..h.n()).map(|k| c.signs()[map.iter().position(|&m| m == k).unwrap()]).collect();
        let small = Cut::new(small).unwrap();
        let lifted = small.lift(&map).unwrap();
        prop_assert!((cut_value(&h, &small).unwrap() - cut_value(&g, &lifted).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn contraction_is_sound((g, c) in arb_graph_and_cut(9), k in 1usize..5) {
        let labels: Vec<usize> = (0..g.n()).map(|v| v % k.min(g.n())).collect();
        let kk = k.min(g.n());
        let h = contract(&g, &labels, kk).unwrap();
        let small = Cut::new(c.signs()[..kk].to_vec()).unwrap();
        let lifted = small.lift(&labels).unwrap();
        prop_assert!((cut_value(&h, &small).unwrap() - cut_value(&g, &lifted).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn diagonal_puts_cut_in_kernel((g, c) in arb_graph_and_cut(12)) {
        let d = build_diagonal_from_cut(&g, &c).unwrap();
        prop_assert!(kernel_residual(&g, &d, &c).unwrap() <= 1e-10 * g.total_weight().max(1.0));
        let trace: f64 = d.iter().sum();
        prop_assert!((trace + quadratic_form(&g, &c).unwrap()).abs() <= 1e-9 * g.total_weight().max(1.0));
    }

    #[test]
    fn local_stability_dominates_global(g in arb_graph(8)) {
        let cfg = OracleConfig::default();
        let r = stability_gamma(&g, &cfg).unwrap();
        let local = local_stability_gamma(&g, &r.max_cut).unwrap();
        prop_assert_eq!(local, r.gamma_local);
        prop_assert!(local.value() >= r.gamma_star.value() * (1.0 - 1e-9) || !r.unique);
        prop_assert!((0.0..=1.0).contains(&r.alpha_star));
    }

    #[test]
    fn stable_max_cut_survives_worst_perturbation(g in arb_graph(7), frac in 0.0f64..0.99) {
        let cfg = OracleConfig::default();
        let r = stability_gamma(&g, &cfg).unwrap();
        prop_assume!(r.unique && r.gamma_star.is_finite() && r.gamma_star.value() > 1.0 + 1e-6);
        let gamma = 1.0 + frac * (r.gamma_star.value() - 1.0);
        // scale every non-cut edge by γ: the adversary's best move
        let n = g.n();
        let mut p = Perturbation::identity(n, gamma).unwrap();
        for (i, j, _) in g.edges() {
            if r.max_cut.signs()[i] == r.max_cut.signs()[j] {
                p.set(i, j, gamma);
            }
        }
        let h = apply_perturbation(&g, &p).unwrap();
        let m = brute_force_max_cut(&h, &cfg).unwrap();
        prop_assert!(m.cut.same_partition(&r.max_cut));
    }
}
