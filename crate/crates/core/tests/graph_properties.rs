mod common;

use std::collections::BTreeSet;

use ndarray::Array2;
use proptest::prelude::*;

use common::*;
use transfer_risk::simgraph::{
    aggregate_mean, diffusion_aggregate, gaussian_weights, knn_edges, knn_graph, neighborhood, transition,
    Adjacency, Alpha, KernelConfig, WeightedGraph,
};

fn points(max_n: usize, d: usize) -> impl Strategy<Value = Array2<f64>> {
    (2..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(-10i32..10, n * d)
            .prop_map(move |v| Array2::from_shape_fn((n, d), |(i, j)| f64::from(v[i * d + j]) / 2.0))
    })
}

fn weighted_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0.0f64..1.0, 0.001f64..1.0), n * n).prop_map(move |cells| {
            let mut e = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let (keep, w) = cells[i * n + j];
                    if keep < 0.3 {
                        e.push((i, j, w));
                    }
                }
            }
            WeightedGraph::from_edges(ids(n), e).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // integer-valued coordinates make distance ties common
    #[test]
    fn knn_matches_all_pairs_scan(x in points(60, 2), k_frac in 0.0f64..1.0) {
        let n = x.nrows();
        let k = 1 + ((n - 2) as f64 * k_frac) as usize;
        let e = knn_edges(&x, k).unwrap();
        let got: BTreeSet<_> = e.pairs.iter().copied().collect();
        prop_assert_eq!(got, brute_knn_pairs(&x, k));
    }

    #[test]
    fn kernel_weights_symmetric_bounded_monotone(x in points(30, 3)) {
        let n = x.nrows();
        let g = knn_graph(ids(n), &x, &KernelConfig::new(3)).unwrap();
        let mut by_dist = Vec::new();
        for (i, j, w) in g.edges() {
            prop_assert!(w > 0.0 && w <= 1.0);
            prop_assert_eq!(g.weight(i, j), g.weight(j, i));
            let d: f64 = (0..3).map(|c| (x[[i, c]] - x[[j, c]]).powi(2)).sum();
            by_dist.push((d, w));
        }
        by_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for p in by_dist.windows(2) {
            prop_assert!(p[1].1 <= p[0].1);
        }
    }

    #[test]
    fn transition_rows_are_stochastic(g in weighted_graph(40)) {
        let m = transition(&g).unwrap();
        prop_assert!(max_row_sum_error(&m) <= 1e-9);
        for i in 0..m.n() {
            prop_assert!(m.row(i).iter().all(|&(_, w)| w >= 0.0));
            if g.neighbors(i).is_empty() {
                prop_assert_eq!(m.row(i), &[(i, 1.0)][..]);
            }
        }
    }

    #[test]
    fn identical_days_match_dense_power_sum(g in weighted_graph(20), horizon in 1usize..=5) {
        let m = transition(&g).unwrap();
        let a = diffusion_aggregate(&vec![m.clone(); horizon]).unwrap();
        let oracle = dense_power_sum(&m.to_dense(), horizon);
        for (x, y) in a.matrix.iter().zip(oracle.iter()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        prop_assert_eq!(a.horizon, horizon);
    }

    #[test]
    fn mean_of_identical_days_is_the_day(g in weighted_graph(25), days in 1usize..=4) {
        let m = aggregate_mean(&vec![g.clone(); days]).unwrap();
        prop_assert_eq!(m.n_edges(), g.n_edges());
        for (i, j, w) in g.edges() {
            prop_assert!((m.weight(i, j) - w).abs() < 1e-12);
        }
    }
}

#[test]
fn knn_at_two_hundred_nodes() {
    let x = Array2::from_shape_fn((200, 3), |(i, j)| ((i * 31 + j * 17) % 23) as f64);
    for k in [1, 5, 20] {
        let got: BTreeSet<_> = knn_edges(&x, k).unwrap().pairs.into_iter().collect();
        assert_eq!(got, brute_knn_pairs(&x, k));
    }
}

#[test]
fn different_days_use_ordered_products() {
    let a = transition(&WeightedGraph::from_edges(ids(3), [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()).unwrap();
    let b = transition(&WeightedGraph::from_edges(ids(3), [(0, 2, 0.5)]).unwrap()).unwrap();
    let d = diffusion_aggregate(&[a.clone(), b.clone()]).unwrap();
    let (ma, mb) = (a.to_dense(), b.to_dense());
    let oracle = &ma + &ma.dot(&mb);
    for (x, y) in d.matrix.iter().zip(oracle.iter()) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!(d.is_directed());
}

#[test]
fn single_day_diffusion_is_the_transition_matrix() {
    let x = random_features(25, 5, 3);
    let g = knn_graph(ids(25), &x, &KernelConfig::new(4)).unwrap();
    let m = transition(&g).unwrap();
    let d = diffusion_aggregate(std::slice::from_ref(&m)).unwrap();
    assert_eq!(d.matrix, m.to_dense());
}

#[test]
fn fixed_alpha_weight() {
    // ‖(0,0) − (1,1)‖² = 2, α = 2 → e⁻¹
    let x = ndarray::array![[0.0, 0.0], [1.0, 1.0]];
    let e = knn_edges(&x, 1).unwrap();
    let g = gaussian_weights(ids(2), &x, &e, Alpha::Fixed(2.0)).unwrap();
    assert!((g.weight(0, 1) - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn neighborhood_floor() {
    let g = WeightedGraph::from_edges(ids(4), [(0, 1, 0.5), (0, 2, 0.01), (0, 3, 0.9)]).unwrap();
    let all = neighborhood(&g, "p0000", 0.0).unwrap();
    assert_eq!(all.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>(), ["p0003", "p0001", "p0002"]);
    let kept = neighborhood(&g, "p0000", 0.014).unwrap();
    assert_eq!(kept.len(), 2);
    let isolated = WeightedGraph::from_edges(ids(2), []).unwrap();
    assert!(neighborhood(&isolated, "p0001", 0.0).unwrap().is_empty());
    assert!(neighborhood(&g, "nobody", 0.0).is_err());
}
