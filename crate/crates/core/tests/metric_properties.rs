mod common;

use proptest::prelude::*;

use common::*;
use transfer_risk::analysis::{
    kaplan_meier, lcc, lcc_cluster, rank_sum, rank_sum_exact, rank_sum_normal, BinaryGraph,
};
use transfer_risk::eval::{auc, roc_curve, sen_spe, trapezoid_area, youden_threshold};
use transfer_risk::simgraph::{DiffusionGraph, WeightedGraph};

/// Scores on a coarse grid (ties likely) with both classes present.
fn scored(max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(0u8..12, n),
            proptest::collection::vec(0u8..2, n),
        )
            .prop_map(|(s, mut y)| {
                y[0] = 0;
                y[1] = 1;
                (s.into_iter().map(|v| f64::from(v) / 12.0).collect(), y)
            })
    })
}

fn adjacency(max_n: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1..=max_n, 0.0f64..0.5, any::<u64>()).prop_map(|(n, p, s)| random_graph(n, p, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auc_equals_pair_count((s, y) in scored(50)) {
        prop_assert_eq!(auc(&s, &y).unwrap(), brute_auc(&s, &y));
    }

    #[test]
    fn auc_equals_trapezoid((s, y) in scored(50)) {
        let pts = roc_curve(&s, &y).unwrap();
        prop_assert!((trapezoid_area(&pts) - auc(&s, &y).unwrap()).abs() <= 1e-12);
        prop_assert_eq!((pts[0].fpr, pts[0].tpr), (0.0, 0.0));
        let last = pts.last().unwrap();
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in pts.windows(2) {
            prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
        }
    }

    #[test]
    fn auc_invariant_under_increasing_transform((s, y) in scored(50)) {
        let t: Vec<f64> = s.iter().map(|v| (3.0 * v).exp() - 7.0).collect();
        prop_assert_eq!(auc(&s, &y).unwrap(), auc(&t, &y).unwrap());
    }

    #[test]
    fn auc_of_negated_scores_without_ties(n in 2usize..40, seed in any::<u64>()) {
        let mut r = rng(seed);
        let s: Vec<f64> = (0..n).map(|i| i as f64 + rand::Rng::random::<f64>(&mut r) * 0.5).collect();
        let mut y: Vec<u8> = (0..n).map(|_| rand::Rng::random_range(&mut r, 0..2)).collect();
        y[0] = 1;
        y[n - 1] = 0;
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        prop_assert!((auc(&s, &y).unwrap() + auc(&neg, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lcc_matches_triangle_enumeration(adj in adjacency(120)) {
        let w = WeightedGraph::from_edges(ids(adj.len()), edge_triples(&adj)).unwrap();
        prop_assert_eq!(lcc(&w, 0.0), brute_lcc(&adj));
    }

    #[test]
    fn km_without_censoring_is_one_minus_ecdf(times in proptest::collection::vec(1u8..20, 1..80)) {
        let t: Vec<f64> = times.iter().map(|&v| f64::from(v)).collect();
        let c = kaplan_meier(&t, &vec![true; t.len()]).unwrap();
        for q in 0..=21 {
            let q = f64::from(q);
            prop_assert!((c.survival_at(q) - survivor_fn(&t, q)).abs() < 1e-12);
        }
    }

    // a subject censored after the last observed time contributes the same
    // at-risk counts whether it is censored just after or much later
    #[test]
    fn late_censoring_time_is_irrelevant(
        obs in proptest::collection::vec((1u8..15, any::<bool>()), 1..50),
        extra in 1u8..20,
    ) {
        let t: Vec<f64> = obs.iter().map(|&(v, _)| f64::from(v)).collect();
        let e: Vec<bool> = obs.iter().map(|&(_, b)| b).collect();
        let last = t.iter().copied().fold(0.0, f64::max);
        let with = |when: f64| {
            let (mut t2, mut e2) = (t.clone(), e.clone());
            t2.push(when);
            e2.push(false);
            kaplan_meier(&t2, &e2).unwrap()
        };
        let early = with(last + 0.5);
        let late = with(last + 0.5 + f64::from(extra));
        for &tt in &t {
            prop_assert_eq!(early.survival_at(tt), late.survival_at(tt));
        }
    }

    #[test]
    fn rank_sum_swap_symmetry(
        a in proptest::collection::vec(0u8..10, 1..25),
        b in proptest::collection::vec(0u8..10, 1..25),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let ab = rank_sum(&a, &b);
        let ba = rank_sum(&b, &a);
        prop_assert!((ab.u + ba.u - (a.len() * b.len()) as f64).abs() < 1e-9);
        prop_assert!((ab.p - ba.p).abs() < 1e-12);
        prop_assert!(ab.p > 0.0 && ab.p <= 1.0);
    }

    #[test]
    fn rank_sum_u_counts_pairs(
        a in proptest::collection::vec(0u8..6, 1..15),
        b in proptest::collection::vec(0u8..6, 1..15),
    ) {
        let mut u = 0.0;
        for x in &a {
            for y in &b {
                u += if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 };
            }
        }
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        prop_assert_eq!(rank_sum(&a, &b).u, u);
    }
}

#[test]
fn exact_and_normal_agree_at_fifteen_each() {
    let mut worst: f64 = 0.0;
    for seed in 0..200 {
        let mut r = rng(seed);
        let shift = f64::from((seed % 5) as u8) * 0.3;
        let a: Vec<f64> = (0..15).map(|_| rand::Rng::random::<f64>(&mut r)).collect();
        let b: Vec<f64> = (0..15).map(|_| rand::Rng::random::<f64>(&mut r) + shift).collect();
        let e = rank_sum_exact(&a, &b);
        let n = rank_sum_normal(&a, &b);
        assert_eq!(e.u, n.u);
        worst = worst.max((e.p - n.p).abs());
    }
    assert!(worst <= 0.02, "max |p_exact − p_normal| = {worst}");
}

#[test]
fn rank_sum_worked_examples() {
    let r = rank_sum(&[1.0, 2.0], &[10.0, 20.0]);
    assert_eq!(r.u, 0.0);
    assert!((r.p - 1.0 / 3.0).abs() < 1e-12);
    let same = [3.0, 1.0, 4.0, 1.0, 5.0];
    let r = rank_sum(&same, &same);
    assert_eq!(r.u, 12.5);
    assert_eq!(r.p, 1.0);
}

#[test]
fn eval_worked_examples() {
    assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]).unwrap(), 0.75);
    assert_eq!(auc(&[0.5; 4], &[0, 1, 0, 1]).unwrap(), 0.5);
    assert_eq!(sen_spe(&[0.9, 0.2, 0.7, 0.1], &[1, 0, 1, 0], 0.5), (1.0, 1.0));
    assert_eq!(sen_spe(&[0.9, 0.2, 0.7, 0.1], &[1, 0, 1, 0], 0.0).0, 1.0);
    assert_eq!(sen_spe(&[0.9, 0.2, 0.7, 0.1], &[1, 0, 1, 0], 0.95), (0.0, 1.0));
    let diag = roc_curve(&[0.3; 5], &[0, 1, 1, 0, 1]).unwrap();
    assert_eq!(diag.iter().map(|p| (p.fpr, p.tpr)).collect::<Vec<_>>(), [(0.0, 0.0), (1.0, 1.0)]);
    assert!(auc(&[0.1, 0.2], &[1, 1]).is_err());
    let t = youden_threshold(&[0.9, 0.8, 0.3, 0.1], &[1, 1, 0, 0]).unwrap();
    assert_eq!(sen_spe(&[0.9, 0.8, 0.3, 0.1], &[1, 1, 0, 0], t), (1.0, 1.0));
}

#[test]
fn directed_graphs_are_symmetrized_before_lcc() {
    // 0→1, 1→2, 2→0 only: undirected triangle after union
    let m = ndarray::array![[0.0, 0.5, 0.0], [0.0, 0.0, 0.5], [0.5, 0.0, 0.0]];
    let d = DiffusionGraph {
        node_ids: ids(3),
        matrix: m,
        horizon: 1,
    };
    assert_eq!(lcc(&d, 0.014), vec![1.0; 3]);
    assert_eq!(lcc(&d, 0.5), vec![0.0; 3]);
}

#[test]
fn cluster_cutoffs() {
    let adj = random_graph(50, 0.2, 9);
    let g = BinaryGraph::from_edges(ids(50), edge_triples(&adj), 0.0);
    let c = g.lcc();
    assert_eq!(lcc_cluster(&g, &c, 0.0).n_high_risk(), 50);
    let top = lcc_cluster(&g, &c, 1.0);
    assert!(top.high_risk.iter().zip(&c).all(|(&h, &v)| h == (v == 1.0)));
}
