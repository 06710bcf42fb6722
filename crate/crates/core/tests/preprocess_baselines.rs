mod common;

use approx::assert_abs_diff_eq;
use ndarray::{array, Array2};
use proptest::prelude::*;

use common::*;
use transfer_risk::baselines::{knn_predict, logistic_fit, logistic_fit_from, logistic_predict, KnnModel};
use transfer_risk::preprocess::{
    fit_standardizer, mice_impute, mice_impute_temporal, round_half_up, smote_with_origins,
    stratified_split, ImputeConfig, SmoteConfig,
};

fn labelled(max_n: usize, d: usize) -> impl Strategy<Value = (Array2<f64>, Vec<u8>)> {
    (6..=max_n).prop_flat_map(move |n| {
        (
            proptest::collection::vec(-20i32..20, n * d),
            proptest::collection::vec(0u8..2, n),
        )
            .prop_map(move |(v, mut y)| {
                y[0] = 1;
                y[1] = 1;
                y[2] = 0;
                y[3] = 0;
                (Array2::from_shape_fn((n, d), |(i, j)| f64::from(v[i * d + j]) / 4.0), y)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smote_points_lie_on_neighbor_segments((x, y) in labelled(80, 3), k in 1usize..6, ratio in 0.3f64..=1.0, seed in any::<u64>()) {
        let cfg = SmoteConfig { k_neighbors: k, target_ratio: ratio, seed };
        let out = smote_with_origins(&x, &y, &cfg).unwrap();
        let n_pos = y.iter().filter(|&&v| v == 1).count();
        let minority = u8::from(n_pos <= y.len() - n_pos);
        let min_rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority).collect();
        let n_major = y.len() - min_rows.len();
        let k_eff = k.min(min_rows.len() - 1);
        for (g, o) in out.origins.iter().enumerate() {
            prop_assert_eq!(y[o.base], minority);
            prop_assert_eq!(y[o.neighbor], minority);
            let row = out.x.row(x.nrows() + g).to_vec();
            prop_assert!(dist_to_segment(&row, &x.row(o.base).to_vec(), &x.row(o.neighbor).to_vec()) < 1e-9);
            // neighbor is within the k nearest minority rows (distance rank)
            let d = |j: usize| (&x.row(o.base) - &x.row(j)).mapv(|v| v * v).sum();
            let closer = min_rows.iter().filter(|&&j| j != o.base && d(j) < d(o.neighbor)).count();
            prop_assert!(closer < k_eff);
        }
        let grown = out.y.iter().filter(|&&v| v == minority).count();
        let target = ((ratio * n_major as f64) - 1e-9).ceil() as usize;
        prop_assert_eq!(grown, target.max(min_rows.len()));
        prop_assert_eq!(out.x.slice(ndarray::s![..x.nrows(), ..]), x.view());
    }

    #[test]
    fn stratified_split_keeps_proportions(n0 in 2usize..200, n1 in 2usize..60, frac in 0.1f64..0.9, seed in any::<u64>()) {
        let labels: Vec<u8> = (0..n0 + n1).map(|i| u8::from(i >= n0)).collect();
        let ids: Vec<usize> = (0..labels.len()).collect();
        let (train, test) = stratified_split(&ids, &labels, frac, seed).unwrap();
        prop_assert_eq!(train.len() + test.len(), labels.len());
        let pos_train = train.iter().filter(|&&i| labels[i] == 1).count();
        prop_assert_eq!(pos_train, round_half_up(n1 as f64 * frac).min(n1));
        prop_assert_eq!(train.len() - pos_train, round_half_up(n0 as f64 * frac).min(n0));
        let p_all = n1 as f64 / labels.len() as f64;
        let p_train = pos_train as f64 / train.len() as f64;
        // each class count is off by at most half a row
        prop_assert!((p_all - p_train).abs() <= 0.5 / train.len() as f64 + 1e-12);
        prop_assert!(train.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn standardized_columns_are_centred(x in proptest::collection::vec(-50.0f64..50.0, 12..60)) {
        let n = x.len() / 3;
        let m = Array2::from_shape_vec((n, 3), x[..n * 3].to_vec()).unwrap();
        let s = fit_standardizer(&m);
        let z = s.apply(&m);
        for c in 0..3 {
            prop_assert!(z.column(c).mean().unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn knn_matches_brute_force((x, y) in labelled(60, 2), k in 1usize..6, q in proptest::collection::vec(-20i32..20, 2..20)) {
        let k = k.min(x.nrows());
        let m = KnnModel::new(x.clone(), y.clone(), k).unwrap();
        let queries = Array2::from_shape_fn((q.len() / 2, 2), |(i, j)| f64::from(q[2 * i + j]) / 4.0);
        let got = knn_predict(&m, &queries).unwrap();
        for (qi, p) in got.iter().enumerate() {
            let mut d: Vec<(f64, usize)> = (0..x.nrows())
                .map(|i| ((&x.row(i) - &queries.row(qi)).mapv(|v| v * v).sum(), i))
                .collect();
            d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let pos = d[..k].iter().filter(|&&(_, i)| y[i] == 1).count();
            prop_assert_eq!(*p, pos as f64 / k as f64);
        }
    }
}

#[test]
fn logistic_restarts_reach_the_same_optimum() {
    let mut r = rng(3);
    let x = Array2::from_shape_fn((120, 4), |_| rand::Rng::random_range(&mut r, -2.0..2.0));
    let y: Vec<u8> = (0..120)
        .map(|i| u8::from(x[[i, 0]] - 0.5 * x[[i, 2]] + rand::Rng::random_range(&mut r, -1.0..1.0) > 0.0))
        .collect();
    let a = logistic_fit(&x, &y, 1e-3, 1000, 1e-10).unwrap();
    let b = logistic_fit_from(&x, &y, 1e-3, 1000, 1e-10, &[3.0, -2.0, 1.0, 5.0, -4.0]).unwrap();
    for (p, q) in a.weights.iter().zip(b.weights.iter()) {
        assert_abs_diff_eq!(p, q, epsilon = 1e-5);
    }
    assert_abs_diff_eq!(a.bias, b.bias, epsilon = 1e-5);
    let p = logistic_predict(&a, &x).unwrap();
    assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
    let dup = logistic_predict(&a, &array![[0.1, 0.2, 0.3, 0.4], [0.1, 0.2, 0.3, 0.4]]).unwrap();
    assert_eq!(dup[0], dup[1]);
}

#[test]
fn knn_worked_examples() {
    let x = array![[0.0], [1.0], [2.0], [5.0]];
    let y = vec![1, 1, 0, 1];
    let one = KnnModel::new(x.clone(), y.clone(), 1).unwrap();
    assert_eq!(knn_predict(&one, &array![[2.0]]).unwrap(), vec![0.0]);
    let all = KnnModel::new(x.clone(), y.clone(), 4).unwrap();
    assert_eq!(knn_predict(&all, &array![[-9.0]]).unwrap(), vec![0.75]);
    let three = KnnModel::new(x, y, 3).unwrap();
    assert!((knn_predict(&three, &array![[1.5]]).unwrap()[0] - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn standardizer_worked_example() {
    let s = fit_standardizer(&array![[0.0], [2.0]]);
    assert_eq!(s.apply(&array![[4.0]]), array![[3.0]]);
}

#[test]
fn imputation_is_idempotent_and_respects_time() {
    let mut r = rng(8);
    let mut m = Array2::from_shape_fn((80, 10), |(i, j)| (i as f64 * 0.1).sin() * (j + 1) as f64);
    for v in m.iter_mut() {
        if rand::Rng::random::<f64>(&mut r) < 0.15 {
            *v = f64::NAN;
        }
    }
    let cfg = ImputeConfig::default();
    let once = mice_impute(&m, &cfg).unwrap().matrix;
    assert!(once.iter().all(|v| v.is_finite()));
    assert_eq!(mice_impute(&once, &cfg).unwrap().matrix, once);

    // day-2 values must not influence day-1 imputations
    let t1 = mice_impute_temporal(&m, 5, &cfg).unwrap().matrix;
    let mut m2 = m.clone();
    for i in 0..80 {
        for j in 5..10 {
            if m2[[i, j]].is_finite() {
                m2[[i, j]] += 100.0;
            }
        }
    }
    let t2 = mice_impute_temporal(&m2, 5, &cfg).unwrap().matrix;
    assert_eq!(t1.slice(ndarray::s![.., ..5]), t2.slice(ndarray::s![.., ..5]));
}
