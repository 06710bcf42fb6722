//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transfer_risk::analysis::{kaplan_meier, lcc_cluster, BinaryGraph, Membership, SurvivalCurve};
use transfer_risk::cohort::{generate_synthetic_cohort, Cohort, GenConfig};
use transfer_risk::sage::{backward, forward, forward_with_plan, loss, Mode, SageParams, SamplingPlan};
use transfer_risk::simgraph::{Topology, TransitionMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i:04}")).collect()
}

/// AUC by counting every positive/negative pair.
pub fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if si > sj {
                    num += 1.0;
                } else if si == sj {
                    num += 0.5;
                }
            }
        }
    }
    num / pairs
}

/// LCC per node by enumerating neighbor pairs on a dense adjacency matrix.
pub fn brute_lcc(adj: &[Vec<bool>]) -> Vec<f64> {
    let n = adj.len();
    (0..n)
        .map(|v| {
            let nb: Vec<usize> = (0..n).filter(|&u| u != v && adj[v][u]).collect();
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut t = 0;
            for a in 0..d {
                for b in a + 1..d {
                    if adj[nb[a]][nb[b]] {
                        t += 1;
                    }
                }
            }
            t as f64 / (d * (d - 1) / 2) as f64
        })
        .collect()
}

/// Σ_{t=1..T} Mᵗ by repeated dense multiplication.
pub fn dense_power_sum(m: &Array2<f64>, horizon: usize) -> Array2<f64> {
    let mut p = m.clone();
    let mut acc = m.clone();
    for _ in 1..horizon {
        p = p.dot(m);
        acc += &p;
    }
    acc
}

/// kNN union edge set by scanning all pairs per node.
pub fn brute_knn_pairs(x: &Array2<f64>, k: usize) -> BTreeSet<(usize, usize)> {
    let n = x.nrows();
    let mut out = BTreeSet::new();
    for i in 0..n {
        let mut d: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let s: f64 = (0..x.ncols()).map(|c| (x[[i, c]] - x[[j, c]]).powi(2)).sum();
                (s, j)
            })
            .collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(_, j) in d.iter().take(k) {
            out.insert((i.min(j), i.max(j)));
        }
    }
    out
}

/// Fraction of event times strictly greater than `t`.
pub fn survivor_fn(times: &[f64], t: f64) -> f64 {
    times.iter().filter(|&&x| x > t).count() as f64 / times.len() as f64
}

/// Distance from `p` to the segment `[a, b]`.
pub fn dist_to_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (ab.iter().zip(&ap).map(|(u, v)| u * v).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    ap.iter()
        .zip(&ab)
        .map(|(v, u)| (v - t * u).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Undirected random graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Vec<Vec<bool>> {
    let mut r = rng(seed);
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    adj
}

pub fn edge_triples(adj: &[Vec<bool>]) -> Vec<(usize, usize, f64)> {
    let n = adj.len();
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj[i][j] {
                e.push((i, j, 1.0));
            }
        }
    }
    e
}

pub fn max_row_sum_error(m: &TransitionMatrix) -> f64 {
    (0..m.n()).map(|i| (m.row_sum(i) - 1.0).abs()).fold(0.0, f64::max)
}

pub fn random_features(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut r = rng(seed);
    Array2::from_shape_fn((n, d), |_| r.random_range(-1.0..1.0))
}

/// 6-node graph used for the gradient check: a 4-cycle with a chord, a
/// pendant node, and an isolated node.
pub fn gradient_fixture() -> (Topology, Array2<f64>, Vec<usize>, Vec<u8>) {
    let adj = vec![vec![1, 3, 2], vec![0, 2], vec![1, 3, 0, 4], vec![2, 0], vec![2], vec![]];
    let topo = Topology::from_lists(ids(6), adj).unwrap();
    let x = random_features(6, 3, 11);
    (topo, x, vec![0, 1, 2, 3, 4, 5], vec![1, 0, 1, 0, 0, 1])
}

/// Largest relative difference between analytic and central-difference
/// gradients over every weight, for K = 2 and hidden width 4.
pub fn gradient_check_max_rel_error(h: f64) -> f64 {
    let (topo, x, targets, labels) = gradient_fixture();
    let dims = SageParams::layer_dims(3, 4, 2);
    let params = SageParams::init(&dims, 5);
    let plan = SamplingPlan::new(&topo, 2, 2, 9).with_dropout(&topo, &params.hidden_widths(), 0.25, 9);
    let objective = |p: &SageParams| {
        let c = forward_with_plan(p, &topo, &x, &plan).unwrap();
        let sel = c.logits.select(ndarray::Axis(0), &targets);
        loss(&sel, &labels)
    };
    let cache = forward_with_plan(&params, &topo, &x, &plan).unwrap();
    let grads = backward(&params, &plan, &cache, &targets, &labels);
    let mut worst: f64 = 0.0;
    for (k, g) in grads.iter().enumerate() {
        for idx in 0..g.len() {
            let (r, c) = (idx / g.ncols(), idx % g.ncols());
            let mut plus = params.clone();
            plus.weights[k][[r, c]] += h;
            let mut minus = params.clone();
            minus.weights[k][[r, c]] -= h;
            let numeric = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let analytic = g[[r, c]];
            let scale = analytic.abs().max(numeric.abs());
            let err = if scale < 1e-8 {
                (analytic - numeric).abs()
            } else {
                (analytic - numeric).abs() / scale
            };
            worst = worst.max(err);
        }
    }
    worst
}

/// Base graph plus 10 new nodes attached to existing nodes. Returns the
/// largest prediction change among nodes more than `K` hops from every new
/// node, and how many such nodes there were.
pub fn locality_max_change(seed: u64) -> (f64, usize) {
    let n = 60;
    let layers = 2;
    let sample = 3;
    let base_adj = random_graph(n, 0.05, seed);
    let lists = |adj: &[Vec<bool>]| -> Vec<Vec<usize>> {
        adj.iter()
            .map(|row| row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect())
            .collect()
    };
    let base = Topology::from_lists(ids(n), lists(&base_adj)).unwrap();

    let mut r = rng(seed ^ 0xabc);
    let mut ext = vec![vec![false; n + 10]; n + 10];
    for i in 0..n {
        for j in 0..n {
            ext[i][j] = base_adj[i][j];
        }
    }
    for v in n..n + 10 {
        let u = r.random_range(0..n);
        ext[v][u] = true;
        ext[u][v] = true;
    }
    let mut ext_ids = ids(n);
    ext_ids.extend((0..10).map(|i| format!("new{i:02}")));
    let extended = Topology::from_lists(ext_ids, lists(&ext)).unwrap();

    let x_base = random_features(n, 4, seed + 1);
    let mut x_ext = Array2::zeros((n + 10, 4));
    x_ext.slice_mut(ndarray::s![..n, ..]).assign(&x_base);
    x_ext
        .slice_mut(ndarray::s![n.., ..])
        .assign(&random_features(10, 4, seed + 2));

    let params = SageParams::init(&SageParams::layer_dims(4, 8, layers), seed + 3);
    let nodes: Vec<usize> = (0..n).collect();
    let mode = Mode::Eval { seed: 77 };
    let before = forward(&params, &base, &x_base, &nodes, mode, sample).unwrap();
    let after = forward(&params, &extended, &x_ext, &nodes, mode, sample).unwrap();
    let hops = extended.hops_from(&(n..n + 10).collect::<Vec<_>>());
    let mut worst: f64 = 0.0;
    let mut far = 0;
    for v in 0..n {
        if hops[v].is_some_and(|d| d <= layers) {
            continue;
        }
        far += 1;
        for c in 0..2 {
            worst = worst.max((before[[v, c]] - after[[v, c]]).abs());
        }
    }
    (worst, far)
}

/// A planted cluster over the severe patients of a generated cohort.
pub struct PlantedCluster {
    pub cohort: Cohort,
    pub graph: BinaryGraph,
    pub planted: Vec<bool>,
    pub membership: Membership,
}

/// Severe patients form a near-clique (each pair linked with probability
/// 0.9); everyone else sits on a sparse random graph; each severe patient
/// also gets one edge into the rest of the graph.
pub fn planted_cluster(seed: u64, cutoff: f64) -> PlantedCluster {
    let cohort = generate_synthetic_cohort(&GenConfig {
        seed,
        ..GenConfig::default()
    })
    .unwrap();
    let n = cohort.len();
    let planted: Vec<bool> = cohort.patients.iter().map(|p| p.outcome.is_transfer()).collect();
    let mut r = rng(seed ^ 0x5eed);
    let mut adj = vec![vec![false; n]; n];
    let link = |adj: &mut Vec<Vec<bool>>, i: usize, j: usize| {
        if i != j {
            adj[i][j] = true;
            adj[j][i] = true;
        }
    };
    let others: Vec<usize> = (0..n).filter(|&i| !planted[i]).collect();
    for i in 0..n {
        for j in i + 1..n {
            let p = match (planted[i], planted[j]) {
                (true, true) => 0.9,
                (false, false) => 0.01,
                _ => 0.0,
            };
            if r.random::<f64>() < p {
                link(&mut adj, i, j);
            }
        }
    }
    for i in (0..n).filter(|&i| planted[i]) {
        let j = others[r.random_range(0..others.len())];
        link(&mut adj, i, j);
    }
    let graph = BinaryGraph::from_edges(
        cohort.patients.iter().map(|p| p.id.clone()).collect(),
        edge_triples(&adj),
        0.014,
    );
    let lcc = graph.lcc();
    let membership = lcc_cluster(&graph, &lcc, cutoff);
    PlantedCluster {
        cohort,
        graph,
        planted,
        membership,
    }
}

impl PlantedCluster {
    pub fn recovery(&self) -> f64 {
        let hit = self
            .planted
            .iter()
            .zip(&self.membership.high_risk)
            .filter(|(&p, &h)| p && h)
            .count();
        hit as f64 / self.planted.iter().filter(|&&p| p).count() as f64
    }

    /// Kaplan-Meier curve (length of stay, transfer as the event) for the
    /// patients with `high_risk == which`.
    pub fn km(&self, which: bool) -> SurvivalCurve {
        let (t, e): (Vec<f64>, Vec<bool>) = self
            .cohort
            .patients
            .iter()
            .zip(&self.membership.high_risk)
            .filter(|(_, &h)| h == which)
            .map(|(p, _)| (f64::from(p.length_of_stay()), p.outcome.is_transfer()))
            .unzip();
        kaplan_meier(&t, &e).unwrap()
    }
}
