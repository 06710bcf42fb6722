use serde::{Deserialize, Serialize};

/// Enumerate the exact null distribution when `n_a · n_b` is at most this.
pub const EXACT_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample (pairs where `a` ranks above `b`,
    /// ties counting one half).
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Doubled midranks of the pooled sample, `a` first.
fn doubled_midranks(a: &[f64], b: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        for &k in &order[i..j] {
            ranks[k] = (i + 1 + j) as u64;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

fn u_from_twice_rank_sum(twice: u64, n_a: usize) -> f64 {
    (twice as f64 - (n_a * (n_a + 1)) as f64) / 2.0
}

/// Wilcoxon rank-sum test. Uses [`rank_sum_exact`] when `n_a · n_b ≤ 400`,
/// else [`rank_sum_normal`].
///
/// # Panics
/// If either sample is empty.
pub fn rank_sum(a: &[f64], b: &[f64]) -> RankSum {
    if a.len() * b.len() <= EXACT_LIMIT {
        rank_sum_exact(a, b)
    } else {
        rank_sum_normal(a, b)
    }
}

/// Exact two-sided p from the permutation distribution of the (tie-adjusted)
/// rank sum: twice the smaller tail, capped at 1.
pub fn rank_sum_exact(a: &[f64], b: &[f64]) -> RankSum {
    assert!(!a.is_empty() && !b.is_empty(), "rank-sum samples must be non-empty");
    if a.len() > b.len() {
        let r = rank_sum_exact(b, a);
        return RankSum {
            u: (a.len() * b.len()) as f64 - r.u,
            p: r.p,
        };
    }
    let n_a = a.len();
    let (ranks, _) = doubled_midranks(a, b);
    let observed: u64 = ranks[..n_a].iter().sum();

    // counts[k][s]: subsets of size k with doubled rank sum s
    let max_sum: u64 = {
        let mut r = ranks.clone();
        r.sort_unstable_by(|x, y| y.cmp(x));
        r[..n_a].iter().sum()
    };
    let width = max_sum as usize + 1;
    let mut counts = vec![vec![0u128; width]; n_a + 1];
    counts[0][0] = 1;
    for &r in &ranks {
        let r = r as usize;
        for k in (1..=n_a).rev() {
            let (lo, hi) = counts.split_at_mut(k);
            let prev = &lo[k - 1];
            let cur = &mut hi[0];
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let dist = &counts[n_a];
    let total: u128 = dist.iter().sum();
    let obs = observed as usize;
    let le: u128 = dist[..=obs].iter().sum();
    let ge: u128 = dist[obs..].iter().sum();
    let p = (2.0 * le.min(ge) as f64 / total as f64).min(1.0);
    RankSum {
        u: u_from_twice_rank_sum(observed, n_a),
        p,
    }
}

/// Normal approximation with tie-corrected variance and continuity
/// correction.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> RankSum {
    assert!(!a.is_empty() && !b.is_empty(), "rank-sum samples must be non-empty");
    let (n_a, n_b) = (a.len() as f64, b.len() as f64);
    let n = n_a + n_b;
    let (ranks, ties) = doubled_midranks(a, b);
    let u = u_from_twice_rank_sum(ranks[..a.len()].iter().sum(), a.len());
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n_a * n_b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let dev = (u - n_a * n_b / 2.0).abs();
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((dev - 0.5).max(0.0)) / var.sqrt();
        libm::erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    RankSum { u, p }
}
