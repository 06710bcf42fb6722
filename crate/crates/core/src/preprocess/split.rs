use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seeds;

/// `round(x)` with halves rounded up.
pub fn round_half_up(x: f64) -> usize {
    // guard against 0.5-boundaries landing a hair below through rounding error
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Stratified random partition. Each class contributes
/// `round_half_up(count · train_fraction)` members to the training side.
/// Both outputs keep the input order.
pub fn stratified_split<T: Clone>(
    ids: &[T],
    labels: &[u8],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>)> {
    if ids.len() != labels.len() {
        return Err(Error::Preprocess(format!(
            "{} ids but {} labels",
            ids.len(),
            labels.len()
        )));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Preprocess(format!(
            "train_fraction must lie in (0,1), got {train_fraction}"
        )));
    }
    let mut in_train = vec![false; ids.len()];
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < 2 {
            return Err(Error::Preprocess(format!(
                "class {class} has {} members (need ≥ 2 to split)",
                members.len()
            )));
        }
        let mut rng = seeds::rng(seeds::derive_n(seed, &[u64::from(class)]));
        members.shuffle(&mut rng);
        let take = round_half_up(members.len() as f64 * train_fraction).min(members.len());
        for &i in &members[..take] {
            in_train[i] = true;
        }
    }
    if let Some(bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::Preprocess(format!("labels must be 0/1, found {bad}")));
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (id, keep) in ids.iter().zip(in_train) {
        if keep {
            train.push(id.clone());
        } else {
            test.push(id.clone());
        }
    }
    Ok((train, test))
}
