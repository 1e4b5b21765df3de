//! Predictions with a prescribed error.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, LocalPrediction, NodeId, Prediction};

/// The honest set.
pub fn perfect(config: &Configuration) -> Prediction {
    Prediction::new(config.honest())
}

fn pick(from: &[NodeId], k: usize, rng: &mut ChaCha8Rng) -> BTreeSet<NodeId> {
    sample(rng, from.len(), k).into_iter().map(|i| from[i]).collect()
}

fn check_counts(config: &Configuration, eta_f: usize, eta_h: usize) -> Result<()> {
    let honest = config.n - config.f();
    if eta_f > config.f() || eta_h > honest {
        return Err(Error::InfeasiblePrediction(format!(
            "eta_F = {eta_f} with f = {}, eta_H = {eta_h} with {honest} honest nodes",
            config.f()
        )));
    }
    Ok(())
}

/// Drops `eta_h` random honest nodes from `H` and adds `eta_f` random faulty ones.
pub fn with_error(config: &Configuration, eta_f: usize, eta_h: usize, seed: u64) -> Result<Prediction> {
    check_counts(config, eta_f, eta_h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let honest: Vec<NodeId> = config.honest().collect();
    let faulty: Vec<NodeId> = config.faulty.iter().copied().collect();
    let dropped = pick(&honest, eta_h, &mut rng);
    let added = pick(&faulty, eta_f, &mut rng);
    Ok(Prediction::new(honest.into_iter().filter(|i| !dropped.contains(i)).chain(added)))
}

/// Every node independently with probability one half.
pub fn random_subset(n: usize, seed: u64) -> Prediction {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Prediction::new((1..=n as u32).map(NodeId).filter(|_| rng.gen_bool(0.5)))
}

fn split_counts(config: &Configuration, eta: usize, eta_f: usize) -> Result<(usize, usize)> {
    let eta_h = eta.checked_sub(eta_f).ok_or_else(|| Error::InfeasiblePrediction(format!("eta = {eta}")))?;
    check_counts(config, eta_f, eta_h)?;
    Ok((eta_f, eta_h))
}

/// As many faulty nodes inside the prediction as possible; lowest ids chosen.
pub fn worst_case(config: &Configuration, eta: usize) -> Result<Prediction> {
    let (eta_f, eta_h) = split_counts(config, eta, eta.min(config.f()))?;
    let dropped: BTreeSet<NodeId> = config.honest().take(eta_h).collect();
    let added = config.faulty.iter().copied().take(eta_f);
    Ok(Prediction::new(config.honest().filter(|i| !dropped.contains(i)).chain(added)))
}

/// As many honest nodes missing as possible; seeded choice.
pub fn inverse_case(config: &Configuration, eta: usize, seed: u64) -> Result<Prediction> {
    let honest = config.n - config.f();
    let eta_h = eta.min(honest);
    let (eta_f, eta_h) = split_counts(config, eta, eta - eta_h)?;
    with_error(config, eta_f, eta_h, seed)
}

/// `ceil(eta / 2)` faulty members, moved as little as feasibility requires.
pub fn balanced(config: &Configuration, eta: usize, seed: u64) -> Result<Prediction> {
    let honest = config.n - config.f();
    let eta_f = eta.div_ceil(2).max(eta.saturating_sub(honest)).min(config.f());
    let (eta_f, eta_h) = split_counts(config, eta, eta_f)?;
    with_error(config, eta_f, eta_h, seed)
}

/// How an error budget is divided between faulty members and missing honest nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    WorstCase,
    Inverse,
    Balanced,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::WorstCase, Split::Inverse, Split::Balanced];
}

pub fn with_split(config: &Configuration, eta: usize, split: Split, seed: u64) -> Result<Prediction> {
    match split {
        Split::WorstCase => worst_case(config, eta),
        Split::Inverse => inverse_case(config, eta, seed),
        Split::Balanced => balanced(config, eta, seed),
    }
}

/// Node `i` receives `preds[assignment[i]]`.
pub fn local_from_global(preds: &[Prediction], assignment: &BTreeMap<NodeId, usize>, n: usize) -> Result<LocalPrediction> {
    let per_node = (1..=n as u32)
        .map(|i| {
            let k = assignment
                .get(&NodeId(i))
                .ok_or_else(|| Error::InvalidConfig(format!("node {i} has no prediction assigned")))?;
            preds
                .get(*k)
                .cloned()
                .ok_or_else(|| Error::InvalidConfig(format!("prediction index {k} out of range")))
        })
        .collect::<Result<_>>()?;
    Ok(LocalPrediction { per_node })
}
