//! Configuration sampling and seed derivation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{all_nodes, Bit, Configuration, NodeId};

/// Mixes `parts` into `master` with the SplitMix64 finalizer, one part at a time.
///
/// Every job of a sweep or suite derives its seed as
/// `derive_seed(master, &[cell index, f, split, adversary, trial])`.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Where the faulty nodes sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// `{n - f + 1, ..., n}`.
    HighIds,
    /// `{1, ..., f}`, inside the padding range of the active set.
    LowIds,
    Random,
}

impl Placement {
    /// Trials cycle through high, low and random placements.
    pub fn for_trial(trial: usize) -> Placement {
        [Placement::HighIds, Placement::LowIds, Placement::Random][trial % 3]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputPattern {
    AllZero,
    AllOne,
    /// Lower half of the honest ids get 0, the rest 1.
    SplitHalf,
    Random,
}

impl InputPattern {
    pub const ALL: [InputPattern; 4] =
        [InputPattern::AllZero, InputPattern::AllOne, InputPattern::SplitHalf, InputPattern::Random];

    pub fn for_trial(trial: usize) -> InputPattern {
        Self::ALL[trial % 4]
    }
}

pub fn faulty_set(n: usize, f: usize, placement: Placement, seed: u64) -> BTreeSet<NodeId> {
    let f = f.min(n);
    match placement {
        Placement::HighIds => all_nodes(n).skip(n - f).collect(),
        Placement::LowIds => all_nodes(n).take(f).collect(),
        Placement::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample(&mut rng, n, f).into_iter().map(|i| NodeId(i as u32 + 1)).collect()
        }
    }
}

pub fn inputs(honest: &[NodeId], pattern: InputPattern, seed: u64) -> BTreeMap<NodeId, Bit> {
    let half = honest.len() / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1a2b_3c4d);
    honest
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let b = match pattern {
                InputPattern::AllZero => Bit::Zero,
                InputPattern::AllOne => Bit::One,
                InputPattern::SplitHalf => Bit::from(k >= half),
                InputPattern::Random => Bit::from(rng.gen::<bool>()),
            };
            (i, b)
        })
        .collect()
}

pub fn sample_config(n: usize, f: usize, placement: Placement, pattern: InputPattern, seed: u64) -> Result<Configuration> {
    let faulty = faulty_set(n, f, placement, seed);
    let honest: Vec<NodeId> = all_nodes(n).filter(|i| !faulty.contains(i)).collect();
    Configuration::new(n, faulty, inputs(&honest, pattern, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placements() {
        let ids = |s: BTreeSet<NodeId>| s.into_iter().map(|i| i.0).collect::<Vec<_>>();
        assert_eq!(ids(faulty_set(6, 2, Placement::HighIds, 0)), vec![5, 6]);
        assert_eq!(ids(faulty_set(6, 2, Placement::LowIds, 0)), vec![1, 2]);
        assert_eq!(faulty_set(6, 3, Placement::Random, 9), faulty_set(6, 3, Placement::Random, 9));
        assert_eq!(faulty_set(6, 3, Placement::Random, 9).len(), 3);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(5, &[2]), derive_seed(5, &[2]));
    }
}
