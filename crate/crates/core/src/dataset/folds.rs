use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint sets of song ids used as cross-validation test folds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: Vec<Vec<String>>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    pub fn fold_of(&self, song_id: &str) -> Option<usize> {
        self.folds
            .iter()
            .position(|f| f.iter().any(|s| s == song_id))
    }

    /// Ids outside fold `i`.
    pub fn train_ids(&self, i: usize) -> Vec<String> {
        self.folds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect()
    }
}

/// Shuffles the distinct ids with `seed` and deals them round-robin into `k`
/// folds. Ids are sorted first so the plan does not depend on input order.
pub fn kfold_split(song_ids: &[String], k: usize, seed: u64) -> Result<FoldPlan> {
    let mut ids = song_ids.to_vec();
    ids.sort();
    ids.dedup();
    if k < 2 || ids.len() < k {
        return Err(Error::Dataset(format!(
            "cannot split {} distinct songs into {k} folds",
            ids.len()
        )));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::new(); k];
    for (i, id) in ids.into_iter().enumerate() {
        folds[i % k].push(id);
    }
    Ok(FoldPlan { folds })
}
