use serde::Serialize;

use super::CorpusError;

pub const DEFAULT_EPOCH_SIZE: usize = 1_000_000;

/// Cumulative token offsets closing each epoch. Epoch `k` covers the prefix
/// `[0, boundaries[k])`, not just the `k`-th chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpochPlan {
    pub epoch_size: usize,
    pub boundaries: Vec<usize>,
}

impl EpochPlan {
    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }
}

pub fn split_epochs(token_count: usize, epoch_size: usize) -> Result<EpochPlan, CorpusError> {
    if epoch_size == 0 {
        return Err(CorpusError::InvalidParameter("epoch size must be >= 1".into()));
    }
    let mut boundaries: Vec<usize> = (1..=token_count / epoch_size).map(|k| k * epoch_size).collect();
    if token_count % epoch_size != 0 {
        boundaries.push(token_count);
    }
    Ok(EpochPlan {
        epoch_size,
        boundaries,
    })
}
