//! Row-wise Boltzmann normalization of the entropy table.
//!
//! `P(a|b) = exp(H(a|b)) / Z(a)` with `Z(a)` summed over the observed contexts
//! of `a` only; unobserved pairs have probability zero and are not stored.

use serde::Serialize;
use thiserror::Error;

use crate::corpus::WordId;
use crate::metric::EntropyTable;
use crate::sparse::SparseRows;

#[derive(Debug, Error, PartialEq)]
pub enum BoltzmannError {
    #[error("word {word} has no observed {direction} entries")]
    MissingDirection { word: WordId, direction: Direction },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The word's own row (word as target).
    Target,
    /// The word's column (word as context).
    Context,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Target => "target",
            Direction::Context => "context",
        })
    }
}

/// Numerically stable `(probabilities, ln Z)` of one row.
pub fn softmax_row(h: &[f64]) -> (Vec<f64>, f64) {
    let max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = h.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = shifted.iter().sum();
    let probs = shifted.into_iter().map(|e| e / sum).collect();
    (probs, max + sum.ln())
}

#[derive(Debug, Clone)]
pub struct BoltzmannMatrix {
    probs: SparseRows<f64>,
    columns: SparseRows<f64>,
    log_partition: Vec<Option<f64>>,
    excluded: Vec<WordId>,
}

impl BoltzmannMatrix {
    pub fn n_words(&self) -> usize {
        self.probs.n_rows()
    }

    pub fn get(&self, target: WordId, context: WordId) -> Option<f64> {
        self.probs.get(target, context).copied()
    }

    pub fn row(&self, target: WordId) -> (&[WordId], &[f64]) {
        self.probs.row(target)
    }

    /// `(target, P(target|context))` for every target observed with `context`.
    pub fn column(&self, context: WordId) -> (&[WordId], &[f64]) {
        self.columns.row(context)
    }

    /// Number of non-zero entries in the word's row, `l(w)`.
    pub fn support(&self, target: WordId) -> usize {
        self.probs.row_len(target)
    }

    pub fn log_partition(&self, target: WordId) -> Option<f64> {
        self.log_partition[target as usize]
    }

    /// `Z(a)`; may overflow to infinity under raw normalization, unlike
    /// [`log_partition`](Self::log_partition).
    pub fn partition(&self, target: WordId) -> Option<f64> {
        self.log_partition(target).map(f64::exp)
    }

    /// Targets with an empty row.
    pub fn excluded(&self) -> &[WordId] {
        &self.excluded
    }

    pub fn rows(&self) -> &SparseRows<f64> {
        &self.probs
    }
}

pub fn boltzmann_normalize(entropy: &EntropyTable) -> BoltzmannMatrix {
    let h = entropy.rows();
    let n = h.n_rows();
    let mut values = Vec::with_capacity(h.nnz());
    let mut log_partition = Vec::with_capacity(n);
    let mut excluded = Vec::new();
    for a in 0..n as WordId {
        let (_, row) = h.row(a);
        if row.is_empty() {
            excluded.push(a);
            log_partition.push(None);
            continue;
        }
        let (p, log_z) = softmax_row(row);
        values.extend(p);
        log_partition.push(Some(log_z));
    }
    let probs = h.with_values(values);
    let columns = probs.transpose(n);
    BoltzmannMatrix {
        probs,
        columns,
        log_partition,
        excluded,
    }
}

/// Mean Boltzmann probability of a word as target (`x`) and as context (`y`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanProfile {
    pub x: f64,
    pub y: f64,
}

pub fn mean_profile(m: &BoltzmannMatrix, word: WordId) -> Result<MeanProfile, BoltzmannError> {
    let mean = |vals: &[f64]| vals.iter().sum::<f64>() / vals.len() as f64;
    if word as usize >= m.n_words() {
        return Err(BoltzmannError::MissingDirection {
            word,
            direction: Direction::Target,
        });
    }
    let (_, row) = m.row(word);
    if row.is_empty() {
        return Err(BoltzmannError::MissingDirection {
            word,
            direction: Direction::Target,
        });
    }
    let (_, col) = m.column(word);
    if col.is_empty() {
        return Err(BoltzmannError::MissingDirection {
            word,
            direction: Direction::Context,
        });
    }
    Ok(MeanProfile {
        x: mean(row),
        y: mean(col),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Normalization;

    fn entropy(n: usize, triples: Vec<(u32, u32, f64)>) -> EntropyTable {
        EntropyTable::from_rows(SparseRows::from_sorted(n, triples), Normalization::Relative)
    }

    #[test]
    fn single_context_row() {
        let m = boltzmann_normalize(&entropy(2, vec![(0, 1, -0.7), (1, 0, 0.2)]));
        assert_eq!(m.get(0, 1), Some(1.0));
        assert!((m.partition(0).unwrap() - (-0.7f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn equal_entropies_split_evenly() {
        let m = boltzmann_normalize(&entropy(3, vec![(0, 1, 0.3), (0, 2, 0.3)]));
        assert_eq!(m.get(0, 1), Some(0.5));
        assert_eq!(m.get(0, 2), Some(0.5));
        assert_eq!(m.excluded(), &[1, 2]);
    }

    #[test]
    fn large_entropies_do_not_overflow() {
        let m = boltzmann_normalize(&entropy(2, vec![(0, 0, 1000.0), (0, 1, 999.0)]));
        let p0 = m.get(0, 0).unwrap();
        assert!((p0 - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert!((m.log_partition(0).unwrap() - (1000.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn mean_profile_directions() {
        // 0 -> {1}, 1 -> {0, 2}; word 2 is never a target.
        let m = boltzmann_normalize(&entropy(3, vec![(0, 1, 0.0), (1, 0, 0.0), (1, 2, 0.0)]));
        let p0 = mean_profile(&m, 0).unwrap();
        assert_eq!(p0.x, 1.0);
        assert_eq!(p0.y, 0.5);
        let p1 = mean_profile(&m, 1).unwrap();
        assert_eq!(p1.x, 0.5);
        // 1 is the unique context of target 0
        assert_eq!(p1.y, 1.0);
        assert_eq!(
            mean_profile(&m, 2),
            Err(BoltzmannError::MissingDirection {
                word: 2,
                direction: Direction::Target
            })
        );
        let m = boltzmann_normalize(&entropy(2, vec![(0, 1, 0.0)]));
        assert_eq!(
            mean_profile(&m, 0),
            Err(BoltzmannError::MissingDirection {
                word: 0,
                direction: Direction::Context
            })
        );
    }
}
