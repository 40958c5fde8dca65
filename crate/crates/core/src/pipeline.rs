//! Counts-to-geometry composition used by the CLI, tests and benches.

use thiserror::Error;

use crate::boltzmann::{boltzmann_normalize, BoltzmannMatrix};
use crate::corpus::{CooccurrenceTable, Vocabulary};
use crate::disk::{embed_tokens, RhoMode, TokenEmbedding};
use crate::metric::{weight_components, weighted_entropy, EntropyTable, MetricError, Normalization, WeightComponents};
use crate::neighbors::{neighbor_report, NeighborError, NeighborReport};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error(transparent)]
    Neighbors(#[from] NeighborError),
}

/// Every derived table for one count snapshot.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub vocab: Vocabulary,
    pub table: CooccurrenceTable,
    pub weights: WeightComponents,
    pub entropy: EntropyTable,
    pub boltzmann: BoltzmannMatrix,
}

impl Analysis {
    pub fn build(vocab: Vocabulary, table: CooccurrenceTable, normalization: Normalization) -> Result<Self, AnalysisError> {
        let weights = weight_components(&table, &vocab);
        let entropy = weighted_entropy(&table, &weights, normalization)?;
        let boltzmann = boltzmann_normalize(&entropy);
        if !weights.excluded().is_empty() {
            log::info!("{} targets without observed contexts excluded", weights.excluded().len());
        }
        Ok(Analysis {
            vocab,
            table,
            weights,
            entropy,
            boltzmann,
        })
    }

    pub fn neighbors(&self, target: &str, k: usize) -> Result<NeighborReport, AnalysisError> {
        let id = self
            .vocab
            .id(target)
            .ok_or_else(|| AnalysisError::UnknownToken(target.to_owned()))?;
        Ok(neighbor_report(&self.boltzmann, id, k)?)
    }

    pub fn embed<S: AsRef<str>>(&self, tokens: &[S], mode: RhoMode) -> TokenEmbedding {
        embed_tokens(&self.boltzmann, &self.vocab, tokens, mode)
    }

    /// Tokens of a candidate list, in order.
    pub fn tokens(&self, candidates: &[crate::neighbors::Candidate]) -> Vec<String> {
        candidates.iter().map(|c| self.vocab.token(c.word).to_owned()).collect()
    }
}
