//! Tokenization, windowed co-occurrence counting, epoch planning and the
//! persisted count snapshot.

mod count;
mod epochs;
pub mod model_file;
mod table;
mod tokenize;

use thiserror::Error;

pub use count::{count, CooccurrenceCounter, TokenStream};
pub use epochs::{split_epochs, EpochPlan, DEFAULT_EPOCH_SIZE};
pub use model_file::{load_model, read_model, save_model, write_model, Model, ModelFileError};
pub use table::{CooccurrenceTable, VocabEntry, Vocabulary, WordId};
pub use tokenize::{for_each_token, tokenize, tokenize_reader};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("invalid co-occurrence table: {0}")]
    InvalidTable(String),
}
