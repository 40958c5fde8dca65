//! Corpus statistics to hyperbolic geometry: a weighted conditional-entropy
//! association between words and their contexts, Boltzmann-normalized into a
//! row-stochastic matrix, from which semantic neighbor sets are extracted and
//! word categories are placed on the Poincaré disk by popularity (radius) and
//! similarity (angle).
//!
//! The stages, in pipeline order:
//!
//! - [`corpus`]: tokenize, count windowed co-occurrences, persist snapshots.
//! - [`metric`]: collocation diversity, conditional-probability rank, entropy.
//! - [`boltzmann`]: per-target softmax of the entropy table and mean profiles.
//! - [`neighbors`]: common-context overlap and the two extraction strategies.
//! - [`disk`]: polar and Poincaré disk transform, convergence, SVG plots.
//! - [`baseline`]: cosine neighbors over external vectors for comparison.

pub mod baseline;
pub mod boltzmann;
pub mod config;
pub mod corpus;
pub mod disk;
pub mod metric;
pub mod neighbors;
pub mod pipeline;
pub mod sparse;

pub use boltzmann::{boltzmann_normalize, mean_profile, BoltzmannMatrix, MeanProfile};
pub use config::{OutputFormat, RunConfig};
pub use corpus::{count, tokenize, CooccurrenceTable, EpochPlan, Model, TokenStream, Vocabulary, WordId};
pub use disk::{embed_words, to_disk, to_polar, DiskCoordinates, RhoMode};
pub use metric::{weight_components, weighted_entropy, EntropyTable, Normalization, WeightComponents};
pub use neighbors::{neighbor_report, NeighborReport};
pub use pipeline::{Analysis, AnalysisError};
