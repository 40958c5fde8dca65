use rustc_hash::FxHashMap;
use serde::Serialize;

use super::CorpusError;
use crate::sparse::SparseRows;

/// Dense word identifier into a [`Vocabulary`].
pub type WordId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabEntry {
    pub token: String,
    pub id: WordId,
    pub frequency: u64,
}

/// Token table with unigram frequencies. Ids are dense `0..len`.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: FxHashMap<String, WordId>,
    total_tokens: u64,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.total_tokens == other.total_tokens
    }
}

impl Vocabulary {
    /// Validates and indexes entries. Entries must be listed in id order.
    pub fn from_entries(entries: Vec<VocabEntry>, total_tokens: u64) -> Result<Self, CorpusError> {
        let mut index = FxHashMap::default();
        index.reserve(entries.len());
        let mut mass = 0u64;
        for (pos, e) in entries.iter().enumerate() {
            if e.id as usize != pos {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "id {} at position {pos}; ids must be dense and ordered",
                    e.id
                )));
            }
            if e.frequency == 0 {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "token {:?} has zero frequency",
                    e.token
                )));
            }
            if e.token.is_empty() || e.token.contains(['\t', '\n', '\r']) {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "token {:?} is empty or contains a separator",
                    e.token
                )));
            }
            if index.insert(e.token.clone(), e.id).is_some() {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "duplicate token {:?}",
                    e.token
                )));
            }
            mass += e.frequency;
        }
        if mass > total_tokens {
            return Err(CorpusError::InvalidVocabulary(format!(
                "frequencies sum to {mass}, exceeding total_tokens {total_tokens}"
            )));
        }
        Ok(Vocabulary {
            entries,
            index,
            total_tokens,
        })
    }

    pub fn empty() -> Self {
        Vocabulary {
            entries: Vec::new(),
            index: FxHashMap::default(),
            total_tokens: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<WordId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: WordId) -> &str {
        &self.entries[id as usize].token
    }

    pub fn frequency(&self, id: WordId) -> u64 {
        self.entries[id as usize].frequency
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    /// All tokens seen, including those dropped by the min-count filter.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }
}

/// Sparse windowed co-occurrence counts `f(a, b)` keyed by (target, context).
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceTable {
    window: usize,
    pairs: SparseRows<u64>,
    context_totals: Vec<u64>,
    total_mass: u64,
}

impl CooccurrenceTable {
    /// Builds from `(target, context, count)` triples sorted by `(target, context)`.
    pub fn from_sorted_triples<I>(window: usize, n_words: usize, triples: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (WordId, WordId, u64)>,
    {
        if window == 0 {
            return Err(CorpusError::InvalidParameter("window must be >= 1".into()));
        }
        let mut checked = Vec::new();
        let mut last = None;
        for (a, b, c) in triples {
            if a as usize >= n_words || b as usize >= n_words {
                return Err(CorpusError::InvalidTable(format!(
                    "pair ({a}, {b}) references a word outside 0..{n_words}"
                )));
            }
            if c == 0 {
                return Err(CorpusError::InvalidTable(format!("pair ({a}, {b}) has zero count")));
            }
            if last.is_some_and(|prev| prev >= (a, b)) {
                return Err(CorpusError::InvalidTable(format!(
                    "pair ({a}, {b}) out of order or duplicated"
                )));
            }
            last = Some((a, b));
            checked.push((a, b, c));
        }
        let pairs = SparseRows::from_sorted(n_words, checked);
        let mut context_totals = vec![0u64; n_words];
        let mut total_mass = 0u64;
        for (_, b, &c) in pairs.iter() {
            context_totals[b as usize] += c;
            total_mass += c;
        }
        Ok(CooccurrenceTable {
            window,
            pairs,
            context_totals,
            total_mass,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n_words(&self) -> usize {
        self.pairs.n_rows()
    }

    /// Number of stored (target, context) pairs.
    pub fn nnz(&self) -> usize {
        self.pairs.nnz()
    }

    pub fn count(&self, target: WordId, context: WordId) -> u64 {
        self.pairs.get(target, context).copied().unwrap_or(0)
    }

    pub fn row(&self, target: WordId) -> (&[WordId], &[u64]) {
        self.pairs.row(target)
    }

    /// Distinct context types observed with `target`.
    pub fn context_type_count(&self, target: WordId) -> usize {
        self.pairs.row_len(target)
    }

    /// Total co-occurrence mass `f(b)` of `context` summed over all targets.
    pub fn context_total(&self, context: WordId) -> u64 {
        self.context_totals[context as usize]
    }

    pub fn total_mass(&self) -> u64 {
        self.total_mass
    }

    pub fn rows(&self) -> &SparseRows<u64> {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = (WordId, WordId, u64)> + '_ {
        self.pairs.iter().map(|(a, b, &c)| (a, b, c))
    }
}
