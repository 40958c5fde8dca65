use std::io::BufRead;
use std::ops::Range;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::tokenize::{for_each_token, tokenize_reader};
use super::{CooccurrenceTable, CorpusError, VocabEntry, Vocabulary, WordId};

/// Interned token sequence split into documents. Context windows never cross
/// a document boundary.
#[derive(Debug, Clone, Default)]
pub struct TokenStream {
    lexicon: Vec<String>,
    index: FxHashMap<String, u32>,
    tokens: Vec<u32>,
    doc_starts: Vec<usize>,
}

impl TokenStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// One document from already tokenized input.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let mut s = Self::new();
        s.push_tokens(tokens);
        s
    }

    /// Appends an already tokenized document.
    pub fn push_tokens<S: AsRef<str>>(&mut self, tokens: &[S]) {
        self.begin_document();
        for t in tokens {
            self.push_token(t.as_ref());
        }
    }

    pub fn push_document(&mut self, text: &str) {
        self.begin_document();
        for_each_token(text, |t| self.push_token(t));
    }

    pub fn read_document<R: BufRead>(&mut self, reader: R) -> std::io::Result<()> {
        self.begin_document();
        tokenize_reader(reader, |t| self.push_token(t))
    }

    fn begin_document(&mut self) {
        if self.doc_starts.last() != Some(&self.tokens.len()) {
            self.doc_starts.push(self.tokens.len());
        }
    }

    fn push_token(&mut self, token: &str) {
        let raw = match self.index.get(token) {
            Some(&r) => r,
            None => {
                let r = self.lexicon.len() as u32;
                self.lexicon.push(token.to_owned());
                self.index.insert(token.to_owned(), r);
                r
            }
        };
        self.tokens.push(raw);
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn documents(&self) -> usize {
        self.doc_starts.len()
    }

    /// Token text at a stream position.
    pub fn token_at(&self, pos: usize) -> &str {
        &self.lexicon[self.tokens[pos] as usize]
    }

    /// Start of the document containing `pos`.
    fn doc_start(&self, pos: usize) -> usize {
        let i = self.doc_starts.partition_point(|&s| s <= pos);
        self.doc_starts[i - 1]
    }

    /// Splits `range` at document boundaries.
    fn segments(&self, range: Range<usize>) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = range.start;
        while start < range.end {
            let i = self.doc_starts.partition_point(|&s| s <= start);
            let next_doc = self.doc_starts.get(i).copied().unwrap_or(usize::MAX);
            let end = next_doc.min(range.end);
            out.push(start..end);
            start = end;
        }
        out
    }

    /// Counts the whole stream.
    pub fn count(&self, window: usize, min_count: u64) -> Result<(Vocabulary, CooccurrenceTable), CorpusError> {
        let mut counter = CooccurrenceCounter::new(self, window)?;
        counter.advance_to(self.len());
        counter.snapshot(min_count)
    }
}

/// Counts `tokens` as a single document: unigram frequencies plus symmetric
/// `±window` co-occurrences, keeping only tokens with frequency `>= min_count`.
pub fn count<S: AsRef<str>>(tokens: &[S], window: usize, min_count: u64) -> Result<(Vocabulary, CooccurrenceTable), CorpusError> {
    TokenStream::from_tokens(tokens).count(window, min_count)
}

#[inline]
fn pair_key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

/// Incremental counter over a prefix of a [`TokenStream`].
///
/// Unordered position pairs `(i, j)` with `0 < j - i <= window` in the same
/// document are stored once, keyed by the unordered raw-token pair, when the
/// right-hand position `j` is consumed. Advancing never revisits earlier
/// positions, so `advance_to(b)` followed by [`snapshot`](Self::snapshot)
/// gives exactly the counts of a fresh pass over `[0, b)`.
pub struct CooccurrenceCounter<'a> {
    stream: &'a TokenStream,
    window: usize,
    position: usize,
    unigrams: Vec<u64>,
    pairs: FxHashMap<u64, u64>,
}

const SHARD_MIN: usize = 1 << 16;

impl<'a> CooccurrenceCounter<'a> {
    pub fn new(stream: &'a TokenStream, window: usize) -> Result<Self, CorpusError> {
        if window == 0 {
            return Err(CorpusError::InvalidParameter("window must be >= 1".into()));
        }
        Ok(CooccurrenceCounter {
            stream,
            window,
            position: 0,
            unigrams: vec![0; stream.lexicon.len()],
            pairs: FxHashMap::default(),
        })
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// Consumes positions up to (excluding) `end`, clamped to the stream length.
    pub fn advance_to(&mut self, end: usize) {
        let end = end.min(self.stream.len());
        if end <= self.position {
            return;
        }
        let start = self.position;
        let shards = rayon::current_num_threads().max(1);
        let span = end - start;
        let shard_len = (span.div_ceil(shards)).max(SHARD_MIN);
        let ranges: Vec<Range<usize>> = (start..end)
            .step_by(shard_len)
            .map(|s| s..(s + shard_len).min(end))
            .collect();
        let partials: Vec<(Vec<(u32, u64)>, FxHashMap<u64, u64>)> =
            ranges.into_par_iter().map(|r| self.count_range(r)).collect();
        for (unigrams, pairs) in partials {
            for (raw, c) in unigrams {
                self.unigrams[raw as usize] += c;
            }
            if self.pairs.is_empty() {
                self.pairs = pairs;
            } else {
                for (k, c) in pairs {
                    *self.pairs.entry(k).or_insert(0) += c;
                }
            }
        }
        self.position = end;
    }

    fn count_range(&self, range: Range<usize>) -> (Vec<(u32, u64)>, FxHashMap<u64, u64>) {
        let tokens = &self.stream.tokens;
        let mut unigrams: FxHashMap<u32, u64> = FxHashMap::default();
        let mut pairs: FxHashMap<u64, u64> = FxHashMap::default();
        for seg in self.stream.segments(range) {
            let doc_start = self.stream.doc_start(seg.start);
            for j in seg {
                let tj = tokens[j];
                *unigrams.entry(tj).or_insert(0) += 1;
                let lo = j.saturating_sub(self.window).max(doc_start);
                for &ti in &tokens[lo..j] {
                    *pairs.entry(pair_key(ti, tj)).or_insert(0) += 1;
                }
            }
        }
        (unigrams.into_iter().collect(), pairs)
    }

    /// Freezes the counts seen so far, dropping tokens below `min_count`.
    ///
    /// Ids are assigned by descending frequency, ties by token text. Filtered
    /// tokens still occupy their stream positions, so they widen no window.
    pub fn snapshot(&self, min_count: u64) -> Result<(Vocabulary, CooccurrenceTable), CorpusError> {
        let lexicon = &self.stream.lexicon;
        let threshold = min_count.max(1);
        let mut kept: Vec<u32> = (0..lexicon.len() as u32)
            .filter(|&r| self.unigrams[r as usize] >= threshold)
            .collect();
        kept.sort_by(|&a, &b| {
            self.unigrams[b as usize]
                .cmp(&self.unigrams[a as usize])
                .then_with(|| lexicon[a as usize].cmp(&lexicon[b as usize]))
        });
        let mut remap = vec![u32::MAX; lexicon.len()];
        let entries: Vec<VocabEntry> = kept
            .iter()
            .enumerate()
            .map(|(id, &raw)| {
                remap[raw as usize] = id as WordId;
                VocabEntry {
                    token: lexicon[raw as usize].clone(),
                    id: id as WordId,
                    frequency: self.unigrams[raw as usize],
                }
            })
            .collect();
        let vocab = Vocabulary::from_entries(entries, self.position as u64)?;

        let mut triples: Vec<(u32, u32, u64)> = Vec::with_capacity(self.pairs.len() * 2);
        for (&key, &c) in &self.pairs {
            let a = remap[(key >> 32) as usize];
            let b = remap[(key & 0xffff_ffff) as usize];
            if a == u32::MAX || b == u32::MAX {
                continue;
            }
            if a == b {
                triples.push((a, a, 2 * c));
            } else {
                triples.push((a, b, c));
                triples.push((b, a, c));
            }
        }
        triples.par_sort_unstable_by_key(|&(a, b, _)| (a, b));
        let table = CooccurrenceTable::from_sorted_triples(self.window, vocab.len(), triples)?;
        Ok((vocab, table))
    }
}
