//! Weighted conditional-entropy association between a target word and each
//! of its observed context words.
//!
//! For an observed pair `(a, b)` with count `f(a, b)`:
//!
//! ```text
//! d(a)      = f(a) / |contexts(a)|
//! r(a, b)   = competition rank of f(a|b) = f(a, b) / f(b) among a's contexts, 0 = largest
//! q(a, b)   = d(a) / (r(a, b) + 1)
//! H(a | b)  = -q(a, b) * f(a, b) * ln(q(a, b) * f(a|b))
//! ```
//!
//! where `f(b)` is the total co-occurrence mass of `b` as a context. Under
//! [`Normalization::Relative`] the leading `f(a, b)` factor is divided by
//! the total pair mass; the log argument always uses the raw ratio.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{CooccurrenceTable, Vocabulary, WordId};
use crate::sparse::SparseRows;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `f(a, b)` is the pair count divided by the total pair mass.
    #[default]
    Relative,
    /// `f(a, b)` is the bare pair count.
    Raw,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Relative => "relative",
            Normalization::Raw => "raw",
        })
    }
}

impl FromStr for Normalization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relative" => Ok(Normalization::Relative),
            "raw" => Ok(Normalization::Raw),
            other => Err(format!("unknown normalization {other:?} (expected relative or raw)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("non-finite entropy {value} for pair ({target}, {context})")]
    NonFinite { target: WordId, context: WordId, value: f64 },
}

/// Per-target collocation diversity. Targets without any observed context
/// have no value and are listed in `excluded`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diversity {
    pub values: Vec<Option<f64>>,
    pub excluded: Vec<WordId>,
}

pub fn collocation_diversity(table: &CooccurrenceTable, vocab: &Vocabulary) -> Diversity {
    let mut excluded = Vec::new();
    let values = (0..table.n_words() as WordId)
        .map(|a| match table.context_type_count(a) {
            0 => {
                excluded.push(a);
                None
            }
            n => Some(vocab.frequency(a) as f64 / n as f64),
        })
        .collect();
    Diversity { values, excluded }
}

/// Exact comparison of `f(a|b1)` against `f(a|b2)` by cross-multiplication.
fn cmp_conditional(c1: u64, t1: u64, c2: u64, t2: u64) -> Ordering {
    (c1 as u128 * t2 as u128).cmp(&(c2 as u128 * t1 as u128))
}

/// Competition ranks of `f(a|b)` within each target row, aligned with the
/// table's flat entry order. Equal conditionals share the smallest rank; the
/// next distinct value is ranked by the number of strictly greater entries.
pub fn conditional_rank(table: &CooccurrenceTable) -> Vec<u32> {
    let rows = table.rows();
    let mut ranks = vec![0u32; rows.nnz()];
    let mut order: Vec<usize> = Vec::new();
    for a in 0..rows.n_rows() as WordId {
        let range = rows.row_range(a);
        let (cols, counts) = rows.row(a);
        order.clear();
        order.extend(0..cols.len());
        let cond = |i: usize| (counts[i], table.context_total(cols[i]));
        order.sort_by(|&i, &j| {
            let (ci, ti) = cond(i);
            let (cj, tj) = cond(j);
            cmp_conditional(cj, tj, ci, ti).then(cols[i].cmp(&cols[j]))
        });
        let mut current = 0u32;
        for (pos, &i) in order.iter().enumerate() {
            if pos > 0 {
                let (cp, tp) = cond(order[pos - 1]);
                let (ci, ti) = cond(i);
                if cmp_conditional(cp, tp, ci, ti) != Ordering::Equal {
                    current = pos as u32;
                }
            }
            ranks[range.start + i] = current;
        }
    }
    ranks
}

/// `d`, `r` and `q` for every observed pair.
#[derive(Debug, Clone)]
pub struct WeightComponents {
    diversity: Diversity,
    frequencies: Vec<u64>,
    ranks: SparseRows<u32>,
    weights: SparseRows<f64>,
}

impl WeightComponents {
    pub fn diversity(&self, target: WordId) -> Option<f64> {
        self.diversity.values[target as usize]
    }

    pub fn excluded(&self) -> &[WordId] {
        &self.diversity.excluded
    }

    pub fn rank(&self, target: WordId, context: WordId) -> Option<u32> {
        self.ranks.get(target, context).copied()
    }

    pub fn weight(&self, target: WordId, context: WordId) -> Option<f64> {
        self.weights.get(target, context).copied()
    }

    pub fn ranks(&self) -> &SparseRows<u32> {
        &self.ranks
    }

    pub fn weights(&self) -> &SparseRows<f64> {
        &self.weights
    }
}

pub fn weight_components(table: &CooccurrenceTable, vocab: &Vocabulary) -> WeightComponents {
    let diversity = collocation_diversity(table, vocab);
    let rank_values = conditional_rank(table);
    let rows = table.rows();
    let mut weights = Vec::with_capacity(rows.nnz());
    for (k, (a, _, _)) in rows.iter().enumerate() {
        let denom = table.context_type_count(a) as f64 * (rank_values[k] as f64 + 1.0);
        weights.push(vocab.frequency(a) as f64 / denom);
    }
    WeightComponents {
        diversity,
        frequencies: (0..table.n_words() as WordId).map(|a| vocab.frequency(a)).collect(),
        ranks: rows.with_values(rank_values),
        weights: rows.with_values(weights),
    }
}

/// `num / den` with a single rounding when both fit in 53 bits.
fn ratio(num: u128, den: u128) -> f64 {
    const EXACT: u128 = 1 << 53;
    if num < EXACT && den < EXACT {
        return num as f64 / den as f64;
    }
    let g = gcd(num, den);
    (num / g) as f64 / (den / g) as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `ln(num / den)` without the cancellation loss of `ln` near 1.
fn ln_ratio(num: u128, den: u128) -> f64 {
    if num == den {
        return 0.0;
    }
    let approx = num as f64 / den as f64;
    if (0.5..2.0).contains(&approx) {
        let diff = num as i128 - den as i128;
        (diff as f64 / den as f64).ln_1p()
    } else if num < 1 << 53 && den < 1 << 53 {
        ratio(num, den).ln()
    } else {
        (num as f64).ln() - (den as f64).ln()
    }
}

/// `H` on exactly the observed pairs of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTable {
    values: SparseRows<f64>,
    normalization: Normalization,
}

impl EntropyTable {
    pub fn get(&self, target: WordId, context: WordId) -> Option<f64> {
        self.values.get(target, context).copied()
    }

    pub fn rows(&self) -> &SparseRows<f64> {
        &self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Builds a table directly from values laid out like `rows`; used by
    /// tests that need hand-picked entropies.
    pub fn from_rows(values: SparseRows<f64>, normalization: Normalization) -> Self {
        EntropyTable { values, normalization }
    }
}

pub fn weighted_entropy(
    table: &CooccurrenceTable,
    weights: &WeightComponents,
    normalization: Normalization,
) -> Result<EntropyTable, MetricError> {
    let rows = table.rows();
    let mass = table.total_mass() as u128;
    let mut values = Vec::with_capacity(rows.nnz());
    for (k, (a, b, &c)) in rows.iter().enumerate() {
        let rank_plus_one = weights.ranks.values()[k] as u128 + 1;
        let types = table.context_type_count(a) as u128;
        // q * f(a, b) = f(a) * c / (types * (r + 1) [* mass]), rounded once
        let qc = weights.frequencies[a as usize] as u128 * c as u128;
        let q_den = types * rank_plus_one;
        let weight = match normalization {
            Normalization::Relative => ratio(qc, q_den * mass),
            Normalization::Raw => ratio(qc, q_den),
        };
        // q * f(a|b) = f(a) * c / (types * (r + 1) * f(b))
        let h = -weight * ln_ratio(qc, q_den * table.context_total(b) as u128);
        if !h.is_finite() {
            return Err(MetricError::NonFinite {
                target: a,
                context: b,
                value: h,
            });
        }
        values.push(h);
    }
    Ok(EntropyTable {
        values: rows.with_values(values),
        normalization,
    })
}
