//! Common-context overlap between a target and every other word, the two
//! top-k extraction strategies built on it, and their intersection.
//!
//! With `l(w)` the number of non-zero Boltzmann entries in `w`'s row and
//! `l_a(w)` the number of those contexts shared with the target `a`:
//!
//! ```text
//! L_a(w)  = ln²(l_a(w)) / (ln l(w) · ln l(a))
//! s_a(w)  = ln L_a(w) / ln(Σ_w L_a(w) · max_w L_a(w))
//! ```
//!
//! Strategy 1 ranks by `L`, strategy 2 by `s`, both descending.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::boltzmann::BoltzmannMatrix;
use crate::corpus::WordId;

pub const DEFAULT_TOP_K: usize = 22;

/// Scores closer than this are treated as ties, so mathematically equal
/// scores that differ only by rounding order deterministically.
const TIE_RESOLUTION: f64 = 1e10;

#[derive(Debug, Error, PartialEq)]
pub enum NeighborError {
    #[error("target {target} has insufficient context support (l = {support}, need >= 2)")]
    InsufficientSupport { target: WordId, support: usize },
    #[error("k must be >= 1")]
    InvalidK,
    #[error("degenerate strategy-2 denominator: ln(sum L * max L) = 0 with sum L = {sum}, max L = {max}")]
    DegenerateDenominator { sum: f64, max: f64 },
    #[error("no eligible candidates")]
    NoCandidates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapRow {
    pub candidate: WordId,
    pub l_candidate: usize,
    pub l_common: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapScores {
    pub target: WordId,
    pub l_target: usize,
    /// Eligible candidates in ascending id order; includes the target.
    pub rows: Vec<OverlapRow>,
}

/// `L` of every eligible candidate. Candidates need `l(w) >= 2` and at least
/// two shared contexts, otherwise a logarithm in `L` is zero or undefined.
pub fn overlap_scores(m: &BoltzmannMatrix, target: WordId) -> Result<OverlapScores, NeighborError> {
    let l_target = if (target as usize) < m.n_words() { m.support(target) } else { 0 };
    if l_target < 2 {
        return Err(NeighborError::InsufficientSupport {
            target,
            support: l_target,
        });
    }
    let mut common = vec![0usize; m.n_words()];
    let (contexts, _) = m.row(target);
    for &j in contexts {
        let (targets, _) = m.column(j);
        for &i in targets {
            common[i as usize] += 1;
        }
    }
    let ln_target = (l_target as f64).ln();
    let rows = common
        .iter()
        .enumerate()
        .filter_map(|(i, &l_common)| {
            let l_candidate = m.support(i as WordId);
            if l_candidate < 2 || l_common < 2 {
                return None;
            }
            let lc = (l_common as f64).ln();
            Some(OverlapRow {
                candidate: i as WordId,
                l_candidate,
                l_common,
                score: lc * lc / ((l_candidate as f64).ln() * ln_target),
            })
        })
        .collect();
    Ok(OverlapScores { target, l_target, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub word: WordId,
    /// Overlap score `L`.
    pub score: f64,
    pub l_common: usize,
    /// Strategy-2 score `s`; absent in strategy-1 lists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy_score: Option<f64>,
}

fn tie_key(v: f64) -> i64 {
    (v * TIE_RESOLUTION).round() as i64
}

/// Descending key, then larger `l_common`, then the target itself, then id.
fn rank_order(target: WordId, key: impl Fn(&OverlapRow) -> i64) -> impl Fn(&OverlapRow, &OverlapRow) -> Ordering {
    move |a, b| {
        key(b)
            .cmp(&key(a))
            .then(b.l_common.cmp(&a.l_common))
            .then((b.candidate == target).cmp(&(a.candidate == target)))
            .then(a.candidate.cmp(&b.candidate))
    }
}

pub fn strategy1(scores: &OverlapScores, k: usize) -> Result<Vec<Candidate>, NeighborError> {
    if k == 0 {
        return Err(NeighborError::InvalidK);
    }
    let mut rows: Vec<&OverlapRow> = scores.rows.iter().collect();
    let order = rank_order(scores.target, |r| tie_key(r.score));
    rows.sort_by(|a, b| order(a, b));
    Ok(rows
        .into_iter()
        .take(k)
        .map(|r| Candidate {
            word: r.candidate,
            score: r.score,
            l_common: r.l_common,
            strategy_score: None,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy2 {
    pub candidates: Vec<Candidate>,
    /// `ln(Σ L · max L)`; a negative value inverts the ordering relative to `L`.
    pub denominator: f64,
}

pub fn strategy2(scores: &OverlapScores, k: usize) -> Result<Strategy2, NeighborError> {
    if k == 0 {
        return Err(NeighborError::InvalidK);
    }
    let positive: Vec<&OverlapRow> = scores.rows.iter().filter(|r| r.score > 0.0).collect();
    if positive.is_empty() {
        return Err(NeighborError::NoCandidates);
    }
    let sum: f64 = positive.iter().map(|r| r.score).sum();
    let max = positive.iter().map(|r| r.score).fold(f64::NEG_INFINITY, f64::max);
    let denominator = (sum * max).ln();
    if denominator.abs() <= f64::EPSILON {
        return Err(NeighborError::DegenerateDenominator { sum, max });
    }
    if denominator < 0.0 {
        log::warn!("strategy 2 denominator is negative ({denominator}); ordering is inverted");
    }
    let s = |r: &OverlapRow| r.score.ln() / denominator;
    let mut rows = positive;
    let order = rank_order(scores.target, |r| tie_key(s(r)));
    rows.sort_by(|a, b| order(a, b));
    let candidates = rows
        .into_iter()
        .take(k)
        .map(|r| Candidate {
            word: r.candidate,
            score: r.score,
            l_common: r.l_common,
            strategy_score: Some(s(r)),
        })
        .collect();
    Ok(Strategy2 { candidates, denominator })
}

/// Members of `first` also present in `second`, in `first`'s order.
pub fn closest(first: &[Candidate], second: &[Candidate]) -> Vec<Candidate> {
    let mut in_second: Vec<WordId> = second.iter().map(|c| c.word).collect();
    in_second.sort_unstable();
    first
        .iter()
        .filter(|c| in_second.binary_search(&c.word).is_ok())
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborReport {
    pub target: WordId,
    pub k: usize,
    pub strategy1: Vec<Candidate>,
    pub strategy2: Vec<Candidate>,
    pub closest: Vec<Candidate>,
    pub strategy2_denominator: f64,
}

pub fn neighbor_report(m: &BoltzmannMatrix, target: WordId, k: usize) -> Result<NeighborReport, NeighborError> {
    let scores = overlap_scores(m, target)?;
    let first = strategy1(&scores, k)?;
    let second = strategy2(&scores, k)?;
    let both = closest(&first, &second.candidates);
    Ok(NeighborReport {
        target,
        k,
        strategy1: first,
        strategy2: second.candidates,
        closest: both,
        strategy2_denominator: second.denominator,
    })
}
