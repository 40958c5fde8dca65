//! Projection of mean Boltzmann profiles onto the open unit Poincaré disk.
//!
//! A word with mean row probability `x` and mean column probability `y` is
//! placed at
//!
//! ```text
//! ρ  = x² + y²            (RhoMode::Squared)  or  sqrt(x² + y²)  (RhoMode::Euclidean)
//! θ  = arctan(y / x)
//! ρ' = ½ ln((1 + ρ) / (1 − ρ)),   θ' = θ
//! ```
//!
//! `ρ'` is read as popularity (smaller is more popular) and `θ'` as similarity.

mod convergence;
mod plot;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::boltzmann::{mean_profile, BoltzmannError, BoltzmannMatrix};
use crate::corpus::{Vocabulary, WordId};

pub use convergence::{convergence, AxisConvergence, ConvergenceTrace, EpochPoint, WordConvergence, DEFAULT_EPSILON};
pub use plot::{render_svg, PlotPoint};

/// ρ values at or above 1 are pulled back to this just inside the disk.
pub const CLAMP_RHO: f64 = 1.0 - 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DiskError {
    #[error("x must be > 0 to form arctan(y/x), got {0}")]
    NonPositiveX(f64),
    #[error("y must be >= 0, got {0}")]
    NegativeY(f64),
    #[error("rho must be >= 0, got {0}")]
    NegativeRho(f64),
    #[error("convergence needs at least 2 epochs, word {word} has {epochs}")]
    TooFewEpochs { word: String, epochs: usize },
    #[error("no coordinate sets to average")]
    NothingToAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoMode {
    /// `ρ = x² + y²`.
    #[default]
    Squared,
    /// `ρ = sqrt(x² + y²)`.
    Euclidean,
}

impl fmt::Display for RhoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhoMode::Squared => "squared",
            RhoMode::Euclidean => "euclidean",
        })
    }
}

impl FromStr for RhoMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "squared" => Ok(RhoMode::Squared),
            "euclidean" => Ok(RhoMode::Euclidean),
            other => Err(format!("unknown rho mode {other:?} (expected squared or euclidean)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Polar {
    pub rho: f64,
    pub theta: f64,
}

pub fn to_polar(x: f64, y: f64, mode: RhoMode) -> Result<Polar, DiskError> {
    if !(x > 0.0) {
        return Err(DiskError::NonPositiveX(x));
    }
    if !(y >= 0.0) {
        return Err(DiskError::NegativeY(y));
    }
    let squared = x * x + y * y;
    let rho = match mode {
        RhoMode::Squared => squared,
        RhoMode::Euclidean => squared.sqrt(),
    };
    Ok(Polar {
        rho,
        theta: (y / x).atan(),
    })
}

/// Position on the disk; `rho` is the value actually transformed (after
/// clamping).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskPosition {
    pub rho: f64,
    pub rho_prime: f64,
    pub theta_prime: f64,
    pub clamped: bool,
}

pub fn to_disk(rho: f64, theta: f64) -> Result<DiskPosition, DiskError> {
    if !(rho >= 0.0) {
        return Err(DiskError::NegativeRho(rho));
    }
    let clamped = rho >= 1.0;
    let r = if clamped {
        log::warn!("rho = {rho} lies outside the open unit disk; clamped to {CLAMP_RHO}");
        CLAMP_RHO
    } else {
        rho
    };
    Ok(DiskPosition {
        rho: r,
        rho_prime: 0.5 * ((1.0 + r) / (1.0 - r)).ln(),
        theta_prime: theta,
        clamped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskCoordinates {
    pub word: WordId,
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub rho_prime: f64,
    pub theta_prime: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    /// Sorted by ascending `rho_prime` (most popular first), ties by id.
    pub coordinates: Vec<DiskCoordinates>,
    pub errors: Vec<(WordId, String)>,
}

pub fn embed_word(m: &BoltzmannMatrix, word: WordId, mode: RhoMode) -> Result<DiskCoordinates, EmbedError> {
    let profile = mean_profile(m, word)?;
    let polar = to_polar(profile.x, profile.y, mode)?;
    let pos = to_disk(polar.rho, polar.theta)?;
    Ok(DiskCoordinates {
        word,
        x: profile.x,
        y: profile.y,
        rho: polar.rho,
        rho_prime: pos.rho_prime,
        theta_prime: pos.theta_prime,
        clamped: pos.clamped,
    })
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Profile(#[from] BoltzmannError),
    #[error(transparent)]
    Geometry(#[from] DiskError),
}

pub fn embed_words(m: &BoltzmannMatrix, words: &[WordId], mode: RhoMode) -> Embedding {
    let mut coordinates = Vec::with_capacity(words.len());
    let mut errors = Vec::new();
    for &w in words {
        match embed_word(m, w, mode) {
            Ok(c) => coordinates.push(c),
            Err(e) => errors.push((w, e.to_string())),
        }
    }
    coordinates.sort_by(|a, b| a.rho_prime.total_cmp(&b.rho_prime).then(a.word.cmp(&b.word)));
    Embedding { coordinates, errors }
}

/// Coordinates keyed by token, so results from different models line up.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenCoordinates {
    pub token: String,
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub rho_prime: f64,
    pub theta_prime: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenEmbedding {
    pub coordinates: Vec<TokenCoordinates>,
    pub errors: Vec<(String, String)>,
}

/// Embeds tokens looked up in `vocab`; unknown tokens become error entries.
pub fn embed_tokens<S: AsRef<str>>(m: &BoltzmannMatrix, vocab: &Vocabulary, tokens: &[S], mode: RhoMode) -> TokenEmbedding {
    let mut errors = Vec::new();
    let mut ids = Vec::new();
    for t in tokens {
        match vocab.id(t.as_ref()) {
            Some(id) => ids.push(id),
            None => errors.push((t.as_ref().to_owned(), "not in vocabulary".to_owned())),
        }
    }
    let e = embed_words(m, &ids, mode);
    errors.extend(e.errors.into_iter().map(|(w, msg)| (vocab.token(w).to_owned(), msg)));
    let coordinates = e
        .coordinates
        .into_iter()
        .map(|c| TokenCoordinates {
            token: vocab.token(c.word).to_owned(),
            x: c.x,
            y: c.y,
            rho: c.rho,
            rho_prime: c.rho_prime,
            theta_prime: c.theta_prime,
            clamped: c.clamped,
        })
        .collect();
    TokenEmbedding { coordinates, errors }
}

/// Per-axis arithmetic mean across several embeddings. A token is kept only
/// if every embedding has it; otherwise it becomes an error entry.
pub fn average_embeddings(runs: &[TokenEmbedding]) -> Result<TokenEmbedding, DiskError> {
    let first = runs.first().ok_or(DiskError::NothingToAverage)?;
    let n = runs.len() as f64;
    let mut coordinates = Vec::new();
    let mut errors: Vec<(String, String)> = Vec::new();
    for run in runs {
        for (t, msg) in &run.errors {
            if !errors.iter().any(|(e, _)| e == t) {
                errors.push((t.clone(), msg.clone()));
            }
        }
    }
    for c in &first.coordinates {
        let found: Vec<&TokenCoordinates> = runs
            .iter()
            .filter_map(|r| r.coordinates.iter().find(|o| o.token == c.token))
            .collect();
        if found.len() != runs.len() {
            if !errors.iter().any(|(e, _)| e == &c.token) {
                errors.push((c.token.clone(), "missing from some models".into()));
            }
            continue;
        }
        let avg = |f: fn(&TokenCoordinates) -> f64| found.iter().map(|c| f(c)).sum::<f64>() / n;
        coordinates.push(TokenCoordinates {
            token: c.token.clone(),
            x: avg(|c| c.x),
            y: avg(|c| c.y),
            rho: avg(|c| c.rho),
            rho_prime: avg(|c| c.rho_prime),
            theta_prime: avg(|c| c.theta_prime),
            clamped: found.iter().any(|c| c.clamped),
        });
    }
    coordinates.sort_by(|a, b| a.rho_prime.total_cmp(&b.rho_prime).then_with(|| a.token.cmp(&b.token)));
    Ok(TokenEmbedding { coordinates, errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boltzmann::boltzmann_normalize;
    use crate::metric::{EntropyTable, Normalization};
    use crate::sparse::SparseRows;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn polar_examples() {
        assert_eq!(to_polar(0.2, 0.2, RhoMode::Squared).unwrap().theta, FRAC_PI_4);
        let p = to_polar(0.3, 0.4, RhoMode::Squared).unwrap();
        assert!((p.rho - 0.25).abs() < 1e-15);
        assert!((p.theta - 0.927_295_218_001_612_2).abs() < 1e-15);
        let e = to_polar(0.3, 0.4, RhoMode::Euclidean).unwrap();
        assert!((e.rho - 0.5).abs() < 1e-15);
        let tiny = to_polar(0.5, 1e-300, RhoMode::Squared).unwrap();
        assert_eq!(tiny.rho, 0.25);
        assert!(tiny.theta < 1e-299);
        assert_eq!(to_polar(0.0, 0.1, RhoMode::Squared), Err(DiskError::NonPositiveX(0.0)));
        assert!(to_polar(-1.0, 0.1, RhoMode::Squared).is_err());
    }

    #[test]
    fn disk_examples() {
        assert_eq!(to_disk(0.0, 0.1).unwrap().rho_prime, 0.0);
        assert!((to_disk(0.5, 0.0).unwrap().rho_prime - 0.5 * 3f64.ln()).abs() < 1e-15);
        let c = to_disk(1.2, 0.3).unwrap();
        assert!(c.clamped);
        let expected = 0.5 * ((2.0 - 1e-9) / 1e-9f64).ln();
        assert!((c.rho_prime - expected).abs() < 1e-6 * expected);
        assert_eq!(c.theta_prime, 0.3);
        assert!(to_disk(-0.1, 0.0).is_err());
    }

    #[test]
    fn singleton_word_is_clamped() {
        let h = EntropyTable::from_rows(SparseRows::from_sorted(1, vec![(0, 0, 0.4)]), Normalization::Relative);
        let m = boltzmann_normalize(&h);
        let e = embed_words(&m, &[0], RhoMode::Squared);
        let c = &e.coordinates[0];
        assert_eq!((c.x, c.y), (1.0, 1.0));
        assert_eq!(c.rho, 2.0);
        assert_eq!(c.theta_prime, FRAC_PI_4);
        assert!(c.clamped);
    }

    #[test]
    fn embed_collects_per_word_errors() {
        let h = EntropyTable::from_rows(
            SparseRows::from_sorted(3, vec![(0, 1, 0.0), (0, 2, 0.0), (1, 0, 0.0), (1, 2, 0.0)]),
            Normalization::Relative,
        );
        let m = boltzmann_normalize(&h);
        let e = embed_words(&m, &[2, 0, 1], RhoMode::Squared);
        assert_eq!(e.errors.len(), 1);
        assert_eq!(e.errors[0].0, 2);
        assert_eq!(e.coordinates.len(), 2);
        assert!(e.coordinates[0].rho_prime <= e.coordinates[1].rho_prime);
    }

    #[test]
    fn averaging_is_per_axis() {
        let tc = |token: &str, rp: f64, tp: f64| TokenCoordinates {
            token: token.into(),
            x: 0.1,
            y: 0.2,
            rho: 0.05,
            rho_prime: rp,
            theta_prime: tp,
            clamped: false,
        };
        let a = TokenEmbedding {
            coordinates: vec![tc("red", 0.1, 0.5), tc("pink", 0.3, 0.7)],
            errors: vec![],
        };
        let b = TokenEmbedding {
            coordinates: vec![tc("red", 0.3, 0.7)],
            errors: vec![("pink".into(), "not in vocabulary".into())],
        };
        let avg = average_embeddings(&[a, b]).unwrap();
        assert_eq!(avg.coordinates.len(), 1);
        assert!((avg.coordinates[0].rho_prime - 0.2).abs() < 1e-15);
        assert!((avg.coordinates[0].theta_prime - 0.6).abs() < 1e-15);
        assert_eq!(avg.errors.len(), 1);
        assert!(average_embeddings(&[]).is_err());
    }

    #[test]
    fn modes_parse() {
        assert_eq!("euclidean".parse::<RhoMode>().unwrap(), RhoMode::Euclidean);
        assert_eq!(RhoMode::default().to_string(), "squared");
    }
}
