//! Cosine-similarity neighbors over externally trained word vectors, and
//! comparison of those lists against entropy-based neighbor sets.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VectorError {
    #[error("vector file is empty")]
    Empty,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("k must be >= 1")]
    InvalidK,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Word vectors of a single shared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTable {
    dimension: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    warnings: Vec<String>,
}

impl VectorTable {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dimension..(i + 1) * self.dimension])
    }

    /// Non-fatal issues found while parsing (duplicates, count mismatch).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Parses the textual vector format: an optional `count dimension`
    /// header, then `token v1 ... vd` per line.
    pub fn parse(text: &str) -> Result<Self, VectorError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
        let mut declared_count = None;
        let mut dimension = None;
        if let Some((_, first)) = lines.peek() {
            let f: Vec<&str> = first.split_whitespace().collect();
            if f.len() == 2 {
                if let (Ok(n), Ok(d)) = (f[0].parse::<usize>(), f[1].parse::<usize>()) {
                    declared_count = Some(n);
                    dimension = Some(d);
                    lines.next();
                }
            }
        }
        let mut table = VectorTable {
            dimension: dimension.unwrap_or(0),
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            warnings: Vec::new(),
        };
        let mut saw_row = false;
        for (i, line) in lines {
            let line_no = i + 1;
            saw_row = true;
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-blank line has a field");
            let values: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| VectorError::Parse {
                            line: line_no,
                            reason: format!("non-numeric field {f:?}"),
                        })
                })
                .collect::<Result<_, _>>()?;
            let expected = *dimension.get_or_insert(values.len());
            if values.len() != expected || expected == 0 {
                return Err(VectorError::Parse {
                    line: line_no,
                    reason: format!("expected {expected} values, found {}", values.len()),
                });
            }
            if values.iter().all(|&v| v == 0.0) {
                return Err(VectorError::Parse {
                    line: line_no,
                    reason: format!("zero vector for {token:?}"),
                });
            }
            table.dimension = expected;
            match table.index.get(token) {
                Some(&row) => {
                    let msg = format!("line {line_no}: duplicate token {token:?}, keeping the later vector");
                    log::warn!("{msg}");
                    table.warnings.push(msg);
                    table.data[row * expected..(row + 1) * expected].copy_from_slice(&values);
                }
                None => {
                    table.index.insert(token.to_owned(), table.tokens.len());
                    table.tokens.push(token.to_owned());
                    table.data.extend(values);
                }
            }
        }
        if !saw_row {
            return Err(VectorError::Empty);
        }
        if let Some(n) = declared_count.filter(|&n| n != table.len()) {
            let msg = format!("header declares {n} vectors, found {}", table.len());
            log::warn!("{msg}");
            table.warnings.push(msg);
        }
        Ok(table)
    }
}

pub fn load_vectors(path: &Path) -> Result<VectorTable, VectorError> {
    let bytes = std::fs::read(path).map_err(|source| VectorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    VectorTable::parse(&String::from_utf8_lossy(&bytes))
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

/// Top-k tokens by cosine similarity to `target`, the target itself first.
pub fn cosine_neighbors(table: &VectorTable, target: &str, k: usize) -> Result<Vec<(String, f64)>, VectorError> {
    if k == 0 {
        return Err(VectorError::InvalidK);
    }
    let tv = table
        .vector(target)
        .ok_or_else(|| VectorError::UnknownToken(target.to_owned()))?;
    let mut scored: Vec<(&str, f64)> = table
        .tokens
        .iter()
        .filter(|t| t.as_str() != target)
        .map(|t| (t.as_str(), cosine(tv, table.vector(t).expect("indexed"))))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(b.0)));
    let mut out = Vec::with_capacity(k);
    out.push((target.to_owned(), 1.0));
    out.extend(scored.into_iter().take(k - 1).map(|(t, c)| (t.to_owned(), c)));
    Ok(out)
}

const COLORS: &str = include_str!("../data/colors.txt");
const KINSHIP: &str = include_str!("../data/kinship.txt");

/// Fixed semantic-domain word list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSet {
    pub name: String,
    pub words: BTreeSet<String>,
}

impl GoldSet {
    pub fn parse(name: &str, text: &str) -> Self {
        GoldSet {
            name: name.to_owned(),
            words: text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        }
    }

    /// The ten basic color terms.
    pub fn colors() -> Self {
        Self::parse("colors", COLORS)
    }

    /// The twelve kinship terms.
    pub fn kinship() -> Self {
        Self::parse("kinship", KINSHIP)
    }

    fn builtin_text(name: &str) -> Option<(&'static str, &'static str)> {
        match name {
            "colors" | "color" => Some(("colors", COLORS)),
            "kinship" => Some(("kinship", KINSHIP)),
            _ => None,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        Self::builtin_text(name).map(|(n, text)| Self::parse(n, text))
    }

    /// A builtin set in its canonical order.
    pub fn builtin_words(name: &str) -> Option<Vec<String>> {
        Self::builtin_text(name).map(|(_, text)| Self::ordered(text))
    }

    /// Words in file order, for callers that need a deterministic list.
    pub fn ordered(text: &str) -> Vec<String> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub gold: String,
    pub entropy_hits: usize,
    pub baseline_hits: usize,
    pub jaccard: f64,
}

pub fn compare_reports<S: AsRef<str>, T: AsRef<str>>(entropy: &[S], baseline: &[T], gold: &GoldSet) -> Comparison {
    let e: BTreeSet<&str> = entropy.iter().map(AsRef::as_ref).collect();
    let b: BTreeSet<&str> = baseline.iter().map(AsRef::as_ref).collect();
    let hits = |s: &BTreeSet<&str>| s.iter().filter(|w| gold.contains(w)).count();
    let union = e.union(&b).count();
    let jaccard = if union == 0 {
        1.0
    } else {
        e.intersection(&b).count() as f64 / union as f64
    };
    Comparison {
        gold: gold.name.clone(),
        entropy_hits: hits(&e),
        baseline_hits: hits(&b),
        jaccard,
    }
}
