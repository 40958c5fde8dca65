//! Count snapshot container.
//!
//! ```text
//! HYPXM1
//! meta    <n>              key<TAB>value, sorted by key
//! vocab   <n>              token<TAB>id<TAB>frequency, sorted by id
//! pairs   <n>              target<TAB>context<TAB>count, sorted by (target, context)
//! end     <len:016x>  <crc64:016x>
//! ```
//!
//! Section headers and records are tab-separated. The trailer carries the byte
//! length of everything before it and the CRC-64/XZ of those bytes. Output is
//! a pure function of the model, so re-saving a loaded model is byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crc::{Crc, CRC_64_XZ};
use thiserror::Error;

use super::{CooccurrenceTable, CorpusError, VocabEntry, Vocabulary};

pub const MAGIC: &str = "HYPXM1\n";
const MAGIC_FAMILY: &str = "HYPXM";
const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

const KEY_WINDOW: &str = "window";
const KEY_TOTAL_TOKENS: &str = "total_tokens";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("not a model file (missing magic header)")]
    BadMagic,
    #[error("unsupported model version {found:?}, expected {expected:?}")]
    VersionMismatch { found: String, expected: String },
    #[error("model file is truncated: {0}")]
    Truncated(String),
    #[error("model checksum mismatch: stored {stored:016x}, computed {computed:016x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("malformed model file at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("invalid model contents: {0}")]
    Invalid(#[from] CorpusError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Counts plus free-form metadata (sorted keys).
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub meta: BTreeMap<String, String>,
    pub vocab: Vocabulary,
    pub table: CooccurrenceTable,
}

impl Model {
    pub fn new(vocab: Vocabulary, table: CooccurrenceTable) -> Self {
        Model {
            meta: BTreeMap::new(),
            vocab,
            table,
        }
    }
}

pub fn encode_model(model: &Model) -> Vec<u8> {
    let mut meta = model.meta.clone();
    meta.insert(KEY_WINDOW.into(), model.table.window().to_string());
    meta.insert(KEY_TOTAL_TOKENS.into(), model.vocab.total_tokens().to_string());

    let mut s = String::with_capacity(64 + model.vocab.len() * 16 + model.table.nnz() * 20);
    s.push_str(MAGIC);
    let _ = writeln!(s, "meta\t{}", meta.len());
    for (k, v) in &meta {
        let _ = writeln!(s, "{k}\t{v}");
    }
    let _ = writeln!(s, "vocab\t{}", model.vocab.len());
    for e in model.vocab.entries() {
        let _ = writeln!(s, "{}\t{}\t{}", e.token, e.id, e.frequency);
    }
    let _ = writeln!(s, "pairs\t{}", model.table.nnz());
    for (a, b, c) in model.table.iter() {
        let _ = writeln!(s, "{a}\t{b}\t{c}");
    }
    let body_len = s.len() as u64;
    let crc = CRC64.checksum(s.as_bytes());
    let _ = writeln!(s, "end\t{body_len:016x}\t{crc:016x}");
    s.into_bytes()
}

pub fn decode_model(bytes: &[u8]) -> Result<Model, ModelFileError> {
    if !bytes.starts_with(MAGIC.as_bytes()) {
        if bytes.starts_with(MAGIC_FAMILY.as_bytes()) {
            let found = bytes
                .iter()
                .take_while(|&&b| b != b'\n')
                .map(|&b| b as char)
                .collect();
            return Err(ModelFileError::VersionMismatch {
                found,
                expected: MAGIC.trim_end().into(),
            });
        }
        return Err(ModelFileError::BadMagic);
    }
    if bytes.last() != Some(&b'\n') {
        return Err(ModelFileError::Truncated("file does not end with a complete line".into()));
    }
    let trailer_start = bytes[..bytes.len() - 1]
        .iter()
        .rposition(|&b| b == b'\n')
        .map(|p| p + 1)
        .unwrap_or(0);
    let trailer = std::str::from_utf8(&bytes[trailer_start..bytes.len() - 1])
        .map_err(|_| ModelFileError::Truncated("trailer is not valid text".into()))?;
    let fields: Vec<&str> = trailer.split('\t').collect();
    if fields.len() != 3 || fields[0] != "end" {
        return Err(ModelFileError::Truncated("missing end trailer".into()));
    }
    let parse_hex = |f: &str| {
        u64::from_str_radix(f, 16).map_err(|_| ModelFileError::Truncated(format!("bad trailer field {f:?}")))
    };
    let stored_len = parse_hex(fields[1])?;
    let stored_crc = parse_hex(fields[2])?;
    if stored_len != trailer_start as u64 {
        return Err(ModelFileError::Truncated(format!(
            "trailer records {stored_len} bytes, found {trailer_start}"
        )));
    }
    let body = &bytes[..trailer_start];
    let computed = CRC64.checksum(body);
    if computed != stored_crc {
        return Err(ModelFileError::Checksum {
            stored: stored_crc,
            computed,
        });
    }
    let text = std::str::from_utf8(body).map_err(|e| ModelFileError::Malformed {
        line: 0,
        reason: format!("invalid utf-8: {e}"),
    })?;
    parse_body(text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self) -> Result<Vec<&'a str>, ModelFileError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.split('\t').collect())
            }
            None => Err(ModelFileError::Malformed {
                line: self.line + 1,
                reason: "unexpected end of body".into(),
            }),
        }
    }

    fn err(&self, reason: impl Into<String>) -> ModelFileError {
        ModelFileError::Malformed {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn section(&mut self, name: &str) -> Result<usize, ModelFileError> {
        let f = self.next_fields()?;
        if f.len() != 2 || f[0] != name {
            return Err(self.err(format!("expected {name} section header")));
        }
        f[1].parse().map_err(|_| self.err("bad section length"))
    }

    fn num<T: std::str::FromStr>(&self, field: &str) -> Result<T, ModelFileError> {
        field.parse().map_err(|_| self.err(format!("bad number {field:?}")))
    }
}

fn parse_body(text: &str) -> Result<Model, ModelFileError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    lines.next_fields()?;

    let n_meta = lines.section("meta")?;
    let mut meta = BTreeMap::new();
    for _ in 0..n_meta {
        let f = lines.next_fields()?;
        if f.len() != 2 {
            return Err(lines.err("meta record needs key and value"));
        }
        meta.insert(f[0].to_owned(), f[1].to_owned());
    }
    let window: usize = match meta.remove(KEY_WINDOW) {
        Some(v) => lines.num(&v)?,
        None => return Err(lines.err("meta is missing window")),
    };
    let total_tokens: u64 = match meta.remove(KEY_TOTAL_TOKENS) {
        Some(v) => lines.num(&v)?,
        None => return Err(lines.err("meta is missing total_tokens")),
    };

    let n_vocab = lines.section("vocab")?;
    let mut entries = Vec::with_capacity(n_vocab);
    for _ in 0..n_vocab {
        let f = lines.next_fields()?;
        if f.len() != 3 {
            return Err(lines.err("vocab record needs token, id, frequency"));
        }
        entries.push(VocabEntry {
            token: f[0].to_owned(),
            id: lines.num(f[1])?,
            frequency: lines.num(f[2])?,
        });
    }
    let vocab = Vocabulary::from_entries(entries, total_tokens)?;

    let n_pairs = lines.section("pairs")?;
    let mut triples = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let f = lines.next_fields()?;
        if f.len() != 3 {
            return Err(lines.err("pair record needs target, context, count"));
        }
        triples.push((lines.num(f[0])?, lines.num(f[1])?, lines.num(f[2])?));
    }
    if lines.inner.next().is_some() {
        return Err(lines.err("trailing data after pairs section"));
    }
    let table = CooccurrenceTable::from_sorted_triples(window, vocab.len(), triples)?;
    Ok(Model { meta, vocab, table })
}

pub fn write_model(path: &Path, model: &Model) -> Result<(), ModelFileError> {
    let io_err = |source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp_name = format!(
        ".{}.tmp{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("model"),
        std::process::id()
    );
    let tmp = dir.join(tmp_name);
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(&encode_model(model)).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn read_model(path: &Path) -> Result<Model, ModelFileError> {
    let bytes = fs::read(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_model(&bytes)
}

pub fn save_model(path: &Path, vocab: &Vocabulary, table: &CooccurrenceTable) -> Result<(), ModelFileError> {
    write_model(path, &Model::new(vocab.clone(), table.clone()))
}

pub fn load_model(path: &Path) -> Result<(Vocabulary, CooccurrenceTable), ModelFileError> {
    let m = read_model(path)?;
    Ok((m.vocab, m.table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::count;

    fn toy() -> Model {
        let (v, t) = count(&["red", "blue", "red", "green", "red"], 1, 1).unwrap();
        let mut m = Model::new(v, t);
        m.meta.insert("min_count".into(), "1".into());
        m
    }

    #[test]
    fn empty_model_round_trips() {
        let m = Model::new(
            Vocabulary::empty(),
            CooccurrenceTable::from_sorted_triples(3, 0, vec![]).unwrap(),
        );
        let bytes = encode_model(&m);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("HYPXM1\nmeta\t2\ntotal_tokens\t0\nwindow\t3\nvocab\t0\npairs\t0\nend\t"));
        assert_eq!(decode_model(&bytes).unwrap(), m);
    }

    #[test]
    fn toy_model_round_trips() {
        let m = toy();
        let bytes = encode_model(&m);
        let back = decode_model(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(encode_model(&back), bytes);
    }

    #[test]
    fn layout_is_stable() {
        let bytes = encode_model(&toy());
        let text = String::from_utf8(bytes).unwrap();
        let body: Vec<&str> = text.lines().collect();
        assert_eq!(
            &body[..14],
            &[
                "HYPXM1",
                "meta\t3",
                "min_count\t1",
                "total_tokens\t5",
                "window\t1",
                "vocab\t3",
                "red\t0\t3",
                "blue\t1\t1",
                "green\t2\t1",
                "pairs\t4",
                "0\t1\t2",
                "0\t2\t2",
                "1\t0\t2",
                "2\t0\t2",
            ]
        );
        assert!(body[14].starts_with("end\t"));
    }

    #[test]
    fn distinct_failure_modes() {
        let bytes = encode_model(&toy());

        let mut v2 = bytes.clone();
        v2[5] = b'2';
        assert!(matches!(decode_model(&v2), Err(ModelFileError::VersionMismatch { .. })));

        assert!(matches!(decode_model(b"hello\n"), Err(ModelFileError::BadMagic)));

        let cut = &bytes[..bytes.len() - 10];
        assert!(matches!(decode_model(cut), Err(ModelFileError::Truncated(_))));
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(decode_model(cut), Err(ModelFileError::Truncated(_))));

        let mut flipped = bytes.clone();
        let pos = flipped.iter().position(|&b| b == b'b').unwrap();
        flipped[pos] = b'c';
        assert!(matches!(decode_model(&flipped), Err(ModelFileError::Checksum { .. })));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.hypx");
        let m = toy();
        save_model(&path, &m.vocab, &m.table).unwrap();
        let (v, t) = load_model(&path).unwrap();
        assert_eq!(v, m.vocab);
        assert_eq!(t, m.table);
        assert!(matches!(
            load_model(&dir.path().join("missing")),
            Err(ModelFileError::Io { .. })
        ));
    }
}
