use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hyperlex::baseline::{compare_reports, cosine_neighbors, Comparison, GoldSet, VectorTable};
use hyperlex::config::OutputFormat;
use hyperlex::corpus::model_file::{decode_model, encode_model};
use hyperlex::corpus::{split_epochs, CooccurrenceCounter};
use hyperlex::disk::{
    average_embeddings, convergence, render_svg, ConvergenceTrace, EpochPoint, PlotPoint, TokenCoordinates,
    TokenEmbedding, WordConvergence,
};
use hyperlex::neighbors::Candidate;
use hyperlex::{Analysis, AnalysisError, Model, RunConfig, TokenStream, Vocabulary};
use serde::Serialize;

use crate::meta::{self, Metadata};
use crate::CliError;

fn meta_safe(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s.into_bytes()
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::Metric(_) => CliError::internal(e.to_string()),
        _ => CliError::data(e.to_string()),
    }
}

fn read_corpus(inputs: &[PathBuf], meta: &mut Metadata) -> Result<TokenStream, CliError> {
    if inputs.is_empty() {
        return Err(CliError::usage("no input files given"));
    }
    let mut stream = TokenStream::new();
    for path in inputs {
        let mut reader = meta::open(path)?;
        stream
            .read_document(&mut reader)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        meta.push_input(path, reader.into_inner().finish());
    }
    Ok(stream)
}

fn load(path: &Path, meta: &mut Metadata) -> Result<Model, CliError> {
    let bytes = meta::read(path)?;
    meta.push_input(path, meta::crc64(&bytes));
    let model = decode_model(&bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    // counting settings come from the model, not the command line
    meta.config.window = model.table.window();
    if let Some(m) = model.meta.get("min_count").and_then(|v| v.parse().ok()) {
        meta.config.min_count = m;
    }
    Ok(model)
}

fn analyse(model: Model, config: &RunConfig) -> Result<Analysis, CliError> {
    Analysis::build(model.vocab, model.table, config.normalization).map_err(analysis_error)
}

/// Counts `inputs` (one document per file) and returns the encoded model.
pub fn cmd_count(inputs: &[PathBuf], config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let mut meta = Metadata::new(config);
    let stream = read_corpus(inputs, &mut meta)?;
    let (vocab, table) = stream
        .count(config.window, config.min_count)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let mut model = Model::new(vocab, table);
    model.meta.insert("tool".into(), format!("{} {}", meta.tool, meta.version));
    model.meta.insert("config".into(), meta.config_json());
    model.meta.insert("min_count".into(), config.min_count.to_string());
    model.meta.insert("documents".into(), stream.documents().to_string());
    for (i, input) in meta.inputs.iter().enumerate() {
        model.meta.insert(format!("input.{i:04}.path"), meta_safe(&input.path));
        model.meta.insert(format!("input.{i:04}.crc64"), input.crc64.clone());
    }
    Ok(encode_model(&model))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Summary,
    Vocab,
    Pairs,
    Entropy,
    Boltzmann,
}

impl FromStr for View {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "summary" => Ok(View::Summary),
            "vocab" => Ok(View::Vocab),
            "pairs" => Ok(View::Pairs),
            "entropy" => Ok(View::Entropy),
            "boltzmann" => Ok(View::Boltzmann),
            other => Err(format!(
                "unknown view {other:?} (expected summary, vocab, pairs, entropy or boltzmann)"
            )),
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    meta: &'a Metadata,
    model: &'a std::collections::BTreeMap<String, String>,
    window: usize,
    vocabulary: usize,
    total_tokens: u64,
    pairs: usize,
    total_mass: u64,
}

#[derive(Serialize)]
struct Cell<'a, T> {
    target: &'a str,
    context: &'a str,
    value: T,
}

#[derive(Serialize)]
struct Dump<'a, T> {
    meta: &'a Metadata,
    view: &'static str,
    rows: Vec<T>,
}

pub fn cmd_inspect(path: &Path, view: View, config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let mut meta = Metadata::new(config);
    let model = load(path, &mut meta)?;
    let json_out = config.format == OutputFormat::Json;
    let mut s = meta.tsv_header();
    match view {
        View::Summary => {
            let summary = Summary {
                meta: &meta,
                model: &model.meta,
                window: model.table.window(),
                vocabulary: model.vocab.len(),
                total_tokens: model.vocab.total_tokens(),
                pairs: model.table.nnz(),
                total_mass: model.table.total_mass(),
            };
            if json_out {
                return Ok(json(&summary));
            }
            s.push_str("key\tvalue\n");
            for (k, v) in [
                ("window", summary.window.to_string()),
                ("vocabulary", summary.vocabulary.to_string()),
                ("total_tokens", summary.total_tokens.to_string()),
                ("pairs", summary.pairs.to_string()),
                ("total_mass", summary.total_mass.to_string()),
            ] {
                let _ = writeln!(s, "{k}\t{v}");
            }
            for (k, v) in &model.meta {
                let _ = writeln!(s, "model.{k}\t{v}");
            }
        }
        View::Vocab => {
            if json_out {
                return Ok(json(&Dump { meta: &meta, view: "vocab", rows: model.vocab.entries().to_vec() }));
            }
            s.push_str("id\ttoken\tfrequency\n");
            for e in model.vocab.entries() {
                let _ = writeln!(s, "{}\t{}\t{}", e.id, e.token, e.frequency);
            }
        }
        View::Pairs => {
            let v = &model.vocab;
            let rows: Vec<Cell<u64>> = model
                .table
                .iter()
                .map(|(a, b, c)| Cell { target: v.token(a), context: v.token(b), value: c })
                .collect();
            return Ok(cells(&meta, "pairs", "count", rows, json_out, s));
        }
        View::Entropy | View::Boltzmann => {
            let a = analyse(model, config)?;
            let (name, rows) = match view {
                View::Entropy => ("entropy", a.entropy.rows()),
                _ => ("boltzmann", a.boltzmann.rows()),
            };
            let v = &a.vocab;
            let rows: Vec<Cell<f64>> = rows
                .iter()
                .map(|(x, y, &val)| Cell { target: v.token(x), context: v.token(y), value: val })
                .collect();
            return Ok(cells(&meta, name, name, rows, json_out, s));
        }
    }
    Ok(s.into_bytes())
}

fn cells<T: Serialize + std::fmt::Display>(
    meta: &Metadata,
    view: &'static str,
    column: &str,
    rows: Vec<Cell<T>>,
    json_out: bool,
    mut s: String,
) -> Vec<u8> {
    if json_out {
        return json(&Dump { meta, view, rows });
    }
    let _ = writeln!(s, "target\tcontext\t{column}");
    for r in rows {
        let _ = writeln!(s, "{}\t{}\t{}", r.target, r.context, r.value);
    }
    s.into_bytes()
}

fn within_one_edit(a: &str, b: &str) -> bool {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    match long.len() - short.len() {
        0 => short.iter().zip(long.iter()).filter(|(x, y)| x != y).count() <= 1,
        1 => {
            let prefix = short.iter().zip(long.iter()).take_while(|(x, y)| x == y).count();
            short[prefix..] == long[prefix + 1..]
        }
        _ => false,
    }
}

/// Vocabulary entries one edit away from `token`, most frequent first.
pub fn suggestions(vocab: &Vocabulary, token: &str) -> Vec<String> {
    vocab
        .entries()
        .iter()
        .filter(|e| e.token != token && within_one_edit(&e.token, token))
        .take(10)
        .map(|e| e.token.clone())
        .collect()
}

fn unknown_token(vocab: &Vocabulary, token: &str) -> CliError {
    let near = suggestions(vocab, token);
    if near.is_empty() {
        CliError::data(format!("unknown token {token:?}"))
    } else {
        CliError::data(format!("unknown token {token:?}; did you mean: {}", near.join(", ")))
    }
}

#[derive(Serialize)]
struct ListEntry {
    word: String,
    score: f64,
    l_common: usize,
    strategy_score: Option<f64>,
}

#[derive(Serialize)]
struct NeighborsOut<'a> {
    meta: &'a Metadata,
    target: &'a str,
    k: usize,
    strategy2_denominator: f64,
    strategy1: Vec<ListEntry>,
    strategy2: Vec<ListEntry>,
    closest: Vec<ListEntry>,
}

pub fn cmd_neighbors(path: &Path, target: &str, config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let mut meta = Metadata::new(config);
    let model = load(path, &mut meta)?;
    if model.vocab.id(target).is_none() {
        return Err(unknown_token(&model.vocab, target));
    }
    let a = analyse(model, config)?;
    let r = a.neighbors(target, config.k).map_err(analysis_error)?;
    let list = |c: &[Candidate]| -> Vec<ListEntry> {
        c.iter()
            .map(|c| ListEntry {
                word: a.vocab.token(c.word).to_owned(),
                score: c.score,
                l_common: c.l_common,
                strategy_score: c.strategy_score,
            })
            .collect()
    };
    let out = NeighborsOut {
        meta: &meta,
        target,
        k: r.k,
        strategy2_denominator: r.strategy2_denominator,
        strategy1: list(&r.strategy1),
        strategy2: list(&r.strategy2),
        closest: list(&r.closest),
    };
    if config.format == OutputFormat::Json {
        return Ok(json(&out));
    }
    let mut s = meta.tsv_header();
    let _ = writeln!(s, "# target {target} k {} strategy2_denominator {}", out.k, out.strategy2_denominator);
    s.push_str("list\trank\tword\tscore\tl_common\tstrategy_score\n");
    for (name, rows) in [("strategy1", &out.strategy1), ("strategy2", &out.strategy2), ("closest", &out.closest)] {
        for (i, e) in rows.iter().enumerate() {
            let ss = e.strategy_score.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{name}\t{}\t{}\t{}\t{}\t{ss}", i + 1, e.word, e.score, e.l_common);
        }
    }
    Ok(s.into_bytes())
}

/// Where an embed or convergence word list comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordSource {
    Builtin(String),
    File(PathBuf),
    Words(Vec<String>),
}

impl WordSource {
    /// An existing file wins over a builtin set of the same name.
    pub fn parse(arg: &str) -> Self {
        let path = Path::new(arg);
        if !path.exists() && GoldSet::builtin(arg).is_some() {
            WordSource::Builtin(arg.to_owned())
        } else {
            WordSource::File(path.to_owned())
        }
    }

    pub fn words(&self) -> Result<Vec<String>, CliError> {
        match self {
            WordSource::Builtin(name) => GoldSet::builtin_words(name)
                .ok_or_else(|| CliError::usage(format!("unknown word set {name:?}"))),
            WordSource::File(path) => {
                let bytes = meta::read(path)?;
                let mut seen = std::collections::BTreeSet::new();
                Ok(GoldSet::ordered(&String::from_utf8_lossy(&bytes))
                    .into_iter()
                    .filter(|w| seen.insert(w.clone()))
                    .collect())
            }
            WordSource::Words(w) => Ok(w.clone()),
        }
    }
}

#[derive(Serialize)]
struct ErrorEntry {
    word: String,
    message: String,
}

#[derive(Serialize)]
struct EmbedOut<'a> {
    meta: &'a Metadata,
    models: usize,
    coordinates: &'a [TokenCoordinates],
    errors: Vec<ErrorEntry>,
}

fn error_entries(e: &TokenEmbedding) -> Vec<ErrorEntry> {
    e.errors
        .iter()
        .map(|(w, m)| ErrorEntry { word: w.clone(), message: m.clone() })
        .collect()
}

/// Disk coordinates of `words` under each model, averaged per axis when
/// several models are given.
pub fn cmd_embed(models: &[PathBuf], words: &WordSource, config: &RunConfig) -> Result<Vec<u8>, CliError> {
    if models.is_empty() {
        return Err(CliError::usage("no model files given"));
    }
    let mut meta = Metadata::new(config);
    let list = words.words()?;
    let mut runs = Vec::with_capacity(models.len());
    for path in models {
        let a = analyse(load(path, &mut meta)?, config)?;
        runs.push(a.embed(&list, config.rho_mode));
    }
    let e = if runs.len() == 1 {
        runs.pop().expect("one run")
    } else {
        average_embeddings(&runs).map_err(|e| CliError::internal(e.to_string()))?
    };
    for (w, m) in &e.errors {
        log::warn!("{w}: {m}");
    }
    match config.format {
        OutputFormat::Json => Ok(json(&EmbedOut {
            meta: &meta,
            models: models.len(),
            coordinates: &e.coordinates,
            errors: error_entries(&e),
        })),
        OutputFormat::Svg => {
            let points: Vec<PlotPoint> = e
                .coordinates
                .iter()
                .map(|c| PlotPoint { label: c.token.clone(), rho_prime: c.rho_prime, theta_prime: c.theta_prime })
                .collect();
            let mut comments = meta.lines();
            comments.extend(e.errors.iter().map(|(w, m)| format!("error {w}: {m}")));
            Ok(render_svg(&points, "hyperlex disk embedding", &comments).into_bytes())
        }
        OutputFormat::Tsv => {
            let mut s = meta.tsv_header();
            s.push_str("word\tstatus\tx\ty\trho\trho_prime\ttheta_prime\n");
            for c in &e.coordinates {
                let status = if c.clamped { "clamped" } else { "ok" };
                let _ = writeln!(
                    s,
                    "{}\t{status}\t{}\t{}\t{}\t{}\t{}",
                    c.token, c.x, c.y, c.rho, c.rho_prime, c.theta_prime
                );
            }
            for (w, m) in &e.errors {
                let _ = writeln!(s, "{w}\terror: {m}\t\t\t\t\t");
            }
            Ok(s.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct ConvergenceOut<'a> {
    meta: &'a Metadata,
    boundaries: &'a [usize],
    traces: &'a [ConvergenceTrace],
    words: &'a [WordConvergence],
    errors: Vec<ErrorEntry>,
}

/// Re-embeds `words` after every cumulative epoch of the corpus and reports
/// per-axis drift and convergence epochs.
pub fn cmd_convergence(inputs: &[PathBuf], words: &WordSource, config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let mut meta = Metadata::new(config);
    let list = words.words()?;
    let stream = read_corpus(inputs, &mut meta)?;
    let plan = split_epochs(stream.len(), config.epoch_size).map_err(|e| CliError::usage(e.to_string()))?;
    if plan.len() < 2 {
        return Err(CliError::data(format!(
            "corpus of {} tokens gives {} epoch(s) of {} tokens; at least 2 are needed",
            stream.len(),
            plan.len(),
            config.epoch_size
        )));
    }
    let mut counter = CooccurrenceCounter::new(&stream, config.window).map_err(|e| CliError::usage(e.to_string()))?;
    let mut traces: Vec<ConvergenceTrace> = list
        .iter()
        .map(|w| ConvergenceTrace { word: w.clone(), points: Vec::new() })
        .collect();
    let mut last_errors: Vec<(String, String)> = Vec::new();
    for (epoch, &end) in plan.boundaries.iter().enumerate() {
        counter.advance_to(end);
        let (vocab, table) = counter.snapshot(config.min_count).map_err(|e| CliError::internal(e.to_string()))?;
        let a = Analysis::build(vocab, table, config.normalization).map_err(analysis_error)?;
        let e = a.embed(&list, config.rho_mode);
        for c in &e.coordinates {
            let t = traces.iter_mut().find(|t| t.word == c.token).expect("listed word");
            t.points.push(EpochPoint { epoch, rho_prime: c.rho_prime, theta_prime: c.theta_prime });
        }
        log::info!("epoch {epoch}: {end} tokens, {} words placed", e.coordinates.len());
        last_errors = e.errors;
    }
    let (ready, short): (Vec<ConvergenceTrace>, Vec<ConvergenceTrace>) =
        traces.into_iter().partition(|t| t.points.len() >= 2);
    let summary = convergence(&ready, config.epsilon_rho, config.epsilon_theta)
        .map_err(|e| CliError::internal(e.to_string()))?;
    let mut errors: Vec<ErrorEntry> = short
        .iter()
        .map(|t| ErrorEntry {
            word: t.word.clone(),
            message: format!("defined in {} epoch(s); at least 2 are needed", t.points.len()),
        })
        .collect();
    for (w, m) in last_errors {
        if let Some(e) = errors.iter_mut().find(|e| e.word == w) {
            e.message = format!("{}; last epoch: {m}", e.message);
        }
    }
    if config.format == OutputFormat::Json {
        return Ok(json(&ConvergenceOut {
            meta: &meta,
            boundaries: &plan.boundaries,
            traces: &ready,
            words: &summary,
            errors,
        }));
    }
    let mut s = meta.tsv_header();
    s.push_str("record\tword\tepoch\ttokens\trho_prime\ttheta_prime\tdrift_rho\tdrift_theta\n");
    for (t, w) in ready.iter().zip(&summary) {
        for (i, p) in t.points.iter().enumerate() {
            let (dr, dt) = match i {
                0 => (String::new(), String::new()),
                _ => (w.drift_rho[i - 1].to_string(), w.drift_theta[i - 1].to_string()),
            };
            let _ = writeln!(
                s,
                "trace\t{}\t{}\t{}\t{}\t{}\t{dr}\t{dt}",
                t.word, p.epoch, plan.boundaries[p.epoch], p.rho_prime, p.theta_prime
            );
        }
    }
    s.push_str("record\tword\tconverged_rho\tconverged_theta\n");
    let show = |a: hyperlex::disk::AxisConvergence| a.epoch().map(|e| e.to_string()).unwrap_or_else(|| "none".into());
    for w in &summary {
        let _ = writeln!(s, "summary\t{}\t{}\t{}", w.word, show(w.rho_prime), show(w.theta_prime));
    }
    for e in &errors {
        let _ = writeln!(s, "error\t{}\t{}", e.word, e.message);
    }
    Ok(s.into_bytes())
}

#[derive(Serialize)]
struct Ranked {
    word: String,
    score: f64,
}

#[derive(Serialize)]
struct CompareOut<'a> {
    meta: &'a Metadata,
    target: &'a str,
    k: usize,
    entropy: Vec<Ranked>,
    baseline: Vec<Ranked>,
    comparisons: Vec<Comparison>,
}

fn gold_sets(names: &[String]) -> Result<Vec<GoldSet>, CliError> {
    if names.is_empty() {
        return Ok(vec![GoldSet::colors(), GoldSet::kinship()]);
    }
    names
        .iter()
        .map(|n| {
            let path = Path::new(n);
            match GoldSet::builtin(n) {
                Some(g) if !path.exists() => Ok(g),
                _ => {
                    let bytes = meta::read(path)?;
                    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| n.clone());
                    Ok(GoldSet::parse(&name, &String::from_utf8_lossy(&bytes)))
                }
            }
        })
        .collect()
}

/// Entropy `closest` list against cosine neighbors from `vectors`, scored on
/// each gold set.
pub fn cmd_compare(
    model: &Path,
    vectors: &Path,
    target: &str,
    gold: &[String],
    config: &RunConfig,
) -> Result<Vec<u8>, CliError> {
    let mut meta = Metadata::new(config);
    let m = load(model, &mut meta)?;
    if m.vocab.id(target).is_none() {
        return Err(unknown_token(&m.vocab, target));
    }
    let vector_bytes = meta::read(vectors)?;
    meta.push_input(vectors, meta::crc64(&vector_bytes));
    let table = VectorTable::parse(&String::from_utf8_lossy(&vector_bytes))
        .map_err(|e| CliError::data(format!("{}: {e}", vectors.display())))?;
    let gold = gold_sets(gold)?;
    let a = analyse(m, config)?;
    let r = a.neighbors(target, config.k).map_err(analysis_error)?;
    let entropy: Vec<Ranked> = r
        .closest
        .iter()
        .map(|c| Ranked { word: a.vocab.token(c.word).to_owned(), score: c.score })
        .collect();
    let baseline: Vec<Ranked> = cosine_neighbors(&table, target, config.k)
        .map_err(|e| CliError::data(format!("{}: {e}", vectors.display())))?
        .into_iter()
        .map(|(word, score)| Ranked { word, score })
        .collect();
    let ew: Vec<&str> = entropy.iter().map(|r| r.word.as_str()).collect();
    let bw: Vec<&str> = baseline.iter().map(|r| r.word.as_str()).collect();
    let comparisons: Vec<Comparison> = gold.iter().map(|g| compare_reports(&ew, &bw, g)).collect();
    if config.format == OutputFormat::Json {
        return Ok(json(&CompareOut { meta: &meta, target, k: config.k, entropy, baseline, comparisons }));
    }
    let mut s = meta.tsv_header();
    s.push_str("record\trank\tword\tscore\n");
    for (name, rows) in [("entropy", &entropy), ("baseline", &baseline)] {
        for (i, r) in rows.iter().enumerate() {
            let _ = writeln!(s, "{name}\t{}\t{}\t{}", i + 1, r.word, r.score);
        }
    }
    s.push_str("record\tgold\tentropy_hits\tbaseline_hits\tjaccard\n");
    for c in &comparisons {
        let _ = writeln!(s, "gold\t{}\t{}\t{}\t{}", c.gold, c.entropy_hits, c.baseline_hits, c.jaccard);
    }
    Ok(s.into_bytes())
}
