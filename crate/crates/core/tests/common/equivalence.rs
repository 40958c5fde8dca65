// Pipeline-versus-oracle comparison on a single small corpus. Shared by the
// core integration tests and the acceptance suite.

use std::collections::BTreeMap;

use hyperlex::disk::embed_word;
use hyperlex::neighbors::{overlap_scores, strategy1, strategy2, NeighborError};
use hyperlex::{Analysis, Normalization, RhoMode, TokenStream};
use hyperlex_oracle as oracle;

pub const REAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Case {
    pub docs: Vec<Vec<String>>,
    pub window: usize,
    pub min_count: u64,
    pub k: usize,
    pub normalization: Normalization,
    pub rho_mode: RhoMode,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Report {
    pub pairs: usize,
    pub targets: usize,
    pub words: usize,
    pub max_rel_entropy: f64,
    pub max_rel_probability: f64,
    pub max_rel_overlap: f64,
    pub max_rel_coordinate: f64,
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bump(slot: &mut f64, got: f64, want: f64, what: &str) -> Result<(), String> {
    let e = oracle::rel_err(got, want);
    ensure!(e <= REAL_TOLERANCE, "{what}: got {got:e}, want {want:e} (rel {e:e})");
    *slot = slot.max(e);
    Ok(())
}

pub fn check(case: &Case) -> Result<Report, String> {
    let mut stream = TokenStream::new();
    for d in &case.docs {
        stream.push_tokens(d);
    }
    let (vocab, table) = stream.count(case.window, case.min_count).map_err(|e| e.to_string())?;
    let want = oracle::count(&case.docs, case.window, case.min_count);
    let mut report = Report::default();

    // counts: exact
    let got_freq: BTreeMap<String, u64> = vocab.entries().iter().map(|e| (e.token.clone(), e.frequency)).collect();
    ensure!(got_freq == want.freq, "frequencies differ: {got_freq:?} vs {:?}", want.freq);
    ensure!(vocab.total_tokens() == want.total_tokens, "total tokens differ");
    let got_pairs: BTreeMap<(String, String), u64> = table
        .iter()
        .map(|(a, b, c)| ((vocab.token(a).to_owned(), vocab.token(b).to_owned()), c))
        .collect();
    ensure!(got_pairs == want.pairs, "pair counts differ");
    let ids = want.ids();
    for e in vocab.entries() {
        ensure!(ids[&e.token] == e.id, "id of {} differs", e.token);
    }
    report.pairs = got_pairs.len();

    let analysis = Analysis::build(vocab, table, case.normalization).map_err(|e| e.to_string())?;
    let vocab = &analysis.vocab;
    let id = |t: &str| vocab.id(t).expect("token present");

    // d and ranks: exact
    let want_d = oracle::diversity(&want);
    for e in vocab.entries() {
        let got = analysis.weights.diversity(e.id);
        let exp = want_d.get(&e.token).map(oracle::to_f64);
        ensure!(got == exp, "d({}) = {got:?}, want {exp:?}", e.token);
    }
    for ((a, b), &r) in &oracle::ranks(&want) {
        let got = analysis.weights.rank(id(a), id(b));
        ensure!(got == Some(r), "rank({a},{b}) = {got:?}, want {r}");
    }

    // H and P
    let want_h = oracle::entropy(&want, case.normalization == Normalization::Raw);
    for ((a, b), h) in &want_h {
        let got = analysis.entropy.get(id(a), id(b)).ok_or("missing H entry")?;
        bump(&mut report.max_rel_entropy, got, oracle::to_f64(h), &format!("H({a}|{b})"))?;
    }
    ensure!(analysis.entropy.rows().nnz() == want_h.len(), "H domain differs from pairs");
    let want_p = oracle::boltzmann(&want_h);
    for ((a, b), p) in &want_p {
        let got = analysis.boltzmann.get(id(a), id(b)).ok_or("missing P entry")?;
        bump(&mut report.max_rel_probability, got, oracle::to_f64(p), &format!("P({a}|{b})"))?;
    }

    // overlap scores and lists for every target
    for e in vocab.entries() {
        let want_scores = oracle::overlap(&want_p, &e.token);
        let got_scores = overlap_scores(&analysis.boltzmann, e.id);
        let Some(want_scores) = want_scores else {
            ensure!(
                matches!(got_scores, Err(NeighborError::InsufficientSupport { .. })),
                "{}: expected insufficient support",
                e.token
            );
            continue;
        };
        let got_scores = got_scores.map_err(|err| format!("{}: {err}", e.token))?;
        ensure!(got_scores.rows.len() == want_scores.len(), "{}: candidate sets differ", e.token);
        for row in &got_scores.rows {
            let w = vocab.token(row.candidate);
            let o = want_scores.get(w).ok_or_else(|| format!("{}: unexpected candidate {w}", e.token))?;
            ensure!(row.l_common == o.l_common && row.l_candidate == o.l_candidate, "{}: l counts differ for {w}", e.token);
            bump(&mut report.max_rel_overlap, row.score, oracle::to_f64(&o.score), &format!("L[{}]({w})", e.token))?;
        }
        let (want_s1, want_lists) = oracle::strategies(&want_scores, &e.token, &ids, case.k);
        let s1: Vec<String> = analysis.tokens(&strategy1(&got_scores, case.k).map_err(|e| e.to_string())?);
        ensure!(s1 == want_s1, "{}: strategy1 {s1:?} vs {want_s1:?}", e.token);
        match (strategy2(&got_scores, case.k), want_lists) {
            (Ok(s2), Some(lists)) => {
                let got2 = analysis.tokens(&s2.candidates);
                ensure!(got2 == lists.strategy2, "{}: strategy2 {got2:?} vs {:?}", e.token, lists.strategy2);
                let both = analysis.tokens(&hyperlex::neighbors::closest(
                    &strategy1(&got_scores, case.k).unwrap(),
                    &s2.candidates,
                ));
                ensure!(both == lists.closest, "{}: closest differs", e.token);
            }
            (Err(NeighborError::DegenerateDenominator { .. }), None) => {}
            (got, want) => return Err(format!("{}: strategy2 disagreement {got:?} vs {want:?}", e.token)),
        }
        report.targets += 1;
    }

    // coordinates
    let profiles = oracle::mean_profiles(&want_p);
    for e in vocab.entries() {
        let got = embed_word(&analysis.boltzmann, e.id, case.rho_mode);
        match (got, profiles.get(&e.token)) {
            (Ok(c), Some((x, y))) => {
                let w = oracle::coordinates(x, y, case.rho_mode == RhoMode::Euclidean);
                ensure!(c.clamped == w.clamped, "{}: clamp flag differs", e.token);
                let m = &mut report.max_rel_coordinate;
                bump(m, c.x, w.x, "x")?;
                bump(m, c.y, w.y, "y")?;
                bump(m, c.rho, w.rho, "rho")?;
                bump(m, c.rho_prime, w.rho_prime, "rho'")?;
                bump(m, c.theta_prime, w.theta_prime, "theta'")?;
                report.words += 1;
            }
            (Err(_), None) => {}
            (got, want) => return Err(format!("{}: profile availability differs: {got:?} vs {want:?}", e.token)),
        }
    }
    Ok(report)
}
