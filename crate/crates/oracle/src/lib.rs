//! Brute-force references for the hyperlex pipeline.
//!
//! Everything here is keyed by token text rather than word id, recounts from
//! raw token positions with a quadratic scan, and evaluates every real-valued
//! formula in 256-bit binary floating point. Nothing is shared with the
//! production code path.

use std::collections::{BTreeMap, BTreeSet};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

pub type Big = FBig<HalfEven, 2>;
pub type Pair = (String, String);

const PRECISION: usize = 128;

pub fn big(v: u64) -> Big {
    Big::from(v).with_precision(PRECISION).value()
}

pub fn to_f64(v: &Big) -> f64 {
    v.to_f64().value()
}

/// Relative error of `got` against `want`; an exact zero must be matched exactly.
pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        if got == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((got - want) / want).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counts {
    pub window: usize,
    pub total_tokens: u64,
    pub freq: BTreeMap<String, u64>,
    pub pairs: BTreeMap<Pair, u64>,
}

impl Counts {
    pub fn contexts(&self, target: &str) -> Vec<(&str, u64)> {
        self.pairs
            .iter()
            .filter(|((a, _), _)| a == target)
            .map(|((_, b), &c)| (b.as_str(), c))
            .collect()
    }

    pub fn context_total(&self, context: &str) -> u64 {
        self.pairs
            .iter()
            .filter(|((_, b), _)| b == context)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn context_totals(&self) -> BTreeMap<&str, u64> {
        let mut out = BTreeMap::new();
        for ((_, b), &c) in &self.pairs {
            *out.entry(b.as_str()).or_insert(0) += c;
        }
        out
    }

    pub fn total_mass(&self) -> u64 {
        self.pairs.values().sum()
    }

    /// Ids by descending frequency, ties by token.
    pub fn ids(&self) -> BTreeMap<String, u32> {
        let mut v: Vec<(&String, &u64)> = self.freq.iter().collect();
        v.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        v.into_iter().enumerate().map(|(i, (t, _))| (t.clone(), i as u32)).collect()
    }
}

/// Enumerates every (position, other position) pair of each document.
pub fn count(docs: &[Vec<String>], window: usize, min_count: u64) -> Counts {
    let mut all: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for doc in docs {
        for t in doc {
            *all.entry(t.clone()).or_insert(0) += 1;
            total += 1;
        }
    }
    let keep = |t: &String| all[t] >= min_count.max(1);
    let mut pairs = BTreeMap::new();
    for doc in docs {
        for (t, target) in doc.iter().enumerate() {
            if !keep(target) {
                continue;
            }
            for (s, context) in doc.iter().enumerate() {
                if s == t || s.abs_diff(t) > window || !keep(context) {
                    continue;
                }
                *pairs.entry((target.clone(), context.clone())).or_insert(0) += 1;
            }
        }
    }
    let freq = all.iter().filter(|(t, _)| keep(t)).map(|(t, &c)| (t.clone(), c)).collect();
    Counts {
        window,
        total_tokens: total,
        freq,
        pairs,
    }
}

pub fn diversity(c: &Counts) -> BTreeMap<String, Big> {
    let mut out = BTreeMap::new();
    for (t, &f) in &c.freq {
        let types: BTreeSet<&str> = c.contexts(t).into_iter().map(|(b, _)| b).collect();
        if !types.is_empty() {
            out.insert(t.clone(), big(f) / big(types.len() as u64));
        }
    }
    out
}

/// Rank of each pair = number of the target's contexts with a strictly larger
/// conditional, compared exactly as rationals.
pub fn ranks(c: &Counts) -> BTreeMap<Pair, u32> {
    let totals = c.context_totals();
    let mut out = BTreeMap::new();
    for ((a, b), &n) in &c.pairs {
        let tb = totals[b.as_str()] as u128;
        let mut greater = 0;
        for (other, m) in c.contexts(a) {
            let to = totals[other] as u128;
            if (m as u128) * tb > (n as u128) * to {
                greater += 1;
            }
        }
        out.insert((a.clone(), b.clone()), greater);
    }
    out
}

/// `H(a|b)` transcribed term by term.
pub fn entropy(c: &Counts, raw: bool) -> BTreeMap<Pair, Big> {
    let d = diversity(c);
    let r = ranks(c);
    let mass = big(c.total_mass());
    let totals = c.context_totals();
    let mut out = BTreeMap::new();
    for ((a, b), &n) in &c.pairs {
        let q = d[a].clone() / big(r[&(a.clone(), b.clone())] as u64 + 1);
        let f_joint = if raw { big(n) } else { big(n) / mass.clone() };
        let f_cond = big(n) / big(totals[b.as_str()]);
        let arg = q.clone() * f_cond;
        let h = -(q * f_joint * arg.ln());
        out.insert((a.clone(), b.clone()), h);
    }
    out
}

/// Row softmax without any shift.
pub fn boltzmann(h: &BTreeMap<Pair, Big>) -> BTreeMap<Pair, Big> {
    let e: Vec<Big> = h.values().map(Big::exp).collect();
    let mut z: BTreeMap<&str, Big> = BTreeMap::new();
    for ((a, _), v) in h.keys().zip(&e) {
        let slot = z.entry(a.as_str()).or_insert_with(|| big(0));
        *slot = slot.clone() + v.clone();
    }
    h.keys()
        .zip(e)
        .map(|((a, b), v)| ((a.clone(), b.clone()), v / z[a.as_str()].clone()))
        .collect()
}

/// `(x, y)` from a dense matrix over every token appearing in `p`.
pub fn mean_profiles(p: &BTreeMap<Pair, Big>) -> BTreeMap<String, (Big, Big)> {
    let words: BTreeSet<&str> = p.keys().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect();
    let words: Vec<&str> = words.into_iter().collect();
    let n = words.len();
    let pos: BTreeMap<&str, usize> = words.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut dense: Vec<Vec<Option<Big>>> = vec![vec![None; n]; n];
    for ((a, b), v) in p {
        dense[pos[a.as_str()]][pos[b.as_str()]] = Some(v.clone());
    }
    let mut out = BTreeMap::new();
    for (i, &w) in words.iter().enumerate() {
        let row: Vec<&Big> = dense[i].iter().flatten().collect();
        let col: Vec<&Big> = (0..n).filter_map(|j| dense[j][i].as_ref()).collect();
        if row.is_empty() || col.is_empty() {
            continue;
        }
        let mean = |v: &[&Big]| v.iter().fold(big(0), |acc, x| acc + (*x).clone()) / big(v.len() as u64);
        out.insert(w.to_owned(), (mean(&row), mean(&col)));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Overlap {
    pub l_candidate: usize,
    pub l_common: usize,
    pub score: Big,
}

fn supports(p: &BTreeMap<Pair, Big>) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut s: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (a, b) in p.keys() {
        s.entry(a.as_str()).or_default().insert(b.as_str());
    }
    s
}

thread_local! {
    static LN_INT: std::cell::RefCell<Vec<Big>> = const { std::cell::RefCell::new(Vec::new()) };
}

fn ln_int(n: usize) -> Big {
    LN_INT.with(|cache| {
        let mut cache = cache.borrow_mut();
        while cache.len() <= n {
            let v = big(cache.len().max(1) as u64).ln();
            cache.push(v);
        }
        cache[n].clone()
    })
}

/// `None` when the target has fewer than two contexts.
pub fn overlap(p: &BTreeMap<Pair, Big>, target: &str) -> Option<BTreeMap<String, Overlap>> {
    let sup = supports(p);
    let st = sup.get(target)?;
    if st.len() < 2 {
        return None;
    }
    let mut out = BTreeMap::new();
    for (w, sw) in &sup {
        let common = st.intersection(sw).count();
        if sw.len() < 2 || common < 2 {
            continue;
        }
        let lc = ln_int(common);
        let score = lc.clone() * lc / (ln_int(sw.len()) * ln_int(st.len()));
        out.insert(
            (*w).to_owned(),
            Overlap {
                l_candidate: sw.len(),
                l_common: common,
                score,
            },
        );
    }
    Some(out)
}

fn tie_key(v: f64) -> i64 {
    (v * 1e10).round() as i64
}

fn ordered(
    rows: &[(&String, &Overlap, f64)],
    target: &str,
    ids: &BTreeMap<String, u32>,
    k: usize,
) -> Vec<String> {
    let mut v: Vec<&(&String, &Overlap, f64)> = rows.iter().collect();
    v.sort_by(|a, b| {
        tie_key(b.2)
            .cmp(&tie_key(a.2))
            .then(b.1.l_common.cmp(&a.1.l_common))
            .then((b.0.as_str() == target).cmp(&(a.0.as_str() == target)))
            .then(ids[a.0.as_str()].cmp(&ids[b.0.as_str()]))
    });
    v.into_iter().take(k).map(|r| r.0.clone()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lists {
    pub strategy1: Vec<String>,
    pub strategy2: Vec<String>,
    pub closest: Vec<String>,
}

/// Strategy lists; `strategy2`/`closest` are `None` on a zero denominator.
pub fn strategies(
    scores: &BTreeMap<String, Overlap>,
    target: &str,
    ids: &BTreeMap<String, u32>,
    k: usize,
) -> (Vec<String>, Option<Lists>) {
    let by_l: Vec<(&String, &Overlap, f64)> = scores.iter().map(|(w, o)| (w, o, to_f64(&o.score))).collect();
    let s1 = ordered(&by_l, target, ids, k);
    let sum = scores.values().fold(big(0), |acc, o| acc + o.score.clone());
    let max = scores
        .values()
        .map(|o| o.score.clone())
        .fold(big(0), |m, v| if v > m { v } else { m });
    let denom = (sum * max).ln();
    if to_f64(&denom).abs() <= f64::EPSILON {
        return (s1, None);
    }
    let by_s: Vec<(&String, &Overlap, f64)> = scores
        .iter()
        .map(|(w, o)| (w, o, to_f64(&(o.score.ln() / denom.clone()))))
        .collect();
    let s2 = ordered(&by_s, target, ids, k);
    let closest = s1.iter().filter(|w| s2.contains(w)).cloned().collect();
    (
        s1.clone(),
        Some(Lists {
            strategy1: s1,
            strategy2: s2,
            closest,
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coordinates {
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub rho_prime: f64,
    pub theta_prime: f64,
    pub clamped: bool,
}

pub fn coordinates(x: &Big, y: &Big, euclidean: bool) -> Coordinates {
    let sq = x.clone() * x.clone() + y.clone() * y.clone();
    let rho = if euclidean { sq.sqrt() } else { sq };
    let one = big(1);
    let clamped = rho >= one;
    // the clamp is the binary value of the f64 constant, not the decimal one
    let r = if clamped { Big::try_from(1.0 - 1e-9).expect("finite") } else { rho.clone() };
    let rho_prime = ((one.clone() + r.clone()) / (one - r)).ln() / big(2);
    let ratio = to_f64(&(y.clone() / x.clone()));
    Coordinates {
        x: to_f64(x),
        y: to_f64(y),
        rho: to_f64(&rho),
        rho_prime: to_f64(&rho_prime),
        theta_prime: ratio.atan(),
        clamped,
    }
}

/// Two-letter lowercase token for index `i < 676`.
pub fn token_name(i: usize) -> String {
    let a = (b'a' + (i / 26) as u8) as char;
    let b = (b'a' + (i % 26) as u8) as char;
    format!("{a}{b}")
}

/// Random multi-document corpus with a Zipf-like token distribution.
pub fn random_corpus<R: Rng>(rng: &mut R, max_tokens: usize, max_vocab: usize) -> Vec<Vec<String>> {
    let vocab = rng.gen_range(2..=max_vocab);
    let weights: Vec<f64> = (0..vocab).map(|i| 1.0 / (i as f64 + 1.0).powf(rng.gen_range(0.5..1.5))).collect();
    let dist = WeightedIndex::new(&weights).expect("positive weights");
    let total = rng.gen_range(2..=max_tokens);
    let docs = rng.gen_range(1..=3usize);
    let mut out = vec![Vec::new(); docs];
    for _ in 0..total {
        let d = rng.gen_range(0..docs);
        out[d].push(token_name(dist.sample(rng)));
    }
    out.retain(|d| !d.is_empty());
    out
}
