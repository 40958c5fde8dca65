use std::collections::BTreeSet;

use hyperlex::baseline::{compare_reports, cosine, cosine_neighbors, GoldSet, VectorTable};
use hyperlex::boltzmann::softmax_row;
use hyperlex::corpus::model_file::{decode_model, encode_model};
use hyperlex::corpus::{split_epochs, CooccurrenceCounter};
use hyperlex::disk::{convergence, ConvergenceTrace, EpochPoint};
use hyperlex::metric::conditional_rank;
use hyperlex::neighbors::{closest, overlap_scores, strategy1, strategy2};
use hyperlex::{
    boltzmann_normalize, mean_profile, to_disk, to_polar, Analysis, CooccurrenceTable, Model, Normalization, RhoMode,
    TokenStream,
};
use proptest::prelude::*;

const POOL: [&str; 8] = ["ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen"];

fn corpus(max_len: usize) -> impl Strategy<Value = Vec<String>> {
    (2usize..=POOL.len()).prop_flat_map(move |v| {
        prop::collection::vec(0..v, 2..max_len).prop_map(|ix| ix.into_iter().map(|i| POOL[i].to_owned()).collect())
    })
}

fn documents() -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(corpus(40), 1..4)
}

fn stream(docs: &[Vec<String>]) -> TokenStream {
    let mut s = TokenStream::new();
    for d in docs {
        s.push_tokens(d);
    }
    s
}

fn analysis(tokens: &[String], window: usize, normalization: Normalization) -> Analysis {
    let (vocab, table) = hyperlex::count(tokens, window, 1).unwrap();
    Analysis::build(vocab, table, normalization).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn window_is_symmetric(tokens in corpus(60), window in 1usize..5) {
        let mut padded = vec!["pad".to_owned(); window];
        padded.extend(tokens.iter().cloned());
        padded.extend(std::iter::repeat("pad".to_owned()).take(window));
        let (vocab, table) = hyperlex::count(&padded, window, 1).unwrap();
        for (a, b, c) in table.iter() {
            prop_assert_eq!(table.count(b, a), c);
        }
        for e in vocab.entries() {
            let (_, row) = table.row(e.id);
            let row_mass: u64 = row.iter().sum();
            prop_assert_eq!(row_mass, table.context_total(e.id));
            if e.token != "pad" {
                prop_assert_eq!(row_mass, 2 * window as u64 * e.frequency);
            }
        }
    }

    #[test]
    fn cumulative_epochs_equal_fresh_prefix_counts(docs in documents(), epoch_size in 1usize..30, window in 1usize..4) {
        let s = stream(&docs);
        let plan = split_epochs(s.len(), epoch_size).unwrap();
        let mut counter = CooccurrenceCounter::new(&s, window).unwrap();
        for &end in &plan.boundaries {
            counter.advance_to(end);
            let mut left = end;
            let prefix: Vec<Vec<String>> = docs.iter().map(|d| {
                let take = left.min(d.len());
                left -= take;
                d[..take].to_vec()
            }).filter(|d| !d.is_empty()).collect();
            let fresh = stream(&prefix).count(window, 2).unwrap();
            prop_assert_eq!(counter.snapshot(2).unwrap(), fresh);
        }
    }

    #[test]
    fn min_count_filters_targets_and_contexts(tokens in corpus(80), min_count in 1u64..6) {
        let (vocab, table) = hyperlex::count(&tokens, 2, min_count).unwrap();
        for e in vocab.entries() {
            prop_assert!(e.frequency >= min_count);
            let f = tokens.iter().filter(|t| **t == e.token).count() as u64;
            prop_assert_eq!(f, e.frequency);
        }
        let kept: BTreeSet<&str> = vocab.entries().iter().map(|e| e.token.as_str()).collect();
        for t in &tokens {
            let f = tokens.iter().filter(|u| *u == t).count() as u64;
            prop_assert_eq!(kept.contains(t.as_str()), f >= min_count);
        }
        prop_assert!(table.iter().all(|(a, b, _)| (a as usize) < vocab.len() && (b as usize) < vocab.len()));
    }

    #[test]
    fn ranks_ignore_count_scale(tokens in corpus(60), k in 2u64..50) {
        let (_, table) = hyperlex::count(&tokens, 3, 1).unwrap();
        let scaled = CooccurrenceTable::from_sorted_triples(
            table.window(),
            table.n_words(),
            table.iter().map(|(a, b, c)| (a, b, c * k)),
        ).unwrap();
        prop_assert_eq!(conditional_rank(&table), conditional_rank(&scaled));
    }

    #[test]
    fn weights_are_positive_and_domain_matches(tokens in corpus(60), raw in any::<bool>()) {
        let norm = if raw { Normalization::Raw } else { Normalization::Relative };
        let a = analysis(&tokens, 3, norm);
        let pairs: Vec<(u32, u32)> = a.table.iter().map(|(x, y, _)| (x, y)).collect();
        let h: Vec<(u32, u32)> = a.entropy.rows().iter().map(|(x, y, _)| (x, y)).collect();
        let p: Vec<(u32, u32)> = a.boltzmann.rows().iter().map(|(x, y, _)| (x, y)).collect();
        prop_assert_eq!(&pairs, &h);
        prop_assert_eq!(&pairs, &p);
        for t in 0..a.vocab.len() as u32 {
            let (contexts, _) = a.table.row(t);
            if contexts.is_empty() {
                continue;
            }
            prop_assert!(contexts.iter().any(|&c| a.weights.rank(t, c) == Some(0)));
            for &c in contexts {
                prop_assert!(a.weights.weight(t, c).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn rows_are_stochastic(tokens in corpus(120), window in 1usize..5, raw in any::<bool>()) {
        let norm = if raw { Normalization::Raw } else { Normalization::Relative };
        let a = analysis(&tokens, window, norm);
        for t in 0..a.vocab.len() as u32 {
            let (_, row) = a.boltzmann.row(t);
            if row.is_empty() {
                continue;
            }
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9, "row {t} sums to {sum}");
            if let Ok(mp) = mean_profile(&a.boltzmann, t) {
                prop_assert!(mp.x > 0.0 && mp.x <= 1.0);
                prop_assert!(mp.y > 0.0 && mp.y <= 1.0);
            }
        }
    }

    #[test]
    fn softmax_is_shift_invariant(row in prop::collection::vec(-50.0f64..50.0, 1..20), c in -1e3f64..1e3) {
        let (p, _) = softmax_row(&row);
        let shifted: Vec<f64> = row.iter().map(|h| h + c).collect();
        let (q, _) = softmax_row(&shifted);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn overlap_and_lists_are_consistent(tokens in corpus(120), k in 1usize..8) {
        let a = analysis(&tokens, 2, Normalization::Relative);
        for t in 0..a.vocab.len() as u32 {
            let Ok(scores) = overlap_scores(&a.boltzmann, t) else { continue };
            for row in &scores.rows {
                prop_assert!(row.score > 0.0);
                if row.candidate == t {
                    prop_assert!((row.score - 1.0).abs() <= 1e-15);
                }
                let back = overlap_scores(&a.boltzmann, row.candidate).unwrap();
                let mirror = back.rows.iter().find(|r| r.candidate == t).unwrap();
                prop_assert_eq!(mirror.l_common, row.l_common);
            }
            let s1 = strategy1(&scores, k).unwrap();
            let Ok(s2) = strategy2(&scores, k) else { continue };
            let both = closest(&s1, &s2.candidates);
            let pos: Vec<usize> = both.iter().map(|c| s1.iter().position(|d| d.word == c.word).unwrap()).collect();
            prop_assert!(pos.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(both.iter().all(|c| s2.candidates.iter().any(|d| d.word == c.word)));
        }
    }

    #[test]
    fn disk_transform_is_monotone(r1 in 0.0f64..(1.0 - 1e-6), r2 in 0.0f64..(1.0 - 1e-6)) {
        let (a, b) = (to_disk(r1, 0.0).unwrap(), to_disk(r2, 0.0).unwrap());
        if r1 < r2 {
            prop_assert!(a.rho_prime < b.rho_prime);
        }
        prop_assert!((a.rho_prime.tanh() - r1).abs() <= 1e-12);
    }

    #[test]
    fn angle_ignores_common_scale(x in 1e-6f64..1.0, y in 0.0f64..1.0, s in 1e-3f64..1e3) {
        let a = to_polar(x, y, RhoMode::Squared).unwrap().theta;
        let b = to_polar(x * s, y * s, RhoMode::Squared).unwrap().theta;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn tighter_epsilon_never_converges_earlier(
        values in prop::collection::vec((0.0f64..1.0, 0.0f64..1.5), 2..12),
        e1 in 1e-4f64..0.5,
        e2 in 1e-4f64..0.5,
    ) {
        let (tight, loose) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let mut acc = 0.0;
        let trace = ConvergenceTrace {
            word: "w".into(),
            points: values.iter().enumerate().map(|(epoch, &(r, t))| {
                acc += r * 0.1;
                EpochPoint { epoch, rho_prime: acc, theta_prime: t }
            }).collect(),
        };
        let t = &convergence(std::slice::from_ref(&trace), tight, tight).unwrap()[0];
        let l = &convergence(std::slice::from_ref(&trace), loose, loose).unwrap()[0];
        for (tight, loose) in [(t.rho_prime, l.rho_prime), (t.theta_prime, l.theta_prime)] {
            match (tight.epoch(), loose.epoch()) {
                (Some(a), Some(b)) => prop_assert!(a >= b),
                (Some(_), None) => prop_assert!(false, "tight converged but loose did not"),
                _ => {}
            }
        }
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(
        u in prop::collection::vec(-10.0f64..10.0, 5),
        v in prop::collection::vec(-10.0f64..10.0, 5),
    ) {
        prop_assume!(u.iter().any(|x| *x != 0.0) && v.iter().any(|x| *x != 0.0));
        let c = cosine(&u, &v);
        prop_assert_eq!(c, cosine(&v, &u));
        prop_assert!((-1.0..=1.0).contains(&c));
        prop_assert!((cosine(&u, &u) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cosine_ranking_ignores_vector_scale(
        rows in prop::collection::vec(prop::collection::vec(1i32..20, 4), 3..10),
        scales in prop::collection::vec(1u32..8, 10),
    ) {
        let text = |scaled: bool| rows.iter().enumerate().map(|(i, r)| {
            let s = if scaled { scales[i] as f64 } else { 1.0 };
            let vals: Vec<String> = r.iter().map(|v| format!("{}", *v as f64 * s)).collect();
            format!("w{i} {}", vals.join(" "))
        }).collect::<Vec<_>>().join("\n");
        let plain = VectorTable::parse(&text(false)).unwrap();
        let scaled = VectorTable::parse(&text(true)).unwrap();
        let words = |t: &VectorTable| -> Vec<String> {
            cosine_neighbors(t, "w0", rows.len()).unwrap().into_iter().map(|(w, _)| w).collect()
        };
        let (a, b) = (cosine_neighbors(&plain, "w0", rows.len()).unwrap(), cosine_neighbors(&scaled, "w0", rows.len()).unwrap());
        // orders agree wherever scores are distinguishable
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.1 - y.1).abs() <= 1e-12);
        }
        let distinct = a.windows(2).all(|w| (w[0].1 - w[1].1).abs() > 1e-9);
        if distinct {
            prop_assert_eq!(words(&plain), words(&scaled));
        }
    }

    #[test]
    fn gold_hits_ignore_order(mut e in prop::collection::vec(0usize..12, 0..10), mut b in prop::collection::vec(0usize..12, 0..10)) {
        let words = ["red", "sky", "blue", "tree", "pink", "gray", "road", "cat", "green", "sun", "black", "rain"];
        let gold = GoldSet::colors();
        let names = |v: &[usize]| v.iter().map(|&i| words[i]).collect::<Vec<_>>();
        let before = compare_reports(&names(&e), &names(&b), &gold);
        e.reverse();
        b.sort();
        let after = compare_reports(&names(&e), &names(&b), &gold);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn model_reencode_is_byte_identical(tokens in corpus(80), window in 1usize..4) {
        let (vocab, table) = hyperlex::count(&tokens, window, 1).unwrap();
        let bytes = encode_model(&Model::new(vocab.clone(), table.clone()));
        let again = hyperlex::count(&tokens, window, 1).unwrap();
        prop_assert_eq!(&bytes, &encode_model(&Model::new(again.0, again.1)));
        let decoded = decode_model(&bytes).unwrap();
        prop_assert_eq!(&decoded.vocab, &vocab);
        prop_assert_eq!(&decoded.table, &table);
        prop_assert_eq!(encode_model(&decoded), bytes);
    }
}

#[test]
fn uniform_row_gives_reciprocal_x() {
    // every target of a de Bruijn-like cycle sees the same contexts equally often
    let tokens: Vec<String> = "a b c a b c a b c a b c".split(' ').map(String::from).collect();
    let (vocab, table) = hyperlex::count(&tokens, 1, 1).unwrap();
    let uniform = hyperlex::metric::EntropyTable::from_rows(
        table.rows().with_values(vec![0.5; table.nnz()]),
        Normalization::Relative,
    );
    let m = boltzmann_normalize(&uniform);
    for e in vocab.entries() {
        let k = table.context_type_count(e.id) as f64;
        assert_eq!(mean_profile(&m, e.id).unwrap().x, 1.0 / k);
    }
}
