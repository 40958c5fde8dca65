//! Synthetic corpora for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_1e55;

/// Word `i` of a synthetic vocabulary, spelled with letters only so it
/// survives tokenization.
pub fn word(mut i: usize) -> String {
    let mut s = String::from("w");
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            break s;
        }
    }
}

/// `tokens` tokens drawn from a Zipf(1) law over `vocab` words, split into
/// documents of roughly 500 tokens.
pub fn zipf_corpus(tokens: usize, vocab: usize) -> Vec<Vec<String>> {
    let words: Vec<String> = (0..vocab).map(word).collect();
    let mut cdf = Vec::with_capacity(vocab);
    let mut acc = 0.0;
    for r in 1..=vocab {
        acc += 1.0 / r as f64;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut docs = Vec::new();
    let mut left = tokens;
    while left > 0 {
        let n = left.min(rng.gen_range(250..750));
        let doc = (0..n)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                words[cdf.partition_point(|&c| c < u).min(vocab - 1)].clone()
            })
            .collect();
        docs.push(doc);
        left -= n;
    }
    docs
}
