#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use cynical::pipeline::{prepare, CorpusSource, Prepared, SelectionConfig, SelectionInputs};
use cynical::squash::VocabPartition;

/// Two synthetic domains over a shared Zipfian vocabulary. In-domain lines mix
/// shared words with `in*` words; out-of-domain lines mostly use `out*` words.
pub struct TwoDomain {
    rng: ChaCha8Rng,
    shared: Zipf<f64>,
    inside: Zipf<f64>,
    outside: Zipf<f64>,
}

impl TwoDomain {
    pub fn new(seed: u64) -> Self {
        TwoDomain::with_sizes(seed, 2_000, 3_000, 20_000)
    }

    pub fn with_sizes(seed: u64, shared: usize, inside: usize, outside: usize) -> Self {
        TwoDomain {
            rng: ChaCha8Rng::seed_from_u64(seed),
            shared: Zipf::new(shared as f64, 1.05).unwrap(),
            inside: Zipf::new(inside as f64, 1.1).unwrap(),
            outside: Zipf::new(outside as f64, 1.0).unwrap(),
        }
    }

    fn line(&mut self, in_domain: bool) -> String {
        let len = self.rng.random_range(3..=14);
        let own = if in_domain { 0.5 } else { 0.8 };
        (0..len)
            .map(|_| {
                let r: f64 = self.rng.random();
                if r < own {
                    if in_domain {
                        format!("in{}", self.inside.sample(&mut self.rng) as u64)
                    } else {
                        format!("out{}", self.outside.sample(&mut self.rng) as u64)
                    }
                } else {
                    format!("s{}", self.shared.sample(&mut self.rng) as u64)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn in_domain(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.line(true)).collect()
    }

    pub fn out_domain(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.line(false)).collect()
    }

    /// `n_in` in-domain and `n_out` out-of-domain lines, shuffled.
    pub fn mixture(&mut self, n_in: usize, n_out: usize) -> Vec<String> {
        let mut lines = self.in_domain(n_in);
        lines.extend(self.out_domain(n_out));
        for i in (1..lines.len()).rev() {
            let j = self.rng.random_range(0..=i);
            lines.swap(i, j);
        }
        lines
    }
}

/// A standard acceptance scenario: REPR is fresh in-domain text, AVAIL a mixture.
pub struct Scenario {
    pub repr: Vec<String>,
    pub seed: Vec<String>,
    pub avail: Vec<String>,
}

impl Scenario {
    pub fn mixture(seed: u64, repr_lines: usize, n_in: usize, n_out: usize) -> Scenario {
        let mut gen = TwoDomain::new(seed);
        let repr = gen.in_domain(repr_lines);
        let avail = gen.mixture(n_in, n_out);
        Scenario {
            repr,
            seed: Vec::new(),
            avail,
        }
    }

    pub fn inputs(&self) -> SelectionInputs {
        SelectionInputs {
            repr: CorpusSource::Lines(self.repr.clone()),
            unadapt: None,
            seed: self.seed.clone(),
            avail: self.avail.clone(),
        }
    }

    pub fn prepare(&self, cfg: &SelectionConfig) -> Prepared {
        prepare(&self.inputs(), cfg).expect("scenario prepares")
    }
}

/// Direct cross-entropy of `repr` (already squashed counts) under an add-δ
/// model of `selected` (squashed counts), with `vocab_size` types.
pub fn direct_cross_entropy(
    repr: &HashMap<String, u64>,
    selected: &HashMap<String, u64>,
    vocab_size: usize,
    delta: f64,
) -> f64 {
    let w_repr: u64 = repr.values().sum();
    let w_sel: u64 = selected.values().sum();
    let denom = w_sel as f64 + delta * vocab_size as f64;
    -repr
        .iter()
        .map(|(word, &c)| {
            let p = c as f64 / w_repr as f64;
            let q = (selected.get(word).copied().unwrap_or(0) as f64 + delta) / denom;
            p * q.log2()
        })
        .sum::<f64>()
}

/// Squashed token counts of whitespace-tokenized lines.
pub fn squashed_counts<'a, I, S>(partition: &VocabPartition, lines: I) -> HashMap<String, u64>
where
    I: IntoIterator<Item = &'a S>,
    S: AsRef<str> + 'a + ?Sized,
{
    let mut counts = HashMap::new();
    for line in lines {
        for tok in line.as_ref().split_whitespace() {
            let sq = partition.squash_token(tok).expect("token was partitioned");
            *counts.entry(sq.to_string()).or_insert(0) += 1;
        }
    }
    counts
}

/// Number of vocabulary types the model smooths over: reserved tokens plus kept words.
pub fn model_vocab_size(partition: &VocabPartition) -> usize {
    5 + partition.kept_set().len()
}
