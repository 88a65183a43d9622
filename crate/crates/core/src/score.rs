//! Cross-entropy arithmetic for a growing selected corpus.
//!
//! The selected corpus is modelled with an add-δ unigram distribution over a
//! fixed scoring vocabulary `V`:
//!
//! ```text
//! Q_n(v) = (C_n(v) + δ) / (W_n + δ|V|)
//! H_n    = -Σ_{v ∈ REPR} P_repr(v) · log2 Q_n(v)
//! ```
//!
//! Adding a sentence `s` with `w` tokens changes `H` by exactly
//!
//! ```text
//! ΔH = log2((W_n + δ|V| + w) / (W_n + δ|V|))                   penalty, >= 0
//!    + Σ_{v ∈ s} P_repr(v) · log2((C_n(v) + δ) / (C_n(v) + δ + c_s(v)))   gain, <= 0
//! ```
//!
//! so `H` can be tracked incrementally. All values are in bits.

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::CorpusStats;
use crate::squash::{Category, VocabPartition};

pub const DEFAULT_DELTA: f64 = 0.001;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("smoothing constant must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("representative corpus is empty")]
    EmptyRepr,
    #[error("word {0:?} is not in the scoring vocabulary")]
    UnknownWord(String),
    #[error("stale score: computed against state version {scored}, state is at {current}")]
    StaleBreakdown { scored: u64, current: u64 },
}

/// Interned word id in a [`ScoringVocab`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

impl Sym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The closed vocabulary the selected-corpus model is defined over.
#[derive(Debug, Clone, Default)]
pub struct ScoringVocab {
    names: Vec<String>,
    index: HashMap<String, Sym>,
    kept_from: usize,
}

impl ScoringVocab {
    /// Squashed vocabulary: the five category tokens, then kept words in
    /// lexicographic order (so `Sym` order on kept words is word order).
    pub fn from_partition(partition: &VocabPartition) -> Self {
        let mut vocab = ScoringVocab::default();
        for cat in Category::SQUASHED {
            vocab.push(cat.token().expect("squashed category"));
        }
        vocab.kept_from = vocab.names.len();
        for word in partition.kept_set() {
            vocab.push(word);
        }
        vocab
    }

    /// Plain vocabulary over the given words, sorted and deduplicated.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut all: Vec<String> = words.into_iter().map(|w| w.as_ref().to_string()).collect();
        all.sort_unstable();
        all.dedup();
        let mut vocab = ScoringVocab::default();
        for w in &all {
            vocab.push(w);
        }
        vocab
    }

    fn push(&mut self, word: &str) {
        let sym = Sym(self.names.len() as u32);
        self.names.push(word.to_string());
        self.index.insert(word.to_string(), sym);
    }

    pub fn sym(&self, word: &str) -> Option<Sym> {
        self.index.get(word).copied()
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.names[sym.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// True for words that kept their identity through squashing.
    pub fn is_kept(&self, sym: Sym) -> bool {
        sym.index() >= self.kept_from
    }

    pub fn kept_syms(&self) -> impl Iterator<Item = Sym> {
        (self.kept_from..self.names.len()).map(|i| Sym(i as u32))
    }

    pub fn intern_all<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<Sym>, ScoreError> {
        tokens
            .iter()
            .map(|t| {
                self.sym(t.as_ref())
                    .ok_or_else(|| ScoreError::UnknownWord(t.as_ref().to_string()))
            })
            .collect()
    }
}

/// Representative unigram distribution, dense over a [`ScoringVocab`].
#[derive(Debug, Clone)]
pub struct ReprDist {
    probs: Vec<f64>,
    support: Vec<Sym>,
}

impl ReprDist {
    /// `stats` must already be expressed in the vocabulary's words (i.e. squashed).
    pub fn from_stats(stats: &CorpusStats, vocab: &ScoringVocab) -> Result<Self, ScoreError> {
        if stats.is_empty() {
            return Err(ScoreError::EmptyRepr);
        }
        let total = stats.total_tokens() as f64;
        let mut probs = vec![0.0; vocab.len()];
        for (word, count) in stats.iter() {
            let sym = vocab
                .sym(word)
                .ok_or_else(|| ScoreError::UnknownWord(word.to_string()))?;
            probs[sym.index()] = count as f64 / total;
        }
        let support = (0..probs.len())
            .filter(|&i| probs[i] > 0.0)
            .map(|i| Sym(i as u32))
            .collect();
        Ok(ReprDist { probs, support })
    }

    pub fn prob(&self, sym: Sym) -> f64 {
        self.probs[sym.index()]
    }

    /// Words with nonzero probability, ascending by `Sym`.
    pub fn support(&self) -> &[Sym] {
        &self.support
    }
}

/// Multiset of word ids in one sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenBag {
    entries: Vec<(Sym, u32)>,
    len: u64,
}

impl TokenBag {
    pub fn from_syms(syms: &[Sym]) -> Self {
        let mut sorted = syms.to_vec();
        sorted.sort_unstable();
        let mut entries: Vec<(Sym, u32)> = Vec::new();
        for s in sorted {
            match entries.last_mut() {
                Some((last, c)) if *last == s => *c += 1,
                _ => entries.push((s, 1)),
            }
        }
        TokenBag {
            entries,
            len: syms.len() as u64,
        }
    }

    /// Distinct `(word, count)` pairs, ascending by word id.
    pub fn entries(&self) -> &[(Sym, u32)] {
        &self.entries
    }

    pub fn token_count(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// `log2((W_n + m + w) / (W_n + m))` where `m = δ|V|` is the smoothing mass.
/// Requires `W_n + m > 0`.
pub fn penalty(w_n: u64, w: u64, smoothing_mass: f64) -> f64 {
    if w == 0 {
        return 0.0;
    }
    let base = w_n as f64 + smoothing_mass;
    ((base + w as f64) / base).log2()
}

/// `p · log2((C_n + δ) / (C_n + δ + c))`; exactly zero when `c == 0` or `p == 0`.
pub fn word_gain(p_repr: f64, c_n: u64, c: u64, delta: f64) -> f64 {
    if c == 0 || p_repr == 0.0 {
        return 0.0;
    }
    let base = c_n as f64 + delta;
    p_repr * (base / (base + c as f64)).log2()
}

/// Word gain assuming the word occurs once in the candidate. Never more
/// negative than the true gain for any `c >= 1`.
pub fn word_gain_estimate(p_repr: f64, c_n: u64, delta: f64) -> f64 {
    word_gain(p_repr, c_n, 1, delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBreakdown {
    pub penalty: f64,
    pub gain: f64,
    pub delta_h: f64,
    version: u64,
}

impl ScoreBreakdown {
    /// State version this score was computed against.
    pub fn version(&self) -> u64 {
        self.version
    }
}

/// Counts of the selected corpus (seed included) and its running cross-entropy.
#[derive(Debug, Clone)]
pub struct ModelState {
    counts: Vec<u64>,
    total: u64,
    delta: f64,
    h_current: f64,
    version: u64,
}

impl ModelState {
    /// Empty selected corpus over `vocab_size` types.
    pub fn new(vocab_size: usize, delta: f64, repr: &ReprDist) -> Result<Self, ScoreError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(ScoreError::InvalidDelta(delta));
        }
        let mut state = ModelState {
            counts: vec![0; vocab_size],
            total: 0,
            delta,
            h_current: 0.0,
            version: 0,
        };
        state.h_current = state.cross_entropy(repr);
        Ok(state)
    }

    /// Adds already-committed text (the seed) and recomputes `H` directly.
    pub fn prime(&mut self, bag: &TokenBag, repr: &ReprDist) {
        self.add_counts(bag);
        self.h_current = self.cross_entropy(repr);
        self.version += 1;
    }

    fn add_counts(&mut self, bag: &TokenBag) {
        for &(sym, c) in bag.entries() {
            self.counts[sym.index()] += c as u64;
        }
        self.total += bag.token_count();
    }

    pub fn count(&self, sym: Sym) -> u64 {
        self.counts[sym.index()]
    }

    pub fn total_tokens(&self) -> u64 {
        self.total
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    /// `δ|V|`
    pub fn smoothing_mass(&self) -> f64 {
        self.delta * self.counts.len() as f64
    }

    pub fn h_current(&self) -> f64 {
        self.h_current
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Smoothed model probability of `sym`.
    pub fn prob(&self, sym: Sym) -> f64 {
        (self.count(sym) as f64 + self.delta) / (self.total as f64 + self.smoothing_mass())
    }

    pub fn penalty(&self, w: u64) -> f64 {
        penalty(self.total, w, self.smoothing_mass())
    }

    pub fn word_gain_estimate(&self, sym: Sym, repr: &ReprDist) -> f64 {
        word_gain_estimate(repr.prob(sym), self.count(sym), self.delta)
    }

    /// Sum of per-type gains over the distinct words of `bag`.
    pub fn sentence_gain(&self, bag: &TokenBag, repr: &ReprDist) -> f64 {
        bag.entries()
            .iter()
            .map(|&(sym, c)| word_gain(repr.prob(sym), self.count(sym), c as u64, self.delta))
            .sum()
    }

    pub fn delta_h(&self, bag: &TokenBag, repr: &ReprDist) -> ScoreBreakdown {
        self.breakdown(self.penalty(bag.token_count()), self.sentence_gain(bag, repr))
    }

    /// Assembles a breakdown from a penalty and a gain computed against this state.
    pub(crate) fn breakdown(&self, penalty: f64, gain: f64) -> ScoreBreakdown {
        ScoreBreakdown {
            penalty,
            gain,
            delta_h: penalty + gain,
            version: self.version,
        }
    }

    /// Direct evaluation of `H` for the current counts.
    pub fn cross_entropy(&self, repr: &ReprDist) -> f64 {
        let log_denominator = (self.total as f64 + self.smoothing_mass()).log2();
        repr.support()
            .iter()
            .map(|&sym| {
                repr.prob(sym) * (log_denominator - (self.count(sym) as f64 + self.delta).log2())
            })
            .sum()
    }

    /// Adds `bag` to the selected corpus and advances `H` by `breakdown.delta_h`.
    pub fn update(&mut self, bag: &TokenBag, breakdown: &ScoreBreakdown) -> Result<(), ScoreError> {
        if breakdown.version != self.version {
            return Err(ScoreError::StaleBreakdown {
                scored: breakdown.version,
                current: self.version,
            });
        }
        if bag.is_empty() {
            return Ok(());
        }
        self.add_counts(bag);
        self.h_current += breakdown.delta_h;
        self.version += 1;
        Ok(())
    }
}

/// Base used when reporting entropy values. Scoring always happens in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    E,
    Ten,
}

impl LogBase {
    /// Converts a value in bits to this base.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            LogBase::Two => bits,
            LogBase::E => bits * std::f64::consts::LN_2,
            LogBase::Ten => bits * std::f64::consts::LOG10_2,
        }
    }
}
