//! Post-hoc evaluation of a selected subset and a unigram Moore-Lewis baseline.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::corpus::{count_corpus, tokenize, CorpusStats};
use crate::score::{ModelState, ReprDist, ScoreError, ScoringVocab, TokenBag};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub subset_lines: usize,
    pub subset_tokens: u64,
    pub h_bits: f64,
    pub perplexity: f64,
    pub oov_tokens: u64,
    pub oov_types: usize,
    pub oov_token_rate: f64,
}

impl EvalReport {
    const FIELDS: [&'static str; 7] = [
        "subset_lines",
        "subset_tokens",
        "h_bits",
        "perplexity",
        "oov_tokens",
        "oov_types",
        "oov_token_rate",
    ];

    fn values(&self) -> [String; 7] {
        [
            self.subset_lines.to_string(),
            self.subset_tokens.to_string(),
            format!("{:.6}", self.h_bits),
            format!("{:.6}", self.perplexity),
            self.oov_tokens.to_string(),
            self.oov_types.to_string(),
            format!("{:.6}", self.oov_token_rate),
        ]
    }

    /// `subset_lines=3 subset_tokens=7 h_bits=...`
    pub fn to_kv_line(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in Self::FIELDS.iter().zip(self.values()).enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }

    pub fn tsv_header() -> String {
        Self::FIELDS.join("\t")
    }

    pub fn to_tsv_row(&self) -> String {
        self.values().join("\t")
    }
}

/// Cross-entropy of `repr` under an add-δ unigram model of `subset`, plus OOV
/// counts. Both use the raw (unsquashed) vocabulary; the model's vocabulary is
/// the union of both corpora.
pub fn evaluate_subset<S: AsRef<str>>(subset: &[S], repr: &CorpusStats, delta: f64) -> Result<EvalReport, ScoreError> {
    if repr.is_empty() {
        return Err(ScoreError::EmptyRepr);
    }
    let subset_stats = count_corpus(subset);
    let subset_lines = subset.iter().filter(|l| !tokenize(l.as_ref()).is_empty()).count();

    let vocab = ScoringVocab::from_words(repr.words().chain(subset_stats.words()));
    let dist = ReprDist::from_stats(repr, &vocab)?;
    let mut state = ModelState::new(vocab.len(), delta, &dist)?;
    let mut syms = Vec::with_capacity(subset_stats.total_tokens() as usize);
    for (word, count) in subset_stats.iter() {
        let sym = vocab.sym(word).expect("subset word is in the union vocabulary");
        syms.extend(std::iter::repeat_n(sym, count as usize));
    }
    state.prime(&TokenBag::from_syms(&syms), &dist);
    let h_bits = state.cross_entropy(&dist);

    let (oov_types, oov_tokens) = repr
        .iter()
        .filter(|(w, _)| !subset_stats.contains(w))
        .fold((0usize, 0u64), |(t, n), (_, c)| (t + 1, n + c));

    Ok(EvalReport {
        subset_lines,
        subset_tokens: subset_stats.total_tokens(),
        h_bits,
        perplexity: h_bits.exp2(),
        oov_tokens,
        oov_types,
        oov_token_rate: oov_tokens as f64 / repr.total_tokens() as f64,
    })
}

/// Add-δ smoothing applied to relative frequencies, so the model depends on
/// the corpus only through its distribution.
struct SmoothedUnigram<'a> {
    stats: &'a CorpusStats,
    delta: f64,
    norm: f64,
}

impl<'a> SmoothedUnigram<'a> {
    fn new(stats: &'a CorpusStats, delta: f64, vocab_size: usize) -> Self {
        SmoothedUnigram {
            stats,
            delta,
            norm: 1.0 + delta * vocab_size as f64,
        }
    }

    fn log2_prob(&self, word: &str) -> f64 {
        let p = self.stats.count(word) as f64 / self.stats.total_tokens() as f64;
        ((p + self.delta) / self.norm).log2()
    }
}

/// Cross-entropy difference ranking: per sentence, the per-token cross-entropy
/// under the in-domain model minus that under the pool model. Lower is more
/// in-domain. Blank lines are skipped; ids are line numbers.
pub fn moore_lewis_rank<S: AsRef<str>>(
    avail: &[S],
    in_stats: &CorpusStats,
    pool_stats: &CorpusStats,
    delta: f64,
) -> Result<Vec<(usize, f64)>, ScoreError> {
    if in_stats.is_empty() || pool_stats.is_empty() {
        return Err(ScoreError::EmptyRepr);
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ScoreError::InvalidDelta(delta));
    }
    let mut vocab: HashSet<&str> = in_stats.words().chain(pool_stats.words()).collect();
    for line in avail {
        vocab.extend(tokenize(line.as_ref()));
    }
    let in_model = SmoothedUnigram::new(in_stats, delta, vocab.len());
    let pool_model = SmoothedUnigram::new(pool_stats, delta, vocab.len());

    let mut ranked: Vec<(usize, f64)> = avail
        .iter()
        .enumerate()
        .filter_map(|(id, line)| {
            let tokens = tokenize(line.as_ref());
            if tokens.is_empty() {
                return None;
            }
            let n = tokens.len() as f64;
            let h_in: f64 = -tokens.iter().map(|t| in_model.log2_prob(t)).sum::<f64>() / n;
            let h_pool: f64 = -tokens.iter().map(|t| pool_model.log2_prob(t)).sum::<f64>() / n;
            Some((id, h_in - h_pool))
        })
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}
