//! Raw corpora in, ready-to-run [`Engine`] out.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use log::warn;

use crate::corpus::{count_corpus, decode_lines, looks_like_stats, tokenize, CorpusError, CorpusStats};
use crate::score::DEFAULT_DELTA;
use crate::select::Engine;
use crate::squash::{escape_reserved, is_reserved, partition_vocab_with, SquashConfig, VocabPartition};
use crate::Error;

/// A corpus given either as text or as a stats file.
#[derive(Debug, Clone)]
pub enum CorpusSource {
    Lines(Vec<String>),
    Stats(CorpusStats),
}

impl CorpusSource {
    /// Reads `path`, treating it as a stats file when it starts with the `#total` header.
    pub fn from_path(path: &Path) -> Result<Self, CorpusError> {
        let bytes = fs::read(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if looks_like_stats(&bytes) {
            CorpusStats::load(bytes.as_slice())
                .map(CorpusSource::Stats)
                .map_err(|e| match e {
                    CorpusError::StatsFormat { line, reason } => CorpusError::StatsFormat {
                        line,
                        reason: format!("{}: {reason}", path.display()),
                    },
                    other => other,
                })
        } else {
            decode_lines(&bytes, &path.display().to_string()).map(CorpusSource::Lines)
        }
    }

    /// Counts with reserved tokens escaped.
    pub fn escaped_stats(&self) -> (CorpusStats, usize) {
        match self {
            CorpusSource::Lines(lines) => {
                let (tokens, escaped) = tokenize_lines(lines);
                let mut stats = CorpusStats::new();
                for line in &tokens {
                    stats.add_tokens(line.iter().map(String::as_str));
                }
                (stats, escaped)
            }
            CorpusSource::Stats(stats) => {
                let escaped = stats.words().filter(|w| is_reserved(w)).count();
                (stats.map_words(|w| escape_reserved(w).into_owned()), escaped)
            }
        }
    }
}

/// Tokenizes every line, escaping reserved tokens. Returns the number of
/// tokens that were rewritten.
pub fn tokenize_lines<S: AsRef<str>>(lines: &[S]) -> (Vec<Vec<String>>, usize) {
    let mut escaped = 0;
    let tokens = lines
        .iter()
        .map(|line| {
            tokenize(line.as_ref())
                .into_iter()
                .map(|t| {
                    let e = escape_reserved(t);
                    if e.len() != t.len() {
                        escaped += 1;
                    }
                    e.into_owned()
                })
                .collect()
        })
        .collect();
    (tokens, escaped)
}

#[derive(Debug, Clone)]
pub struct SelectionInputs {
    pub repr: CorpusSource,
    /// Defaults to the available pool.
    pub unadapt: Option<CorpusSource>,
    pub seed: Vec<String>,
    pub avail: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SelectionConfig {
    pub squash: SquashConfig,
    pub delta: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            squash: SquashConfig::default(),
            delta: DEFAULT_DELTA,
        }
    }
}

pub struct Prepared {
    pub engine: Engine,
    pub partition: VocabPartition,
    /// Representative counts after escaping.
    pub repr: CorpusStats,
    /// Natural tokens rewritten with the `raw:` prefix, over all inputs.
    pub escaped: usize,
}

pub fn prepare(inputs: &SelectionInputs, cfg: &SelectionConfig) -> Result<Prepared, Error> {
    let (avail, esc_avail) = tokenize_lines(&inputs.avail);
    let (seed, esc_seed) = tokenize_lines(&inputs.seed);
    let (repr, esc_repr) = inputs.repr.escaped_stats();
    let (unadapt, esc_unadapt) = match &inputs.unadapt {
        Some(src) => src.escaped_stats(),
        None => {
            let stats = count_corpus(avail.iter().map(|l| l.join(" ")));
            (stats, 0)
        }
    };
    let escaped = esc_avail + esc_seed + esc_repr + esc_unadapt;
    if escaped > 0 {
        warn!("rewrote {escaped} reserved token(s) with the \"raw:\" prefix");
    }

    let avail_vocab: HashSet<String> = avail.iter().flatten().cloned().collect();
    let partition = partition_vocab_with(
        &repr,
        &unadapt,
        &avail_vocab,
        seed.iter().flatten().map(String::as_str),
        &cfg.squash,
    )?;
    let engine = Engine::build(&avail, &seed, &repr, &partition, cfg.delta)?;
    Ok(Prepared {
        engine,
        partition,
        repr,
        escaped,
    })
}
