//! Tokenization, unigram counting and the plain-text stats file format.
//!
//! A stats file lets a representative corpus be shared as counts only. The
//! first line is `#total<TAB>N`, then one `word<TAB>count` row per type,
//! sorted by descending count, then byte-wise by word.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

/// Header prefix that marks a stats file.
pub const STATS_HEADER: &str = "#total";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    Encoding { path: String, offset: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("undefined distribution: corpus has no tokens")]
    EmptyCorpus,
    #[error("stats line {line}: {reason}")]
    StatsFormat { line: usize, reason: String },
    #[error("word {0:?} cannot be stored in a stats file")]
    UnstorableWord(String),
}

impl CorpusError {
    fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Splits a line on runs of Unicode whitespace. No case folding or other normalization.
pub fn tokenize(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

/// Splits raw bytes into lines and validates each as UTF-8.
///
/// `origin` is only used in error messages. Line terminators are `\n`; a final
/// line without a terminator is kept, an empty trailing piece is not.
pub fn decode_lines(bytes: &[u8], origin: &str) -> Result<Vec<String>, CorpusError> {
    let mut lines = Vec::new();
    let mut start = 0;
    while start < bytes.len() {
        let end = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |p| start + p);
        let line = std::str::from_utf8(&bytes[start..end]).map_err(|e| CorpusError::Encoding {
            path: origin.to_string(),
            offset: start + e.valid_up_to(),
        })?;
        lines.push(line.to_string());
        start = end + 1;
    }
    Ok(lines)
}

/// Reads a text file as a list of lines. Line `i` of the result is line `i` of the file.
pub fn read_lines(path: &Path) -> Result<Vec<String>, CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    decode_lines(&bytes, &path.display().to_string())
}

/// Word-type counts for one corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    counts: HashMap<String, u64>,
    total_tokens: u64,
}

impl CorpusStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds stats from `(word, count)` pairs. Zero counts are dropped and
    /// repeated words are summed.
    pub fn from_counts<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut stats = Self::new();
        for (word, count) in pairs {
            stats.add(word.into(), count);
        }
        stats
    }

    pub fn add(&mut self, word: String, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(word).or_insert(0) += count;
        self.total_tokens += count;
    }

    pub fn add_tokens<'a, I: IntoIterator<Item = &'a str>>(&mut self, tokens: I) {
        for tok in tokens {
            match self.counts.get_mut(tok) {
                Some(c) => *c += 1,
                None => {
                    self.counts.insert(tok.to_string(), 1);
                }
            }
            self.total_tokens += 1;
        }
    }

    /// Folds another set of counts into this one.
    pub fn merge(&mut self, other: CorpusStats) {
        for (word, count) in other.counts {
            match self.counts.entry(word) {
                Entry::Occupied(mut e) => *e.get_mut() += count,
                Entry::Vacant(e) => {
                    e.insert(count);
                }
            }
        }
        self.total_tokens += other.total_tokens;
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn total_types(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total_tokens == 0
    }

    /// Iterates `(word, count)` in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    /// Entries in stats-file order: descending count, then byte-wise word order.
    pub fn sorted_entries(&self) -> Vec<(&str, u64)> {
        let mut entries: Vec<_> = self.iter().collect();
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.as_bytes().cmp(b.0.as_bytes())));
        entries
    }

    /// Empirical unigram probability `C(v) / W`; zero for absent words.
    pub fn unigram_prob(&self, word: &str) -> Result<f64, CorpusError> {
        if self.total_tokens == 0 {
            return Err(CorpusError::EmptyCorpus);
        }
        Ok(self.count(word) as f64 / self.total_tokens as f64)
    }

    /// Rewrites every word through `f`, summing counts of words that collide.
    pub fn map_words<F: FnMut(&str) -> String>(&self, mut f: F) -> CorpusStats {
        let mut out = CorpusStats::new();
        for (w, c) in self.sorted_entries() {
            out.add(f(w), c);
        }
        out
    }

    pub fn save<W: Write>(&self, mut out: W) -> Result<(), CorpusError> {
        let io_err = |e| CorpusError::Io {
            path: "<stats>".into(),
            source: e,
        };
        writeln!(out, "{STATS_HEADER}\t{}", self.total_tokens).map_err(io_err)?;
        for (word, count) in self.sorted_entries() {
            if word.is_empty() || word.contains(['\t', '\n', '\r']) {
                return Err(CorpusError::UnstorableWord(word.to_string()));
            }
            writeln!(out, "{word}\t{count}").map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }

    pub fn save_to_path(&self, path: &Path) -> Result<(), CorpusError> {
        let mut buf = Vec::new();
        self.save(&mut buf)?;
        fs::write(path, buf).map_err(|e| CorpusError::io(path, e))
    }

    /// Parses a stats file. Line numbers in errors are 1-based.
    pub fn load<R: BufRead>(input: R) -> Result<CorpusStats, CorpusError> {
        let fmt = |line: usize, reason: &str| CorpusError::StatsFormat {
            line,
            reason: reason.to_string(),
        };
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| CorpusError::Io {
                path: "<stats>".into(),
                source: e,
            })?,
            None => return Err(fmt(1, "missing #total header")),
        };
        let declared = header
            .strip_prefix(STATS_HEADER)
            .and_then(|rest| rest.strip_prefix('\t'))
            .ok_or_else(|| fmt(1, "expected `#total<TAB><count>`"))?;
        let declared: u64 = declared
            .parse()
            .map_err(|_| fmt(1, "total is not a base-10 integer"))?;

        let mut stats = CorpusStats::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| CorpusError::Io {
                path: "<stats>".into(),
                source: e,
            })?;
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| fmt(lineno, "expected `<word><TAB><count>`"))?;
            if word.is_empty() {
                return Err(fmt(lineno, "empty word"));
            }
            let count: u64 = match count.parse() {
                Ok(c) if c > 0 && count.bytes().all(|b| b.is_ascii_digit()) => c,
                _ => return Err(fmt(lineno, "count must be a positive base-10 integer")),
            };
            if stats.contains(word) {
                return Err(fmt(lineno, &format!("duplicate word {word:?}")));
            }
            stats.add(word.to_string(), count);
        }
        if stats.total_tokens != declared {
            return Err(fmt(
                1,
                &format!(
                    "header total {declared} does not match sum of counts {}",
                    stats.total_tokens
                ),
            ));
        }
        Ok(stats)
    }

    pub fn load_from_path(path: &Path) -> Result<CorpusStats, CorpusError> {
        let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
        Self::load(BufReader::new(file)).map_err(|e| match e {
            CorpusError::StatsFormat { line, reason } => CorpusError::StatsFormat {
                line,
                reason: format!("{}: {reason}", path.display()),
            },
            other => other,
        })
    }
}

/// True when the first line of `bytes` is a stats header.
pub fn looks_like_stats(bytes: &[u8]) -> bool {
    bytes.starts_with(format!("{STATS_HEADER}\t").as_bytes())
}

/// Counts every token of every line. Blank lines contribute nothing.
pub fn count_corpus<I, S>(lines: I) -> CorpusStats
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut stats = CorpusStats::new();
    for line in lines {
        stats.add_tokens(tokenize(line.as_ref()));
    }
    stats
}

/// Sharded version of [`count_corpus`]; the result does not depend on shard boundaries.
pub fn count_corpus_par<S: AsRef<str> + Sync>(lines: &[S]) -> CorpusStats {
    lines
        .par_chunks(4096)
        .map(count_corpus)
        .reduce(CorpusStats::new, |mut a, b| {
            a.merge(b);
            a
        })
}
