//! Vocabulary squashing.
//!
//! Every word type is assigned a [`Category`] from its counts in the
//! representative and unadapted corpora. Only [`Category::Kept`] words keep
//! their identity; all others collapse onto one reserved token per category.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::corpus::CorpusStats;

/// Prefix added to natural tokens that collide with a reserved token.
pub const ESCAPE_PREFIX: &str = "raw:";

#[derive(Debug, Error, PartialEq)]
pub enum SquashError {
    #[error("{0} corpus is empty")]
    EmptyCorpus(&'static str),
    #[error("word {0:?} is not covered by the vocabulary partition")]
    Uncovered(String),
    #[error("invalid squash config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Kept,
    Dubious,
    Bad,
    Meh,
    Impossible,
    Useless,
}

impl Category {
    pub const SQUASHED: [Category; 5] = [
        Category::Dubious,
        Category::Bad,
        Category::Meh,
        Category::Impossible,
        Category::Useless,
    ];

    /// Reserved replacement token, or `None` for kept words.
    pub fn token(self) -> Option<&'static str> {
        match self {
            Category::Kept => None,
            Category::Dubious => Some("dubious"),
            Category::Bad => Some("bad"),
            Category::Meh => Some("meh"),
            Category::Impossible => Some("impossible"),
            Category::Useless => Some("useless"),
        }
    }

    pub fn name(self) -> &'static str {
        self.token().unwrap_or("kept")
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn is_reserved(token: &str) -> bool {
    Category::SQUASHED.iter().any(|c| c.token() == Some(token))
}

/// Prefixes reserved tokens with [`ESCAPE_PREFIX`] so they cannot be mistaken
/// for squashed categories. Other tokens pass through untouched.
pub fn escape_reserved(token: &str) -> Cow<'_, str> {
    if is_reserved(token) {
        Cow::Owned(format!("{ESCAPE_PREFIX}{token}"))
    } else {
        Cow::Borrowed(token)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquashConfig {
    /// Counts below this in the representative corpus are unreliable.
    pub min_count_repr: u64,
    /// Counts below this in the unadapted corpus are unreliable.
    pub min_count_unadapt: u64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

impl Default for SquashConfig {
    fn default() -> Self {
        SquashConfig {
            min_count_repr: 3,
            min_count_unadapt: 3,
            ratio_lo: 0.5,
            ratio_hi: 2.0,
        }
    }
}

impl SquashConfig {
    pub fn new(min_count: u64, ratio_lo: f64, ratio_hi: f64) -> Result<Self, SquashError> {
        let cfg = SquashConfig {
            min_count_repr: min_count,
            min_count_unadapt: min_count,
            ratio_lo,
            ratio_hi,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SquashError> {
        if self.min_count_repr < 1 || self.min_count_unadapt < 1 {
            return Err(SquashError::Config("min_count must be at least 1".into()));
        }
        if !(self.ratio_lo > 0.0 && self.ratio_lo < 1.0 && self.ratio_hi > 1.0 && self.ratio_hi.is_finite()) {
            return Err(SquashError::Config(format!(
                "need 0 < ratio_lo < 1 < ratio_hi, got {} and {}",
                self.ratio_lo, self.ratio_hi
            )));
        }
        Ok(())
    }
}

/// Category assignment for every word of the corpora it was built from.
#[derive(Debug, Clone, Default)]
pub struct VocabPartition {
    category: HashMap<String, Category>,
    kept: BTreeSet<String>,
}

impl VocabPartition {
    pub fn category(&self, word: &str) -> Option<Category> {
        self.category.get(word).copied()
    }

    /// Kept words, in byte-wise lexicographic order.
    pub fn kept_set(&self) -> &BTreeSet<String> {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.category.len()
    }

    pub fn is_empty(&self) -> bool {
        self.category.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Category)> {
        self.category.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Number of words per category, indexed like `Category as usize`.
    pub fn category_sizes(&self) -> [usize; 6] {
        let mut sizes = [0; 6];
        for &c in self.category.values() {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn squash_token<'a>(&self, token: &'a str) -> Result<&'a str, SquashError> {
        match self.category.get(token) {
            Some(Category::Kept) => Ok(token),
            Some(c) => Ok(c.token().expect("squashed category has a token")),
            None => Err(SquashError::Uncovered(token.to_string())),
        }
    }

    /// Replaces every non-kept token by its category token. Length is preserved.
    pub fn apply_squash<'a, S: AsRef<str>>(&self, tokens: &'a [S]) -> Result<Vec<&'a str>, SquashError> {
        tokens.iter().map(|t| self.squash_token(t.as_ref())).collect()
    }

    /// Collapses counts by category. Total token mass is unchanged.
    pub fn squash_stats(&self, stats: &CorpusStats) -> Result<CorpusStats, SquashError> {
        let mut out = CorpusStats::new();
        for (word, count) in stats.sorted_entries() {
            out.add(self.squash_token(word)?.to_string(), count);
        }
        Ok(out)
    }
}

/// See [`partition_vocab_with`]; no extra vocabulary.
pub fn partition_vocab(
    repr: &CorpusStats,
    unadapt: &CorpusStats,
    avail_vocab: &HashSet<String>,
    cfg: &SquashConfig,
) -> Result<VocabPartition, SquashError> {
    partition_vocab_with(repr, unadapt, avail_vocab, std::iter::empty::<&str>(), cfg)
}

/// Classifies every word of REPR, UNADAPT, the available pool and `extra`
/// (typically the seed corpus). First matching rule wins:
///
/// 1. in REPR but not in the pool: impossible
/// 2. not in REPR: useless
/// 3. below both min counts: dubious
/// 4. `P_repr / P_unadapt <= ratio_lo`: bad
/// 5. below `ratio_hi`: meh
/// 6. otherwise kept (including words absent from UNADAPT)
pub fn partition_vocab_with<'e, E>(
    repr: &CorpusStats,
    unadapt: &CorpusStats,
    avail_vocab: &HashSet<String>,
    extra: E,
    cfg: &SquashConfig,
) -> Result<VocabPartition, SquashError>
where
    E: IntoIterator<Item = &'e str>,
{
    cfg.validate()?;
    if repr.is_empty() {
        return Err(SquashError::EmptyCorpus("representative"));
    }
    if unadapt.is_empty() {
        return Err(SquashError::EmptyCorpus("unadapted"));
    }
    let w_repr = repr.total_tokens() as f64;
    let w_unadapt = unadapt.total_tokens() as f64;

    let classify = |word: &str| -> Category {
        let c_repr = repr.count(word);
        if c_repr > 0 && !avail_vocab.contains(word) {
            return Category::Impossible;
        }
        if c_repr == 0 {
            return Category::Useless;
        }
        let c_unadapt = unadapt.count(word);
        if c_repr < cfg.min_count_repr && c_unadapt < cfg.min_count_unadapt {
            return Category::Dubious;
        }
        let ratio = if c_unadapt == 0 {
            f64::INFINITY
        } else {
            (c_repr as f64 / w_repr) / (c_unadapt as f64 / w_unadapt)
        };
        if ratio <= cfg.ratio_lo {
            Category::Bad
        } else if ratio < cfg.ratio_hi {
            Category::Meh
        } else {
            Category::Kept
        }
    };

    let mut partition = VocabPartition::default();
    let mut add = |word: &str| {
        if partition.category.contains_key(word) {
            return;
        }
        let cat = classify(word);
        if cat == Category::Kept {
            partition.kept.insert(word.to_string());
        }
        partition.category.insert(word.to_string(), cat);
    };
    repr.words().for_each(&mut add);
    unadapt.words().for_each(&mut add);
    avail_vocab.iter().for_each(|w| add(w));
    extra.into_iter().for_each(add);
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(words: &[&str]) -> HashSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn stats(pairs: &[(&str, u64)]) -> CorpusStats {
        CorpusStats::from_counts(pairs.iter().map(|&(w, c)| (w, c)))
    }

    #[test]
    fn categories_from_counts() {
        // 1000-token corpora so probabilities read directly off the counts.
        let repr = stats(&[("rare", 2), ("unad", 3), ("indic", 20), ("even", 10), ("only_repr", 5), ("filler", 960)]);
        let unadapt = stats(&[("rare", 1), ("unad", 150), ("indic", 3), ("even", 10), ("junk", 7), ("filler", 829)]);
        let avail = set(&["rare", "unad", "indic", "even", "junk", "filler"]);
        let p = partition_vocab(&repr, &unadapt, &avail, &SquashConfig::default()).unwrap();

        assert_eq!(p.category("rare"), Some(Category::Dubious));
        // 0.003 / 0.15
        assert_eq!(p.category("unad"), Some(Category::Bad));
        // 0.02 / 0.003
        assert_eq!(p.category("indic"), Some(Category::Kept));
        assert_eq!(p.category("even"), Some(Category::Meh));
        assert_eq!(p.category("only_repr"), Some(Category::Impossible));
        assert_eq!(p.category("junk"), Some(Category::Useless));
        assert_eq!(p.kept_set(), &BTreeSet::from(["indic".to_string()]));
    }

    #[test]
    fn bad_and_kept_by_probability() {
        // P_repr = 0.001, P_unadapt = 0.05
        let repr = stats(&[("w", 3), ("pad", 2997)]);
        let unadapt = stats(&[("w", 50), ("pad", 950)]);
        let avail = set(&["w", "pad"]);
        let p = partition_vocab(&repr, &unadapt, &avail, &SquashConfig::default()).unwrap();
        assert_eq!(p.category("w"), Some(Category::Bad));

        // P_repr = 0.02, P_unadapt = 0.001
        let repr = stats(&[("w", 20), ("pad", 980)]);
        let unadapt = stats(&[("w", 3), ("pad", 2997)]);
        let p = partition_vocab(&repr, &unadapt, &avail, &SquashConfig::default()).unwrap();
        assert_eq!(p.category("w"), Some(Category::Kept));
    }

    #[test]
    fn absent_from_unadapt_is_kept() {
        let repr = stats(&[("w", 5), ("pad", 5)]);
        let unadapt = stats(&[("pad", 5)]);
        let avail = set(&["w", "pad"]);
        let p = partition_vocab(&repr, &unadapt, &avail, &SquashConfig::default()).unwrap();
        assert_eq!(p.category("w"), Some(Category::Kept));
    }

    #[test]
    fn per_corpus_min_counts() {
        let repr = stats(&[("w", 2), ("pad", 8)]);
        let unadapt = stats(&[("w", 1), ("pad", 9)]);
        let avail = set(&["w", "pad"]);
        let mut cfg = SquashConfig::default();
        assert_eq!(partition_vocab(&repr, &unadapt, &avail, &cfg).unwrap().category("w"), Some(Category::Dubious));
        cfg.min_count_repr = 2;
        assert_eq!(partition_vocab(&repr, &unadapt, &avail, &cfg).unwrap().category("w"), Some(Category::Kept));
    }

    #[test]
    fn extra_words_are_covered() {
        let repr = stats(&[("a", 5)]);
        let unadapt = stats(&[("a", 5)]);
        let avail = set(&["a"]);
        let p = partition_vocab_with(&repr, &unadapt, &avail, ["seedonly"], &SquashConfig::default()).unwrap();
        assert_eq!(p.category("seedonly"), Some(Category::Useless));
    }

    #[test]
    fn errors() {
        let s = stats(&[("a", 1)]);
        let avail = set(&["a"]);
        let cfg = SquashConfig::default();
        assert_eq!(
            partition_vocab(&CorpusStats::new(), &s, &avail, &cfg).unwrap_err(),
            SquashError::EmptyCorpus("representative")
        );
        assert!(partition_vocab(&s, &CorpusStats::new(), &avail, &cfg).is_err());
        assert!(SquashConfig::new(0, 0.5, 2.0).is_err());
        assert!(SquashConfig::new(3, 1.5, 2.0).is_err());
        assert!(SquashConfig::new(3, 0.5, 1.0).is_err());
    }

    #[test]
    fn apply_squash_examples() {
        let repr = stats(&[("the", 50), ("pangolin", 10), ("pad", 940)]);
        let unadapt = stats(&[("the", 50), ("pangolin", 1), ("pad", 949)]);
        let avail = set(&["the", "pangolin", "pad"]);
        let p = partition_vocab(&repr, &unadapt, &avail, &SquashConfig::default()).unwrap();
        assert_eq!(p.apply_squash(&["the", "pangolin"]).unwrap(), vec!["meh", "pangolin"]);
        assert_eq!(p.apply_squash(&["pangolin", "pangolin"]).unwrap(), vec!["pangolin", "pangolin"]);
        assert!(p.apply_squash::<&str>(&[]).unwrap().is_empty());
        assert_eq!(
            p.apply_squash(&["zebra"]).unwrap_err(),
            SquashError::Uncovered("zebra".into())
        );
    }

    #[test]
    fn squash_stats_sums_by_category() {
        let repr = stats(&[("the", 50), ("of", 30), ("pangolin", 20), ("pad", 900)]);
        let unadapt = stats(&[("the", 50), ("of", 30), ("pangolin", 1), ("pad", 919)]);
        let avail = set(&["the", "of", "pangolin", "pad"]);
        let p = partition_vocab(&repr, &unadapt, &avail, &SquashConfig::default()).unwrap();
        let s = stats(&[("the", 5), ("of", 3), ("pangolin", 2)]);
        let squashed = p.squash_stats(&s).unwrap();
        assert_eq!(squashed, stats(&[("meh", 8), ("pangolin", 2)]));
        assert_eq!(squashed.total_tokens(), 10);

        let kept_only = stats(&[("pangolin", 4)]);
        assert_eq!(p.squash_stats(&kept_only).unwrap(), kept_only);
    }

    #[test]
    fn escaping() {
        assert_eq!(escape_reserved("meh"), "raw:meh");
        assert_eq!(escape_reserved("useless"), "raw:useless");
        assert_eq!(escape_reserved("kept"), "kept");
        assert_eq!(escape_reserved("Meh"), "Meh");
    }

    fn arb_stats(words: &'static [&'static str]) -> impl Strategy<Value = CorpusStats> {
        prop::collection::vec(0u64..40, words.len())
            .prop_map(move |cs| CorpusStats::from_counts(words.iter().copied().zip(cs)))
            .prop_filter("non-empty", |s| !s.is_empty())
    }

    const WORDS: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];

    proptest! {
        #[test]
        fn partition_is_total_and_kept_is_monotone(
            repr in arb_stats(WORDS),
            unadapt in arb_stats(WORDS),
            avail_mask in prop::collection::vec(any::<bool>(), WORDS.len()),
            min_count in 1u64..5,
            hi in 1.01f64..8.0,
            bump in 0.0f64..8.0,
        ) {
            let avail: HashSet<String> = WORDS.iter().zip(&avail_mask).filter(|(_, &m)| m).map(|(w, _)| w.to_string()).collect();
            let cfg = SquashConfig::new(min_count, 0.5, hi).unwrap();
            let p = partition_vocab(&repr, &unadapt, &avail, &cfg).unwrap();
            for w in repr.words().chain(unadapt.words()).chain(avail.iter().map(String::as_str)) {
                prop_assert!(p.category(w).is_some());
            }
            let kept: BTreeSet<String> = p.iter().filter(|(_, c)| *c == Category::Kept).map(|(w, _)| w.to_string()).collect();
            prop_assert_eq!(&kept, p.kept_set());
            for w in &kept {
                prop_assert!(repr.count(w) >= min_count || unadapt.count(w) >= min_count);
            }
            let cfg2 = SquashConfig::new(min_count, 0.5, hi + bump).unwrap();
            let p2 = partition_vocab(&repr, &unadapt, &avail, &cfg2).unwrap();
            prop_assert!(p2.kept_set().is_subset(p.kept_set()));

            let squashed = p.squash_stats(&repr).unwrap();
            prop_assert_eq!(squashed.total_tokens(), repr.total_tokens());
        }
    }
}
