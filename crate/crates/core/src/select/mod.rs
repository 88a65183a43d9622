//! Greedy selection engine.
//!
//! Three modes share one objective (the smoothed cross-entropy of the
//! representative corpus):
//!
//! * [`Mode::Exact`] rescores every remaining sentence each step.
//! * [`Mode::Fast`] picks the kept word with the best estimated gain, then
//!   the best sentence from that word's lazily sorted list.
//! * [`Mode::Batch`] like fast, but commits `ceil(sqrt(A) / 2)` sentences per
//!   step, where `A` is the number of live sentences holding the word.

mod engine;
mod index;
mod run;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::score::{ScoreError, Sym, TokenBag};
use crate::squash::SquashError;

/// Exact-mode scores closer than this (in bits) are treated as equal.
pub const TIE_EPSILON: f64 = 1e-12;

pub use engine::{Batch, Candidate, Engine};
pub use index::{AliveSet, WordIndex};
pub use run::{Run, StopReason};

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("available corpus has no non-blank lines")]
    EmptyAvailable,
    #[error("nothing selectable: no kept word occurs in the available corpus")]
    NothingSelectable,
    #[error(transparent)]
    Squash(#[from] SquashError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("invalid stop config: {0}")]
    StopConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Exact,
    #[default]
    Fast,
    Batch,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "fast" => Ok(Mode::Fast),
            "batch" => Ok(Mode::Batch),
            other => Err(format!("unknown mode {other:?} (expected exact, fast or batch)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Fast => "fast",
            Mode::Batch => "batch",
        })
    }
}

/// One candidate line of the available pool.
#[derive(Debug, Clone)]
pub struct SentenceRecord {
    /// 0-based line number in the available file.
    pub id: usize,
    /// Squashed tokens.
    pub tokens: Vec<Sym>,
    pub bag: TokenBag,
    /// Last computed sentence gain, in bits.
    pub cached_gain: f64,
    /// Selection count at the time `cached_gain` was computed.
    pub cached_at: u64,
    /// Hash of the raw token sequence; used to spot duplicates inside a batch.
    pub dedup_key: u64,
}

impl SentenceRecord {
    pub fn token_count(&self) -> u64 {
        self.bag.token_count()
    }

    fn same_text(&self, other: &SentenceRecord) -> bool {
        self.dedup_key == other.dedup_key && self.tokens == other.tokens
    }
}

/// What led to a selection: the best word, or a full rescan in exact mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    Word(String),
    Exact,
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::Word(w) => f.write_str(w),
            Trigger::Exact => f.write_str("exact"),
        }
    }
}

/// One selected line. Scores are in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionEvent {
    /// 1-based selection number.
    pub iteration: u64,
    pub sentence_id: usize,
    pub trigger: Trigger,
    pub penalty: f64,
    pub gain: f64,
    pub delta_h: f64,
    pub h_after: f64,
    /// 1-based batch number in batch mode, 0 otherwise.
    pub batch_index: u64,
    pub token_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopConfig {
    /// Consecutive positive-ΔH selections tolerated before halting.
    pub patience: usize,
    pub max_lines: Option<usize>,
    pub max_tokens: Option<u64>,
    /// When false the run continues until candidates or caps run out.
    pub halt_on_positive: bool,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            patience: 10,
            max_lines: None,
            max_tokens: None,
            halt_on_positive: true,
        }
    }
}

impl StopConfig {
    /// Never halts on positive ΔH.
    pub fn exhaustive() -> Self {
        StopConfig {
            halt_on_positive: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SelectError> {
        if self.patience == 0 {
            return Err(SelectError::StopConfig("patience must be at least 1".into()));
        }
        Ok(())
    }
}

/// Smallest `k` with `k² >= a`.
pub fn ceil_sqrt(a: usize) -> usize {
    let mut k = (a as f64).sqrt() as usize;
    while k * k < a {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) >= a {
        k -= 1;
    }
    k
}

/// Smallest `m` with `2m >= sqrt(a)`, i.e. `4m² >= a`.
pub fn ceil_half_sqrt(a: usize) -> usize {
    let mut m = ((a as f64).sqrt() / 2.0) as usize;
    while 4 * m * m < a {
        m += 1;
    }
    while m > 0 && 4 * (m - 1) * (m - 1) >= a {
        m -= 1;
    }
    m
}
