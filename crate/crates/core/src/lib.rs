//! Cynical data selection.
//!
//! Ranks the lines of an available pool by how much each one lowers the
//! cross-entropy of a representative corpus under a unigram model of
//! everything selected so far. The output (JADED) is the pool re-ordered so
//! that every prefix is the most useful subset of its size the greedy search
//! could find, with scores in bits.
//!
//! ```
//! use cynical::pipeline::{prepare, CorpusSource, SelectionConfig, SelectionInputs};
//! use cynical::select::{Mode, StopConfig};
//! use cynical::squash::SquashConfig;
//!
//! let inputs = SelectionInputs {
//!     repr: CorpusSource::Lines(vec!["x x y".into()]),
//!     unadapt: None,
//!     seed: vec![],
//!     avail: vec!["x".into(), "y".into(), "z z z".into()],
//! };
//! let cfg = SelectionConfig { squash: SquashConfig::new(1, 0.5, 1.5).unwrap(), ..Default::default() };
//! let mut prepared = prepare(&inputs, &cfg).unwrap();
//! let ids: Vec<usize> = prepared.engine.run(StopConfig::default(), Mode::Fast).unwrap()
//!     .map(|ev| ev.sentence_id)
//!     .collect();
//! assert_eq!(ids, vec![0, 1]);
//! ```

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod pipeline;
pub mod score;
pub mod select;
pub mod squash;

use thiserror::Error;

pub use corpus::{count_corpus, tokenize, CorpusStats};
pub use eval::{evaluate_subset, moore_lewis_rank, EvalReport};
pub use score::{LogBase, ModelState, ScoreBreakdown};
pub use select::{Engine, Mode, SelectionEvent, StopConfig, StopReason};
pub use squash::{Category, SquashConfig, VocabPartition};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Squash(#[from] squash::SquashError),
    #[error(transparent)]
    Score(#[from] score::ScoreError),
    #[error(transparent)]
    Select(#[from] select::SelectError),
}
