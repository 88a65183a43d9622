//! Python bindings for the `cynical` selection library.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cynical::corpus::{self, CorpusError};
use cynical::pipeline::{prepare, CorpusSource, SelectionConfig, SelectionInputs};
use cynical::score::DEFAULT_DELTA;
use cynical::select::{Mode, StopConfig};
use cynical::squash::SquashConfig;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn corpus_err(e: CorpusError) -> PyErr {
    match e {
        CorpusError::Io { .. } => PyIOError::new_err(e.to_string()),
        other => value_err(other),
    }
}

/// Splits a line on whitespace.
#[pyfunction]
fn tokenize(line: &str) -> Vec<String> {
    corpus::tokenize(line).into_iter().map(String::from).collect()
}

/// Unigram counts of a corpus.
#[pyclass(name = "CorpusStats", module = "pycynical")]
struct PyCorpusStats {
    inner: corpus::CorpusStats,
}

#[pymethods]
impl PyCorpusStats {
    #[new]
    #[pyo3(signature = (lines=Vec::new()))]
    fn new(lines: Vec<String>) -> Self {
        PyCorpusStats {
            inner: corpus::count_corpus_par(&lines),
        }
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        corpus::CorpusStats::load_from_path(&path)
            .map(|inner| PyCorpusStats { inner })
            .map_err(corpus_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_to_path(&path).map_err(corpus_err)
    }

    fn count(&self, word: &str) -> u64 {
        self.inner.count(word)
    }

    fn prob(&self, word: &str) -> PyResult<f64> {
        self.inner.unigram_prob(word).map_err(corpus_err)
    }

    #[getter]
    fn total_tokens(&self) -> u64 {
        self.inner.total_tokens()
    }

    #[getter]
    fn total_types(&self) -> usize {
        self.inner.total_types()
    }

    /// `(word, count)` pairs, most frequent first.
    fn entries(&self) -> Vec<(String, u64)> {
        self.inner
            .sorted_entries()
            .into_iter()
            .map(|(w, c)| (w.to_string(), c))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.total_types()
    }

    fn __repr__(&self) -> String {
        format!(
            "CorpusStats(types={}, tokens={})",
            self.inner.total_types(),
            self.inner.total_tokens()
        )
    }
}

/// One selected line, scores in bits.
#[pyclass(name = "SelectionEvent", module = "pycynical", frozen, get_all)]
struct PySelectionEvent {
    iteration: u64,
    batch_index: u64,
    sentence_id: usize,
    trigger: String,
    penalty: f64,
    gain: f64,
    delta_h: f64,
    h_after: f64,
    text: String,
}

#[pymethods]
impl PySelectionEvent {
    fn __repr__(&self) -> String {
        format!(
            "SelectionEvent(iteration={}, sentence_id={}, delta_h={:.6})",
            self.iteration, self.sentence_id, self.delta_h
        )
    }
}

/// Ranks `avail` against `repr`. Returns `(events, stop_reason)`.
#[pyfunction]
#[pyo3(signature = (
    repr,
    avail,
    *,
    seed=Vec::new(),
    unadapt=None,
    mode="fast",
    delta=DEFAULT_DELTA,
    min_count=3,
    ratio_lo=0.5,
    ratio_hi=2.0,
    patience=10,
    max_lines=None,
    max_tokens=None,
    exhaustive=false,
))]
#[allow(clippy::too_many_arguments)]
fn select(
    repr: Vec<String>,
    avail: Vec<String>,
    seed: Vec<String>,
    unadapt: Option<Vec<String>>,
    mode: &str,
    delta: f64,
    min_count: u64,
    ratio_lo: f64,
    ratio_hi: f64,
    patience: usize,
    max_lines: Option<usize>,
    max_tokens: Option<u64>,
    exhaustive: bool,
) -> PyResult<(Vec<PySelectionEvent>, String)> {
    let mode: Mode = mode.parse().map_err(value_err)?;
    let cfg = SelectionConfig {
        squash: SquashConfig::new(min_count, ratio_lo, ratio_hi).map_err(value_err)?,
        delta,
    };
    let stop = StopConfig {
        patience,
        max_lines,
        max_tokens,
        halt_on_positive: !exhaustive,
    };
    let inputs = SelectionInputs {
        repr: CorpusSource::Lines(repr),
        unadapt: unadapt.map(CorpusSource::Lines),
        seed,
        avail,
    };
    let mut prepared = prepare(&inputs, &cfg).map_err(value_err)?;
    let mut run = prepared.engine.run(stop, mode).map_err(value_err)?;
    let events = run
        .by_ref()
        .map(|ev| PySelectionEvent {
            iteration: ev.iteration,
            batch_index: ev.batch_index,
            sentence_id: ev.sentence_id,
            trigger: ev.trigger.to_string(),
            penalty: ev.penalty,
            gain: ev.gain,
            delta_h: ev.delta_h,
            h_after: ev.h_after,
            text: inputs.avail[ev.sentence_id].clone(),
        })
        .collect();
    let reason = run.stop_reason().expect("run finished").to_string();
    Ok((events, reason))
}

/// Cross-entropy, perplexity and OOV figures of `subset` against `repr`, as a dict.
#[pyfunction]
#[pyo3(signature = (subset, repr, delta=DEFAULT_DELTA))]
fn evaluate_subset<'py>(py: Python<'py>, subset: Vec<String>, repr: Vec<String>, delta: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = cynical::eval::evaluate_subset(&subset, &corpus::count_corpus(&repr), delta).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("subset_lines", r.subset_lines)?;
    d.set_item("subset_tokens", r.subset_tokens)?;
    d.set_item("h_bits", r.h_bits)?;
    d.set_item("perplexity", r.perplexity)?;
    d.set_item("oov_tokens", r.oov_tokens)?;
    d.set_item("oov_types", r.oov_types)?;
    d.set_item("oov_token_rate", r.oov_token_rate)?;
    Ok(d)
}

/// Cross-entropy difference baseline: `(id, score)` ascending. The pool model
/// defaults to `avail`.
#[pyfunction]
#[pyo3(signature = (avail, in_domain, pool=None, delta=DEFAULT_DELTA))]
fn moore_lewis_rank(
    avail: Vec<String>,
    in_domain: Vec<String>,
    pool: Option<Vec<String>>,
    delta: f64,
) -> PyResult<Vec<(usize, f64)>> {
    let pool = corpus::count_corpus(pool.as_deref().unwrap_or(&avail));
    cynical::eval::moore_lewis_rank(&avail, &corpus::count_corpus(&in_domain), &pool, delta).map_err(value_err)
}

#[pymodule]
fn pycynical(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_subset, m)?)?;
    m.add_function(wrap_pyfunction!(moore_lewis_rank, m)?)?;
    m.add_class::<PyCorpusStats>()?;
    m.add_class::<PySelectionEvent>()?;
    Ok(())
}
