use std::collections::VecDeque;
use std::fmt;

use super::{Engine, Mode, SelectError, SelectionEvent, StopConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// ΔH stayed positive for the patience window (or until the pool ran out);
    /// the positive tail was dropped.
    DeltaHPositive,
    MaxLines,
    MaxTokens,
    Exhausted,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::DeltaHPositive => "delta-h positive",
            StopReason::MaxLines => "max-lines",
            StopReason::MaxTokens => "max-tokens",
            StopReason::Exhausted => "exhausted",
        })
    }
}

/// Streaming selection. Events are yielded only once they are final: a
/// positive-ΔH selection is held back until a non-positive one follows it.
pub struct Run<'e> {
    engine: &'e mut Engine,
    mode: Mode,
    stop: StopConfig,
    ready: VecDeque<SelectionEvent>,
    pending: Vec<SelectionEvent>,
    pending_tokens: u64,
    batch: VecDeque<SelectionEvent>,
    lines: usize,
    tokens: u64,
    reason: Option<StopReason>,
}

impl Engine {
    pub fn run(&mut self, stop: StopConfig, mode: Mode) -> Result<Run<'_>, SelectError> {
        stop.validate()?;
        self.check_selectable(mode)?;
        Ok(Run {
            engine: self,
            mode,
            stop,
            ready: VecDeque::new(),
            pending: Vec::new(),
            pending_tokens: 0,
            batch: VecDeque::new(),
            lines: 0,
            tokens: 0,
            reason: None,
        })
    }
}

impl Run<'_> {
    /// Set once the iterator has returned `None`.
    pub fn stop_reason(&self) -> Option<StopReason> {
        self.reason
    }

    pub fn engine(&self) -> &Engine {
        self.engine
    }

    fn pull(&mut self) -> Option<SelectionEvent> {
        if let Some(ev) = self.batch.pop_front() {
            return Some(ev);
        }
        match self.mode {
            Mode::Exact => self.engine.exact_select_next(),
            Mode::Fast => self.engine.select_next(),
            Mode::Batch => {
                let batch = self.engine.select_batch()?;
                self.batch.extend(batch.events);
                self.batch.pop_front()
            }
        }
    }

    fn flush_pending(&mut self) {
        self.lines += self.pending.len();
        self.tokens += self.pending_tokens;
        self.pending_tokens = 0;
        self.ready.extend(self.pending.drain(..));
    }

    fn halt(&mut self, reason: StopReason) {
        self.reason = Some(reason);
    }

    fn step(&mut self) {
        if let Some(max) = self.stop.max_lines {
            if self.lines + self.pending.len() >= max {
                self.flush_pending();
                return self.halt(StopReason::MaxLines);
            }
        }
        let Some(ev) = self.pull() else {
            if self.pending.is_empty() {
                return self.halt(StopReason::Exhausted);
            }
            self.pending.clear();
            return self.halt(StopReason::DeltaHPositive);
        };
        if let Some(max) = self.stop.max_tokens {
            if self.tokens + self.pending_tokens + ev.token_count > max {
                self.flush_pending();
                return self.halt(StopReason::MaxTokens);
            }
        }
        if self.stop.halt_on_positive && ev.delta_h > 0.0 {
            self.pending_tokens += ev.token_count;
            self.pending.push(ev);
            if self.pending.len() >= self.stop.patience {
                self.pending.clear();
                self.halt(StopReason::DeltaHPositive);
            }
        } else {
            self.flush_pending();
            self.lines += 1;
            self.tokens += ev.token_count;
            self.ready.push_back(ev);
        }
    }
}

impl Iterator for Run<'_> {
    type Item = SelectionEvent;

    fn next(&mut self) -> Option<SelectionEvent> {
        loop {
            if let Some(ev) = self.ready.pop_front() {
                return Some(ev);
            }
            if self.reason.is_some() {
                return None;
            }
            self.step();
        }
    }
}
