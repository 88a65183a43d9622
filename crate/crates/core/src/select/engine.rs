use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::hash::{DefaultHasher, Hash, Hasher};

use ordered_float::OrderedFloat;

use super::index::{AliveSet, ListEntry, Slot, WordIndex};
use super::{ceil_half_sqrt, ceil_sqrt, Mode, SelectError, SelectionEvent, SentenceRecord, Trigger, TIE_EPSILON};
use crate::corpus::CorpusStats;
use crate::score::{ModelState, ReprDist, ScoreBreakdown, ScoringVocab, Sym, TokenBag};
use crate::squash::VocabPartition;

/// A rescored sentence proposed for selection.
#[derive(Debug, Clone, Copy)]
pub struct Candidate {
    pub id: usize,
    pub breakdown: ScoreBreakdown,
    slot: Slot,
}

/// Result of one batch-mode step.
#[derive(Debug, Clone)]
pub struct Batch {
    /// 1-based batch number.
    pub index: u64,
    pub word: String,
    /// Live sentences in the word's list when the batch started.
    pub available: usize,
    pub rescored: usize,
    /// `ceil(sqrt(available) / 2)`: how many lines the batch may take.
    pub quota: usize,
    /// Ids of duplicates that were un-selected and put back on the list.
    pub returned: Vec<usize>,
    pub events: Vec<SelectionEvent>,
}

/// Selection state over one available pool.
#[derive(Debug, Clone)]
pub struct Engine {
    vocab: ScoringVocab,
    repr: ReprDist,
    state: ModelState,
    sentences: Vec<SentenceRecord>,
    index: WordIndex,
    alive: AliveSet,
    /// Kept words with a non-empty list, keyed by estimated word gain.
    queue: BTreeSet<(OrderedFloat<f64>, Sym)>,
    queued_key: Vec<Option<f64>>,
    kept_in_avail: usize,
    iteration: u64,
    batches: u64,
    rescores: u64,
}

fn dedup_key<S: AsRef<str>>(tokens: &[S]) -> u64 {
    let mut h = DefaultHasher::new();
    for t in tokens {
        t.as_ref().hash(&mut h);
    }
    h.finish()
}

fn by_delta_then_id(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

impl Engine {
    /// Builds the engine from raw token lines. `avail[i]` is line `i` of the
    /// pool; blank lines are skipped but keep their number. Every token must
    /// be covered by `partition`.
    pub fn build<L, S>(
        avail: &[L],
        seed: &[L],
        repr: &CorpusStats,
        partition: &VocabPartition,
        delta: f64,
    ) -> Result<Engine, SelectError>
    where
        L: AsRef<[S]>,
        S: AsRef<str>,
    {
        let vocab = ScoringVocab::from_partition(partition);
        let repr_dist = ReprDist::from_stats(&partition.squash_stats(repr)?, &vocab)?;
        let mut state = ModelState::new(vocab.len(), delta, &repr_dist)?;

        let mut seed_syms = Vec::new();
        for line in seed {
            let squashed = partition.apply_squash(line.as_ref())?;
            seed_syms.extend(vocab.intern_all(&squashed)?);
        }
        if !seed_syms.is_empty() {
            state.prime(&TokenBag::from_syms(&seed_syms), &repr_dist);
        }

        let mut sentences = Vec::new();
        for (id, line) in avail.iter().enumerate() {
            let raw = line.as_ref();
            if raw.is_empty() {
                continue;
            }
            let tokens = vocab.intern_all(&partition.apply_squash(raw)?)?;
            let bag = TokenBag::from_syms(&tokens);
            let cached_gain = state.sentence_gain(&bag, &repr_dist);
            sentences.push(SentenceRecord {
                id,
                tokens,
                bag,
                cached_gain,
                cached_at: 0,
                dedup_key: dedup_key(raw),
            });
        }
        if sentences.is_empty() {
            return Err(SelectError::EmptyAvailable);
        }

        let mut index = WordIndex::with_vocab(vocab.len());
        for (slot, rec) in sentences.iter().enumerate() {
            for &(sym, _) in rec.bag.entries() {
                if vocab.is_kept(sym) {
                    index.list_mut(sym).entries.push_back(ListEntry {
                        gain: rec.cached_gain,
                        slot: slot as Slot,
                    });
                }
            }
        }
        index.sort_all();

        let mut engine = Engine {
            alive: AliveSet::new(sentences.len()),
            queued_key: vec![None; vocab.len()],
            queue: BTreeSet::new(),
            kept_in_avail: 0,
            vocab,
            repr: repr_dist,
            state,
            sentences,
            index,
            iteration: 0,
            batches: 0,
            rescores: 0,
        };
        let kept: Vec<Sym> = engine.vocab.kept_syms().collect();
        for sym in kept {
            if engine.index.list_len(sym) > 0 {
                let key = engine.state.word_gain_estimate(sym, &engine.repr);
                engine.queue.insert((OrderedFloat(key), sym));
                engine.queued_key[sym.index()] = Some(key);
                engine.kept_in_avail += 1;
            }
        }
        Ok(engine)
    }

    pub fn vocab(&self) -> &ScoringVocab {
        &self.vocab
    }

    pub fn repr(&self) -> &ReprDist {
        &self.repr
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn word_index(&self) -> &WordIndex {
        &self.index
    }

    /// Non-blank lines of the pool, in line order.
    pub fn sentences(&self) -> &[SentenceRecord] {
        &self.sentences
    }

    pub fn sentence(&self, id: usize) -> Option<&SentenceRecord> {
        self.slot_of(id).map(|s| &self.sentences[s as usize])
    }

    fn slot_of(&self, id: usize) -> Option<Slot> {
        self.sentences
            .binary_search_by_key(&id, |r| r.id)
            .ok()
            .map(|s| s as Slot)
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.slot_of(id).is_some_and(|s| self.alive.contains(s))
    }

    pub fn alive_count(&self) -> usize {
        self.alive.len()
    }

    /// Kept words that occur somewhere in the pool.
    pub fn kept_in_avail(&self) -> usize {
        self.kept_in_avail
    }

    /// Selections made so far.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Total sentence-gain recomputations in fast and batch mode.
    pub fn rescore_count(&self) -> u64 {
        self.rescores
    }

    /// Ids in a kept word's list, ghosts included, in list order.
    pub fn word_list_ids(&self, word: &str) -> Vec<usize> {
        match self.vocab.sym(word) {
            Some(sym) if self.vocab.is_kept(sym) => self
                .index
                .list(sym)
                .entries
                .iter()
                .map(|e| self.sentences[e.slot as usize].id)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Checks that `mode` has something to work with.
    pub fn check_selectable(&self, mode: Mode) -> Result<(), SelectError> {
        match mode {
            Mode::Exact => Ok(()),
            Mode::Fast | Mode::Batch if self.kept_in_avail == 0 => Err(SelectError::NothingSelectable),
            Mode::Fast | Mode::Batch => Ok(()),
        }
    }

    fn dequeue(&mut self, sym: Sym) {
        if let Some(key) = self.queued_key[sym.index()].take() {
            self.queue.remove(&(OrderedFloat(key), sym));
        }
    }

    /// Kept word with the best (lowest) estimated gain whose list still holds
    /// a live sentence. Ties go to the lexicographically smaller word.
    pub fn best_word(&mut self) -> Option<Sym> {
        loop {
            let &(_, sym) = self.queue.first()?;
            let list = self.index.list_mut(sym);
            list.prune_head(&self.alive);
            if list.entries.is_empty() {
                self.dequeue(sym);
                continue;
            }
            return Some(sym);
        }
    }

    /// Lazy rescoring of `word`'s list: the head is rescored, and so is every
    /// entry it would be re-sorted behind. Returns the rescored sentence with
    /// the lowest ΔH. The list is left sorted by the refreshed gains.
    pub fn lazy_top(&mut self, word: Sym) -> Option<Candidate> {
        let Engine {
            index,
            state,
            sentences,
            alive,
            repr,
            rescores,
            iteration,
            ..
        } = self;
        let list = index.list_mut(word);
        list.prune_head(alive);
        let head = list.entries.pop_front()?;

        let mut fresh = |slot: Slot| {
            *rescores += 1;
            let rec = &mut sentences[slot as usize];
            rec.cached_gain = state.sentence_gain(&rec.bag, repr);
            rec.cached_at = *iteration;
            ListEntry {
                gain: rec.cached_gain,
                slot,
            }
        };

        let head = fresh(head.slot);
        let demoted_to = list
            .entries
            .partition_point(|e| e.key_cmp(&head) == Ordering::Less);
        let stale: Vec<ListEntry> = list.entries.drain(..demoted_to).collect();
        let mut rescored = vec![head];
        rescored.extend(stale.into_iter().filter(|e| alive.contains(e.slot)).map(|e| fresh(e.slot)));
        for &e in &rescored {
            list.insert_sorted(e);
        }

        rescored
            .iter()
            .map(|e| {
                let rec = &sentences[e.slot as usize];
                let b = state.breakdown(state.penalty(rec.token_count()), e.gain);
                (b, rec.id, e.slot)
            })
            .min_by(|a, b| a.0.delta_h.total_cmp(&b.0.delta_h).then(a.1.cmp(&b.1)))
            .map(|(breakdown, id, slot)| Candidate { id, breakdown, slot })
    }

    fn commit(&mut self, slot: Slot, breakdown: ScoreBreakdown, trigger: Trigger, batch_index: u64) -> SelectionEvent {
        self.alive.remove(slot);
        let rec = &self.sentences[slot as usize];
        self.state
            .update(&rec.bag, &breakdown)
            .expect("breakdown is computed against the current state");
        for &(sym, _) in rec.bag.entries() {
            if let Some(old) = self.queued_key[sym.index()] {
                let new = self.state.word_gain_estimate(sym, &self.repr);
                self.queue.remove(&(OrderedFloat(old), sym));
                self.queue.insert((OrderedFloat(new), sym));
                self.queued_key[sym.index()] = Some(new);
            }
        }
        self.iteration += 1;
        SelectionEvent {
            iteration: self.iteration,
            sentence_id: rec.id,
            trigger,
            penalty: breakdown.penalty,
            gain: breakdown.gain,
            delta_h: breakdown.delta_h,
            h_after: self.state.h_current(),
            batch_index,
            token_count: rec.token_count(),
        }
    }

    /// One fast-mode step. `None` once no kept word has a live sentence.
    pub fn select_next(&mut self) -> Option<SelectionEvent> {
        loop {
            let word = self.best_word()?;
            if let Some(c) = self.lazy_top(word) {
                self.index.list_mut(word).remove_slot(c.slot);
                let trigger = Trigger::Word(self.vocab.name(word).to_string());
                return Some(self.commit(c.slot, c.breakdown, trigger, 0));
            }
        }
    }

    /// Scores every live sentence and takes the global argmin of ΔH. Scores
    /// within [`TIE_EPSILON`] of the minimum count as tied and go to the lowest
    /// id, so summation-order noise cannot reorder equal sentences. Costs a
    /// full pass over the pool per call.
    pub fn exact_select_next(&mut self) -> Option<SelectionEvent> {
        let scored: Vec<(Slot, ScoreBreakdown)> = (0..self.sentences.len() as Slot)
            .filter(|&s| self.alive.contains(s))
            .map(|s| (s, self.state.delta_h(&self.sentences[s as usize].bag, &self.repr)))
            .collect();
        let min = scored.iter().map(|s| s.1.delta_h).min_by(f64::total_cmp)?;
        let (slot, breakdown) = scored
            .into_iter()
            .find(|s| s.1.delta_h <= min + TIE_EPSILON)
            .expect("the minimum is in the list");
        Some(self.commit(slot, breakdown, Trigger::Exact, 0))
    }

    /// One batch-mode step: with `A` live sentences on the best word's list,
    /// rescore the top `ceil(sqrt(A))` and commit the best `ceil(sqrt(A)/2)`
    /// by ΔH, skipping repeats of a line already taken in this batch.
    pub fn select_batch(&mut self) -> Option<Batch> {
        let word = loop {
            let word = self.best_word()?;
            let alive = &self.alive;
            let list = self.index.list_mut(word);
            list.entries.retain(|e| alive.contains(e.slot));
            if !list.entries.is_empty() {
                break word;
            }
            self.dequeue(word);
        };

        let available = self.index.list(word).entries.len();
        let rescored_n = ceil_sqrt(available);
        let quota = ceil_half_sqrt(available);

        let window: Vec<ListEntry> = self.index.list_mut(word).entries.drain(..rescored_n).collect();
        let mut scored: Vec<(f64, usize, ListEntry)> = window
            .into_iter()
            .map(|e| {
                self.rescores += 1;
                let rec = &mut self.sentences[e.slot as usize];
                rec.cached_gain = self.state.sentence_gain(&rec.bag, &self.repr);
                rec.cached_at = self.iteration;
                let delta_h = self.state.penalty(rec.token_count()) + rec.cached_gain;
                (
                    delta_h,
                    rec.id,
                    ListEntry {
                        gain: rec.cached_gain,
                        slot: e.slot,
                    },
                )
            })
            .collect();
        scored.sort_by(|a, b| by_delta_then_id(&(a.0, a.1), &(b.0, b.1)));

        let mut picked: Vec<Slot> = Vec::with_capacity(quota);
        let mut returned = Vec::new();
        let mut put_back = Vec::new();
        for (rank, &(_, id, entry)) in scored.iter().enumerate() {
            if rank >= quota {
                put_back.push(entry);
                continue;
            }
            let rec = &self.sentences[entry.slot as usize];
            if picked.iter().any(|&p| self.sentences[p as usize].same_text(rec)) {
                returned.push(id);
                put_back.push(entry);
            } else {
                picked.push(entry.slot);
            }
        }
        let list = self.index.list_mut(word);
        for e in put_back {
            list.insert_sorted(e);
        }

        self.batches += 1;
        let name = self.vocab.name(word).to_string();
        let events = picked
            .into_iter()
            .map(|slot| {
                let breakdown = self.state.delta_h(&self.sentences[slot as usize].bag, &self.repr);
                self.commit(slot, breakdown, Trigger::Word(name.clone()), self.batches)
            })
            .collect();
        Some(Batch {
            index: self.batches,
            word: name,
            available,
            rescored: rescored_n,
            quota,
            returned,
            events,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squash::{partition_vocab, SquashConfig};
    use std::collections::HashSet;

    fn toks(lines: &[&str]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.split_whitespace().map(String::from).collect())
            .collect()
    }

    // The unadapted corpus is the pool plus 100 tokens of filler, so pool words
    // come out with a high ratio and are kept.
    fn engine_for(repr: &str, avail: &[&str], seed: &[&str], cfg: &SquashConfig, delta: f64) -> Engine {
        engine_padded(repr, avail, seed, cfg, delta, 100)
    }

    fn engine_padded(repr: &str, avail: &[&str], seed: &[&str], cfg: &SquashConfig, delta: f64, pad: usize) -> Engine {
        let avail = toks(avail);
        let seed = toks(seed);
        let repr = crate::corpus::count_corpus([repr]);
        let filler = vec!["filler"; pad].join(" ");
        let unadapt = crate::corpus::count_corpus(avail.iter().map(|l| l.join(" ")).chain([filler]));
        let avail_vocab: HashSet<String> = avail.iter().flatten().cloned().collect();
        let seed_words: Vec<String> = seed.iter().flatten().cloned().collect();
        let partition = crate::squash::partition_vocab_with(
            &repr,
            &unadapt,
            &avail_vocab,
            seed_words.iter().map(String::as_str),
            cfg,
        )
        .unwrap();
        Engine::build(&avail, &seed, &repr, &partition, delta).unwrap()
    }

    fn loose() -> SquashConfig {
        SquashConfig::new(1, 0.5, 1.5).unwrap()
    }

    #[test]
    fn build_indexes_kept_words() {
        let e = engine_for("x x y", &["x", "y", "z z z"], &[], &loose(), 0.001);
        let kept: Vec<&str> = e.vocab().kept_syms().map(|s| e.vocab().name(s)).collect();
        assert_eq!(kept, vec!["x", "y"]);
        assert_eq!(e.word_list_ids("x"), vec![0]);
        assert_eq!(e.word_list_ids("y"), vec![1]);
        assert!(e.word_list_ids("z").is_empty());
        assert_eq!(e.kept_in_avail(), 2);
        assert_eq!(e.alive_count(), 3);
    }

    #[test]
    fn seed_primes_counts() {
        let e = engine_for("x x y", &["x", "y", "z z z"], &["x"], &loose(), 0.001);
        let x = e.vocab().sym("x").unwrap();
        assert_eq!(e.state().count(x), 1);
        assert_eq!(e.state().total_tokens(), 1);
    }

    #[test]
    fn duplicates_tie_by_id() {
        let e = engine_for("x x y", &["y", "x", "x"], &[], &loose(), 0.001);
        assert_eq!(e.word_list_ids("x"), vec![1, 2]);
        let (a, b) = (e.sentence(1).unwrap(), e.sentence(2).unwrap());
        assert_eq!(a.cached_gain, b.cached_gain);
    }

    #[test]
    fn empty_pool_and_nothing_selectable() {
        let repr = crate::corpus::count_corpus(["x"]);
        let partition = partition_vocab(&repr, &repr, &HashSet::from(["x".to_string()]), &loose()).unwrap();
        let blank: Vec<Vec<String>> = vec![vec![]];
        assert!(matches!(
            Engine::build(&blank, &[], &repr, &partition, 0.001),
            Err(SelectError::EmptyAvailable)
        ));

        // every word is "meh": nothing kept
        let e = engine_padded("a b", &["a", "b"], &[], &loose(), 0.001, 0);
        assert!(matches!(e.check_selectable(Mode::Fast), Err(SelectError::NothingSelectable)));
        assert!(e.check_selectable(Mode::Exact).is_ok());
    }

    #[test]
    fn best_word_prefers_higher_probability_then_lexicographic() {
        let mut e = engine_for("x x y", &["x", "y"], &[], &loose(), 0.001);
        let w = e.best_word().unwrap();
        assert_eq!(e.vocab().name(w), "x");

        let mut e = engine_for("b a", &["a", "b"], &[], &SquashConfig::new(1, 0.5, 1.0 + 1e-9).unwrap(), 0.001);
        let w = e.best_word().unwrap();
        assert_eq!(e.vocab().name(w), "a");
    }

    #[test]
    fn unseen_word_overtakes_covered_one() {
        // p(x) = 2/3, p(y) = 1/3; after x is seen once its estimate is
        // (2/3)·log2(1.001/2.001) ≈ -0.67, while unseen y is ≈ -3.32.
        let mut e = engine_for("x x y", &["x", "x", "y"], &[], &loose(), 0.001);
        let first = e.select_next().unwrap();
        assert_eq!(first.trigger, Trigger::Word("x".into()));
        let w = e.best_word().unwrap();
        assert_eq!(e.vocab().name(w), "y");
        let x = e.vocab().sym("x").unwrap();
        let y = e.vocab().sym("y").unwrap();
        assert!(e.state().word_gain_estimate(y, e.repr()) < e.state().word_gain_estimate(x, e.repr()));
    }

    #[test]
    fn lazy_top_fast_path_rescoring_once() {
        let mut e = engine_for("k k k k q", &["k", "k q", "k"], &[], &loose(), 0.001);
        let k = e.vocab().sym("k").unwrap();
        let before = e.rescore_count();
        let c = e.lazy_top(k).unwrap();
        assert_eq!(e.rescore_count() - before, 1);
        assert_eq!(c.id, 1);
    }

    #[test]
    fn lazy_top_only_ghosts() {
        let mut e = engine_for("x x y", &["x y", "x"], &[], &loose(), 0.001);
        let x = e.vocab().sym("x").unwrap();
        let y = e.vocab().sym("y").unwrap();
        // Select both lines through x; y's list now holds only a ghost.
        e.select_next().unwrap();
        e.select_next().unwrap();
        assert_eq!(e.word_index().list_len(y), 1);
        assert!(e.lazy_top(y).is_none());
        assert!(e.lazy_top(x).is_none());
        assert!(e.select_next().is_none());
    }

    #[test]
    fn lazy_top_matches_full_rescore_of_the_prefix() {
        // Seed saturates `a`, so the head ("a a b") loses most of its cached
        // gain and sinks below three stale entries.
        let avail = ["a a b", "b c", "b d", "b e", "b f"];
        let mut e = engine_for("a a a a b b c d e f", &avail, &[], &loose(), 0.001);
        let a = e.vocab().sym("a").unwrap();
        let b = e.vocab().sym("b").unwrap();
        assert_eq!(e.word_list_ids("b")[0], 0);
        // Drive C(a) up without touching b's list.
        e.state.prime(&TokenBag::from_syms(&[a; 50]), &e.repr.clone());
        let before = e.rescore_count();
        let c = e.lazy_top(b).unwrap();
        let rescored = e.rescore_count() - before;
        assert_eq!(rescored, 5, "head + every stale entry ahead of its new slot");

        // Brute force over the same window.
        let best = [0usize, 1, 2, 3, 4]
            .iter()
            .map(|&id| (e.state().delta_h(&e.sentence(id).unwrap().bag, e.repr()).delta_h, id))
            .min_by(by_delta_then_id)
            .unwrap();
        assert_eq!(c.id, best.1);
        assert_eq!(c.breakdown.delta_h, best.0);
        let ids = e.word_list_ids("b");
        assert_eq!(*ids.last().unwrap(), 0);
        let gains: Vec<f64> = ids.iter().map(|&i| e.sentence(i).unwrap().cached_gain).collect();
        assert!(gains.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn partial_demotion_rescores_prefix_only() {
        let avail = ["a b", "b c", "b d", "b e", "b f", "b g"];
        // e, f, g are absent from the representative corpus, so those lines
        // rank below the head even after it loses most of a's gain.
        let mut e = engine_for("a a a a b c c c d d", &avail, &[], &loose(), 0.001);
        let a = e.vocab().sym("a").unwrap();
        let b = e.vocab().sym("b").unwrap();
        let order = e.word_list_ids("b");
        assert_eq!(order[0], 0);
        e.state.prime(&TokenBag::from_syms(&[a]), &e.repr.clone());
        let head_gain = e.state().sentence_gain(&e.sentence(0).unwrap().bag, e.repr());
        let demoted_to = order[1..]
            .iter()
            .filter(|&&id| {
                let g = e.sentence(id).unwrap().cached_gain;
                g < head_gain
            })
            .count();
        assert_eq!(demoted_to, 2);
        let before = e.rescore_count();
        let c = e.lazy_top(b).unwrap();
        assert_eq!(e.rescore_count() - before, demoted_to as u64 + 1);
        let best = order[..=demoted_to]
            .iter()
            .map(|&id| (e.state().delta_h(&e.sentence(id).unwrap().bag, e.repr()).delta_h, id))
            .min_by(by_delta_then_id)
            .unwrap();
        assert_eq!(c.id, best.1);
    }

    #[test]
    fn never_selects_twice() {
        let mut e = engine_for("a b c a b", &["a b", "b c", "c a", "a", "b", "c", "a b"], &[], &loose(), 0.001);
        let mut seen = HashSet::new();
        while let Some(ev) = e.select_next() {
            assert!(seen.insert(ev.sentence_id));
        }
        assert!(!seen.is_empty());
    }

    #[test]
    fn exact_first_pick_dominates_fast() {
        let avail = ["a b", "b c c", "c a", "a a", "b", "c d", "d d d"];
        let repr = "a a b c c c d a b";
        let mut fast = engine_for(repr, &avail, &[], &loose(), 0.001);
        let mut exact = engine_for(repr, &avail, &[], &loose(), 0.001);
        let f = fast.select_next().unwrap();
        let x = exact.exact_select_next().unwrap();
        assert!(x.delta_h <= f.delta_h);
        assert_eq!(x.trigger, Trigger::Exact);
    }

    #[test]
    fn exact_singleton() {
        let mut e = engine_for("q", &["z z"], &[], &loose(), 0.001);
        let ev = e.exact_select_next().unwrap();
        assert_eq!(ev.sentence_id, 0);
        assert!(ev.delta_h > 0.0);
        assert!(e.exact_select_next().is_none());
    }

    #[test]
    fn batch_of_nine() {
        let avail: Vec<String> = (0..9).map(|i| format!("k w{i}")).collect();
        let avail: Vec<&str> = avail.iter().map(String::as_str).collect();
        let mut e = engine_for("k k k k k k k k k", &avail, &[], &loose(), 0.001);
        let b = e.select_batch().unwrap();
        assert_eq!((b.available, b.rescored, b.quota), (9, 3, 2));
        assert_eq!(b.events.len(), 2);
        assert!(b.events.iter().all(|ev| ev.batch_index == 1));
    }

    #[test]
    fn batch_single_entry() {
        let mut e = engine_for("k", &["k"], &[], &loose(), 0.001);
        let b = e.select_batch().unwrap();
        assert_eq!((b.available, b.rescored, b.quota, b.events.len()), (1, 1, 1, 1));
        assert!(e.select_batch().is_none());
    }

    #[test]
    fn batch_dedups_identical_lines() {
        let others: Vec<String> = (0..14).map(|i| format!("you w{i}")).collect();
        let mut avail = vec!["Thank you ."; 3];
        avail.extend(others.iter().map(String::as_str));
        // A = 17 lines with "you": rescore 5, select 3. The three copies of
        // "Thank you ." have the best ΔH, so two of them are returned.
        let mut e = engine_for(
            "Thank you . Thank you . you you you",
            &avail,
            &[],
            &SquashConfig::new(1, 0.5, 1.0 + 1e-9).unwrap(),
            0.001,
        );
        let mut batches = Vec::new();
        while let Some(b) = e.select_batch() {
            batches.push(b);
        }
        let first_thanks = batches
            .iter()
            .find(|b| b.events.iter().any(|ev| ev.sentence_id < 3))
            .unwrap();
        let thanks_in_batch = first_thanks.events.iter().filter(|ev| ev.sentence_id < 3).count();
        assert_eq!(thanks_in_batch, 1);
        let mut all: Vec<usize> = batches.iter().flat_map(|b| b.events.iter().map(|ev| ev.sentence_id)).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
        for b in &batches {
            let mut ids: Vec<usize> = b.events.iter().filter(|ev| ev.sentence_id < 3).map(|ev| ev.sentence_id).collect();
            ids.dedup();
            assert!(ids.len() <= 1);
            assert_eq!(b.events.len() + b.returned.len(), b.quota);
        }
        assert!(batches.iter().any(|b| b.returned.len() == 2));
        // Every copy is eventually selected, in different batches.
        for id in 0..3 {
            assert!(!e.is_alive(id));
        }
    }
}
