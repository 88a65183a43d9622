use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::score::Sym;

/// Position of a sentence in the engine's record table.
pub(crate) type Slot = u32;

/// Live/selected flags over sentence slots. Selected sentences become ghosts
/// in every word list that still mentions them.
#[derive(Debug, Clone)]
pub struct AliveSet {
    alive: Vec<bool>,
    count: usize,
}

impl AliveSet {
    pub fn new(n: usize) -> Self {
        AliveSet {
            alive: vec![true; n],
            count: n,
        }
    }

    pub fn contains(&self, slot: Slot) -> bool {
        self.alive[slot as usize]
    }

    /// Returns false if the slot was already removed.
    pub fn remove(&mut self, slot: Slot) -> bool {
        let was = std::mem::replace(&mut self.alive[slot as usize], false);
        if was {
            self.count -= 1;
        }
        was
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ListEntry {
    pub gain: f64,
    pub slot: Slot,
}

impl ListEntry {
    pub fn key_cmp(&self, other: &ListEntry) -> Ordering {
        self.gain.total_cmp(&other.gain).then(self.slot.cmp(&other.slot))
    }
}

/// Sentences containing one kept word, best cached gain first.
#[derive(Debug, Clone, Default)]
pub(crate) struct WordList {
    pub entries: VecDeque<ListEntry>,
}

impl WordList {
    /// Pops selected sentences off the head of the list.
    pub fn prune_head(&mut self, alive: &AliveSet) {
        while let Some(e) = self.entries.front() {
            if alive.contains(e.slot) {
                break;
            }
            self.entries.pop_front();
        }
    }

    pub fn insert_sorted(&mut self, entry: ListEntry) {
        let pos = self
            .entries
            .partition_point(|e| e.key_cmp(&entry) == Ordering::Less);
        self.entries.insert(pos, entry);
    }

    pub fn remove_slot(&mut self, slot: Slot) -> bool {
        match self.entries.iter().position(|e| e.slot == slot) {
            Some(pos) => {
                self.entries.remove(pos);
                true
            }
            None => false,
        }
    }
}

/// Per kept word: the sentences containing it, ordered by cached gain.
#[derive(Debug, Clone, Default)]
pub struct WordIndex {
    pub(crate) lists: Vec<WordList>,
}

impl WordIndex {
    pub(crate) fn with_vocab(n: usize) -> Self {
        WordIndex {
            lists: vec![WordList::default(); n],
        }
    }

    pub(crate) fn list(&self, sym: Sym) -> &WordList {
        &self.lists[sym.index()]
    }

    pub(crate) fn list_mut(&mut self, sym: Sym) -> &mut WordList {
        &mut self.lists[sym.index()]
    }

    /// Number of entries (ghosts included) for `sym`.
    pub fn list_len(&self, sym: Sym) -> usize {
        self.lists.get(sym.index()).map_or(0, |l| l.entries.len())
    }

    pub(crate) fn sort_all(&mut self) {
        for list in &mut self.lists {
            list.entries.make_contiguous().sort_by(ListEntry::key_cmp);
        }
    }
}
