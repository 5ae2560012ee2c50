use std::sync::atomic::{AtomicU64, Ordering};

const WORD_BITS: usize = 64;

/// Dense single-level bitmask whose set operation is an atomic word OR, so
/// concurrent writers setting different bits of one word never lose updates.
#[derive(Debug, Default)]
pub struct AtomicBitmask {
    words: Vec<AtomicU64>,
    len: usize,
}

impl AtomicBitmask {
    pub fn new(len: usize) -> Self {
        Self {
            words: (0..len.div_ceil(WORD_BITS))
                .map(|_| AtomicU64::new(0))
                .collect(),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sets bit `i`; returns true if it was previously clear.
    #[inline]
    pub fn set(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        self.words[i / WORD_BITS].fetch_or(mask, Ordering::Relaxed) & mask == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS].load(Ordering::Relaxed) & (1u64 << (i % WORD_BITS)) != 0
    }

    pub fn word(&self, w: usize) -> u64 {
        self.words[w].load(Ordering::Relaxed)
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn clear(&mut self) {
        for w in &mut self.words {
            *w.get_mut() = 0;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words
            .iter()
            .map(|w| w.load(Ordering::Relaxed).count_ones() as usize)
            .sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|w| w.load(Ordering::Relaxed) == 0)
    }

    /// Set bits in ascending order.
    pub fn ones(&self) -> Ones<'_> {
        self.ones_in(0..self.len)
    }

    /// Set bits within `range`, ascending.
    pub fn ones_in(&self, range: std::ops::Range<usize>) -> Ones<'_> {
        let end = range.end.min(self.len);
        let start = range.start.min(end);
        let word_idx = start / WORD_BITS;
        let mut current = if start < end { self.word(word_idx) } else { 0 };
        current &= u64::MAX << (start % WORD_BITS);
        Ones {
            mask: self,
            word_idx,
            current,
            end,
        }
    }
}

impl Clone for AtomicBitmask {
    fn clone(&self) -> Self {
        Self {
            words: self
                .words
                .iter()
                .map(|w| AtomicU64::new(w.load(Ordering::Relaxed)))
                .collect(),
            len: self.len,
        }
    }
}

impl PartialEq for AtomicBitmask {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && (0..self.words.len()).all(|w| self.word(w) == other.word(w))
    }
}

impl Eq for AtomicBitmask {}

pub struct Ones<'a> {
    mask: &'a AtomicBitmask,
    word_idx: usize,
    current: u64,
    end: usize,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.word_idx * WORD_BITS + self.current.trailing_zeros() as usize;
                if bit >= self.end {
                    return None;
                }
                self.current &= self.current - 1;
                return Some(bit);
            }
            self.word_idx += 1;
            if self.word_idx * WORD_BITS >= self.end {
                return None;
            }
            self.current = self.mask.word(self.word_idx);
        }
    }
}
