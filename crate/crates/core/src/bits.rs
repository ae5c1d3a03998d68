//! Word-level bit sets used for adjacency rows and vertex masks.

use serde::{Deserialize, Serialize};
use std::ops::Range;

pub const WORD_BITS: usize = u64::BITS as usize;

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Fixed-capacity bit set over `0..len`, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut set = BitSet { len, words };
        set.clear_tail();
        set
    }

    /// Bit set with exactly the bits of `range` turned on.
    pub fn from_range(len: usize, range: Range<usize>) -> Self {
        let mut set = BitSet::new(len);
        set.insert_range(range);
        set
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = BitSet::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && test_bit(&self.words, i)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
        }
    }

    pub fn insert_range(&mut self, range: Range<usize>) {
        assert!(range.end <= self.len);
        for_range_words(range, |w, mask| self.words[w] |= mask);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Popcount restricted to `range`.
    pub fn count_in(&self, range: Range<usize>) -> usize {
        count_range(&self.words, range)
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        and_count(&self.words, &other.words)
    }

    /// Keeps only the bits inside `range`.
    pub fn restrict_to(&mut self, range: Range<usize>) {
        let mut keep = vec![0u64; self.words.len()];
        for_range_words(range, |w, mask| keep[w] = mask);
        for (a, m) in self.words.iter_mut().zip(keep) {
            *a &= m;
        }
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

#[inline]
pub fn test_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Calls `f(word_index, mask)` for every word overlapped by `range`.
pub fn for_range_words(range: Range<usize>, mut f: impl FnMut(usize, u64)) {
    if range.start >= range.end {
        return;
    }
    let (first, last) = (range.start / WORD_BITS, (range.end - 1) / WORD_BITS);
    for w in first..=last {
        let lo = if w == first {
            range.start % WORD_BITS
        } else {
            0
        };
        let hi = if w == last {
            (range.end - 1) % WORD_BITS + 1
        } else {
            WORD_BITS
        };
        let mask = if hi - lo == WORD_BITS {
            u64::MAX
        } else {
            ((1u64 << (hi - lo)) - 1) << lo
        };
        f(w, mask);
    }
}

pub fn count_range(words: &[u64], range: Range<usize>) -> usize {
    let mut total = 0;
    for_range_words(range, |w, mask| {
        total += (words[w] & mask).count_ones() as usize
    });
    total
}

/// First set bit of `a & b` inside `range`.
pub fn first_common_in(a: &[u64], b: &[u64], range: Range<usize>) -> Option<usize> {
    let mut hit = None;
    for_range_words(range, |w, mask| {
        if hit.is_none() {
            let x = a[w] & b[w] & mask;
            if x != 0 {
                hit = Some(w * WORD_BITS + x.trailing_zeros() as usize);
            }
        }
    });
    hit
}

/// Extracts `len <= 64` bits starting at bit `start` as a little-endian mask.
#[inline]
pub fn extract_bits(words: &[u64], start: usize, len: usize) -> u64 {
    debug_assert!(len <= WORD_BITS);
    if len == 0 {
        return 0;
    }
    let w = start / WORD_BITS;
    let off = start % WORD_BITS;
    let mut x = words[w] >> off;
    if off != 0 && off + len > WORD_BITS {
        x |= words[w + 1] << (WORD_BITS - off);
    }
    if len < WORD_BITS {
        x &= (1u64 << len) - 1;
    }
    x
}

/// Iterator over set-bit positions of a word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl<'a> Ones<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            index: 0,
            current: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD_BITS + tz);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Set-bit positions of `words` inside `range`, ascending.
pub fn ones_in(words: &[u64], range: Range<usize>) -> OnesIn<'_> {
    OnesIn::new(words, range)
}

pub struct OnesIn<'a> {
    words: &'a [u64],
    index: usize,
    last: usize,
    end: usize,
    current: u64,
}

impl<'a> OnesIn<'a> {
    fn new(words: &'a [u64], range: Range<usize>) -> Self {
        if range.start >= range.end {
            return OnesIn {
                words,
                index: 0,
                last: 0,
                end: 0,
                current: 0,
            };
        }
        let index = range.start / WORD_BITS;
        let current = words[index] & (u64::MAX << (range.start % WORD_BITS));
        OnesIn {
            words,
            index,
            last: (range.end - 1) / WORD_BITS,
            end: range.end,
            current,
        }
    }
}

impl Iterator for OnesIn<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let pos = self.index * WORD_BITS + self.current.trailing_zeros() as usize;
                if pos >= self.end {
                    self.current = 0;
                    return None;
                }
                self.current &= self.current - 1;
                return Some(pos);
            }
            if self.index >= self.last {
                return None;
            }
            self.index += 1;
            self.current = self.words[self.index];
        }
    }
}

/// Set bits of a single word, lowest first.
#[inline]
pub fn word_ones(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let tz = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(tz)
        }
    })
}
