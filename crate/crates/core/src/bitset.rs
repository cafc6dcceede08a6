//! Small fixed-capacity vertex sets.
//!
//! Heaps at desk scale rarely exceed a hundred vertices, so the words live
//! inline for up to 128 vertices and spill to the heap beyond that.

use smallvec::SmallVec;
use std::fmt;

const BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    words: SmallVec<[u64; 2]>,
}

impl VertexSet {
    /// Empty set able to hold vertices `0..capacity`.
    pub fn with_capacity(capacity: usize) -> Self {
        let n = capacity.div_ceil(BITS).max(1);
        VertexSet {
            words: SmallVec::from_elem(0, n),
        }
    }

    /// The set `{0, .., len - 1}`.
    pub fn full(len: usize) -> Self {
        let mut s = Self::with_capacity(len);
        for v in 0..len {
            s.insert(v);
        }
        s
    }

    pub fn from_iter_with_capacity(capacity: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::with_capacity(capacity);
        for v in it {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        let w = v / BITS;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (v % BITS);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if let Some(w) = self.words.get_mut(v / BITS) {
            *w &= !(1 << (v % BITS));
        }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / BITS)
            .is_some_and(|w| w & (1 << (v % BITS)) != 0)
    }

    pub fn without(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Number of elements shared with `other`.
    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().enumerate().all(|(i, &a)| {
            let b = other.words.get(i).copied().unwrap_or(0);
            a & !b == 0
        })
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * BITS + b)
            })
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_iterate() {
        let mut s = VertexSet::with_capacity(10);
        s.insert(3);
        s.insert(0);
        s.insert(9);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 9]);
        assert_eq!(s.len(), 3);
        s.remove(3);
        assert!(!s.contains(3));
        assert!(s.contains(9));
    }

    #[test]
    fn spills_past_two_words() {
        let mut s = VertexSet::with_capacity(4);
        s.insert(200);
        s.insert(5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![5, 200]);
        let t = VertexSet::full(201);
        assert!(s.is_subset(&t));
        assert!(!t.is_subset(&s));
        assert_eq!(s.intersection_len(&t), 2);
    }
}
