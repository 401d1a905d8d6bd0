//! Packed-bit sets of activated nodes.
//!
//! An [`ActiveSet`] is the boolean state vector of the cascade: node `k` is a
//! member exactly when its entry in the state vector is positive. Membership is
//! stored one bit per node in 64-bit words so that the matrix engine can run
//! OR-AND products a word at a time.

use std::fmt;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Subset of the node range `[0, universe)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ActiveSet {
    universe: usize,
    words: Vec<u64>,
}

impl ActiveSet {
    pub fn empty(universe: usize) -> Self {
        ActiveSet {
            universe,
            words: vec![0; words_for(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    /// The set `{node}`, i.e. the unit vector at `node`.
    pub fn singleton(universe: usize, node: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(node);
        s
    }

    /// Panics if any member is outside `[0, universe)`.
    pub fn from_nodes<I: IntoIterator<Item = usize>>(universe: usize, nodes: I) -> Self {
        let mut s = Self::empty(universe);
        for n in nodes {
            s.insert(n);
        }
        s
    }

    /// Builds a set from the low `universe` bits of `mask`. Bits at or above
    /// `universe` are ignored.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= WORD_BITS, "mask form only covers 64 nodes");
        let mut s = Self::empty(universe);
        if universe > 0 {
            let keep = if universe == WORD_BITS {
                u64::MAX
            } else {
                (1u64 << universe) - 1
            };
            s.words[0] = mask & keep;
        }
        s
    }

    /// The set as a bitmask; `None` above 64 nodes.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Size of the node range this set lives in.
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, node: usize) -> bool {
        node < self.universe && self.words[node / WORD_BITS] >> (node % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, node: usize) {
        assert!(
            node < self.universe,
            "node {node} outside universe of {}",
            self.universe
        );
        self.words[node / WORD_BITS] |= 1 << (node % WORD_BITS);
    }

    pub fn remove(&mut self, node: usize) {
        if node < self.universe {
            self.words[node / WORD_BITS] &= !(1 << (node % WORD_BITS));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn is_subset(&self, other: &ActiveSet) -> bool {
        self.universe == other.universe
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Whether the two sets share a member.
    #[inline]
    pub fn intersects_words(&self, words: &[u64]) -> bool {
        self.words.iter().zip(words).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn union_words(&mut self, words: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(words) {
            *a |= b;
        }
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }
}

impl fmt::Debug for ActiveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singleton_and_mask() {
        let s = ActiveSet::singleton(5, 3);
        assert_eq!(s.to_mask(), Some(0b1000));
        assert_eq!(ActiveSet::from_mask(5, 0b1000), s);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn spans_multiple_words() {
        let s = ActiveSet::from_nodes(130, [0, 63, 64, 129]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(s.to_mask(), None);
        assert!(!s.contains(128));
    }

    #[test]
    fn full_mask_at_word_boundary() {
        assert_eq!(ActiveSet::full(64).to_mask(), Some(u64::MAX));
        assert!(ActiveSet::from_mask(64, u64::MAX).is_full());
    }

    #[test]
    #[should_panic]
    fn insert_out_of_range_panics() {
        ActiveSet::empty(3).insert(3);
    }

    proptest! {
        #[test]
        fn mask_round_trip(universe in 1usize..=64, mask: u64) {
            let s = ActiveSet::from_mask(universe, mask);
            let back = ActiveSet::from_nodes(universe, s.iter());
            prop_assert_eq!(&back, &s);
            prop_assert!(s.iter().all(|n| n < universe));
        }
    }
}
