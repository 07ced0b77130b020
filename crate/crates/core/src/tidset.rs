/// Fixed-width bitset over transaction indices (the vertical layout of a store).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TidSet {
    words: Box<[u64]>,
}

impl TidSet {
    pub fn empty(n: usize) -> Self {
        TidSet { words: vec![0u64; n.div_ceil(64)].into_boxed_slice() }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, tid: usize) {
        self.words[tid / 64] |= 1u64 << (tid % 64);
    }

    pub fn contains(&self, tid: usize) -> bool {
        self.words[tid / 64] & (1u64 << (tid % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect(&self, other: &TidSet) -> TidSet {
        TidSet { words: self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect() }
    }

    pub fn intersect_with(&mut self, other: &TidSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= *b;
        }
    }

    /// `|self ∩ other|` without materializing the intersection.
    pub fn intersection_count(&self, other: &TidSet) -> usize {
        self.words.iter().zip(other.words.iter()).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_across_word_boundaries() {
        let mut a = TidSet::empty(130);
        let mut b = TidSet::empty(130);
        for i in [0, 63, 64, 129] {
            a.insert(i);
        }
        for i in [63, 64, 100] {
            b.insert(i);
        }
        assert_eq!(a.count(), 4);
        assert_eq!(a.intersection_count(&b), 2);
        assert_eq!(a.intersect(&b).count(), 2);
        assert!(a.contains(129) && !a.contains(128));
        assert_eq!(TidSet::full(130).count(), 130);
    }
}
