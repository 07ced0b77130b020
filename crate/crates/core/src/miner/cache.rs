use rustc_hash::FxHashMap;

use crate::itemset::{encode_key, ItemId};
use crate::store::TransactionStore;

/// Memo from an itemset's canonical byte encoding to its support count.
///
/// A pure memo: a cached value always equals what a fresh count returns,
/// so entries may be dropped at any time without changing results.
#[derive(Debug, Default)]
pub struct SupportCache {
    map: FxHashMap<Box<[u8]>, usize>,
    hits: u64,
    misses: u64,
}

impl SupportCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, items: &[ItemId]) -> Option<usize> {
        self.map.get(&encode_key(items)[..]).copied()
    }

    pub fn insert(&mut self, items: &[ItemId], count: usize) {
        self.map.insert(encode_key(items), count);
    }

    /// Count of `items` in `store`, served from the memo when present.
    pub fn count(&mut self, store: &TransactionStore, items: &[ItemId]) -> usize {
        let key = encode_key(items);
        if let Some(&c) = self.map.get(&key) {
            self.hits += 1;
            return c;
        }
        self.misses += 1;
        let c = store.count_unchecked(items);
        self.map.insert(key, c);
        c
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }

    /// `(hits, misses)` of [`SupportCache::count`].
    pub fn stats(&self) -> (u64, u64) {
        (self.hits, self.misses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itemset::Itemset;

    #[test]
    fn memo_matches_fresh_count() {
        let store = crate::store::tests::toy_store();
        let mut cache = SupportCache::new();
        let s = Itemset::from_ids([0, 2]);
        assert_eq!(cache.count(&store, s.as_slice()), 3);
        assert_eq!(cache.count(&store, s.as_slice()), 3);
        assert_eq!(cache.stats(), (1, 1));
        assert_eq!(cache.get(s.as_slice()), Some(store.count(&s).unwrap()));
        cache.clear();
        assert!(cache.is_empty());
    }
}
