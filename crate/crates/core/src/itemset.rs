use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense index into an item vocabulary. The total order on ids is the
/// canonical itemset order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for ItemId {
    fn from(v: u32) -> Self {
        ItemId(v)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A duplicate-free, ascending list of item ids.
///
/// Every constructor canonicalizes, so two itemsets are equal exactly when
/// their item lists are equal, and the derived `Ord` is lexicographic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<ItemId>", into = "Vec<ItemId>")]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = ItemId>>(items: I) -> Self {
        let mut v: Vec<ItemId> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Itemset(v)
    }

    /// Wraps a list that is already strictly ascending.
    ///
    /// Panics in debug builds if the list is not canonical.
    pub fn from_sorted(items: Vec<ItemId>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]), "itemset not canonical");
        Itemset(items)
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        Self::new(ids.into_iter().map(ItemId))
    }

    pub fn as_slice(&self) -> &[ItemId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<ItemId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn is_disjoint(&self, other: &Itemset) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Itemset(out)
    }

    pub fn with(&self, item: ItemId) -> Itemset {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&item) {
            v.insert(pos, item);
        }
        Itemset(v)
    }

    pub fn without(&self, item: ItemId) -> Itemset {
        Itemset(self.0.iter().copied().filter(|&i| i != item).collect())
    }

    /// Canonical byte encoding (little-endian u32 per item), used as a memo key.
    pub fn key_bytes(&self) -> Box<[u8]> {
        encode_key(&self.0)
    }
}

pub(crate) fn encode_key(items: &[ItemId]) -> Box<[u8]> {
    let mut out = Vec::with_capacity(items.len() * 4);
    for it in items {
        out.extend_from_slice(&it.0.to_le_bytes());
    }
    out.into_boxed_slice()
}

/// Subset test over two strictly ascending slices.
pub fn is_sorted_subset(small: &[ItemId], big: &[ItemId]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for &s in small {
        while j < big.len() && big[j] < s {
            j += 1;
        }
        if j == big.len() || big[j] != s {
            return false;
        }
        j += 1;
    }
    true
}

impl From<Vec<ItemId>> for Itemset {
    fn from(v: Vec<ItemId>) -> Self {
        Itemset::new(v)
    }
}

impl From<Itemset> for Vec<ItemId> {
    fn from(s: Itemset) -> Self {
        s.0
    }
}

impl FromIterator<ItemId> for Itemset {
    fn from_iter<T: IntoIterator<Item = ItemId>>(iter: T) -> Self {
        Itemset::new(iter)
    }
}

impl<'a> IntoIterator for &'a Itemset {
    type Item = &'a ItemId;
    type IntoIter = std::slice::Iter<'a, ItemId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes() {
        let s = Itemset::from_ids([5, 1, 3, 1]);
        assert_eq!(s.as_slice(), &[ItemId(1), ItemId(3), ItemId(5)]);
    }

    #[test]
    fn set_ops() {
        let a = Itemset::from_ids([1, 3]);
        let b = Itemset::from_ids([1, 2, 3, 7]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(Itemset::empty().is_subset_of(&a));
        assert_eq!(a.union(&Itemset::from_ids([2, 9])), Itemset::from_ids([1, 2, 3, 9]));
        assert!(a.is_disjoint(&Itemset::from_ids([2, 9])));
        assert!(!a.is_disjoint(&b));
        assert_eq!(b.without(ItemId(2)), Itemset::from_ids([1, 3, 7]));
        assert_eq!(a.with(ItemId(2)), Itemset::from_ids([1, 2, 3]));
    }

    #[test]
    fn key_is_injective_on_order() {
        assert_ne!(Itemset::from_ids([1, 2]).key_bytes(), Itemset::from_ids([1, 3]).key_bytes());
        assert_eq!(Itemset::from_ids([2, 1]).key_bytes(), Itemset::from_ids([1, 2]).key_bytes());
    }
}
