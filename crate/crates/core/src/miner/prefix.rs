use std::ops::Range;

use crate::itemset::ItemId;

/// Groups a canonically sorted level of equal-length itemsets by their
/// prefix (all items but the last). Only members of one group are joined
/// when building the next level's candidates.
#[derive(Clone, Debug, Default)]
pub struct PrefixIndex {
    groups: Vec<Range<usize>>,
    /// `group_of[i]` is the index into `groups` for row `i` of the level.
    group_of: Vec<usize>,
}

impl PrefixIndex {
    /// `level` must be sorted and every row must have the same length >= 1.
    pub fn build<T: AsRef<[ItemId]>>(level: &[T]) -> Self {
        let mut groups: Vec<Range<usize>> = Vec::new();
        let mut group_of = Vec::with_capacity(level.len());
        for (i, row) in level.iter().enumerate() {
            let row = row.as_ref();
            let prefix = &row[..row.len() - 1];
            let same = match groups.last() {
                Some(g) => {
                    let prev = level[g.start].as_ref();
                    &prev[..prev.len() - 1] == prefix
                }
                None => false,
            };
            if same {
                groups.last_mut().unwrap().end = i + 1;
            } else {
                groups.push(i..i + 1);
            }
            group_of.push(groups.len() - 1);
        }
        PrefixIndex { groups, group_of }
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// The rows that share row `i`'s prefix and come after it.
    pub fn join_partners(&self, i: usize) -> Range<usize> {
        let g = &self.groups[self.group_of[i]];
        i + 1..g.end
    }

    /// Rows whose prefix equals `prefix`.
    pub fn lookup<T: AsRef<[ItemId]>>(&self, level: &[T], prefix: &[ItemId]) -> Option<Range<usize>> {
        let idx = self
            .groups
            .binary_search_by(|g| {
                let row = level[g.start].as_ref();
                row[..row.len() - 1].cmp(prefix)
            })
            .ok()?;
        Some(self.groups[idx].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ItemId> {
        v.iter().copied().map(ItemId).collect()
    }

    #[test]
    fn groups_by_prefix() {
        let level = vec![ids(&[1, 2, 3]), ids(&[1, 2, 5]), ids(&[1, 2, 7]), ids(&[1, 3, 4]), ids(&[2, 3, 4])];
        let idx = PrefixIndex::build(&level);
        assert_eq!(idx.groups(), &[0..3, 3..4, 4..5]);
        assert_eq!(idx.join_partners(0), 1..3);
        assert_eq!(idx.join_partners(2), 3..3);
        assert_eq!(idx.join_partners(3), 4..4);
        assert_eq!(idx.lookup(&level, &ids(&[1, 2])), Some(0..3));
        assert_eq!(idx.lookup(&level, &ids(&[1, 4])), None);
    }

    #[test]
    fn singletons_share_the_empty_prefix() {
        let level = vec![ids(&[1]), ids(&[4]), ids(&[9])];
        let idx = PrefixIndex::build(&level);
        assert_eq!(idx.groups(), &[0..3]);
        assert_eq!(idx.join_partners(0), 1..3);
    }
}
