//! Target-constrained apriori.
//!
//! The target (malignant) item is implicit: candidates are built over
//! antecedent items only, and an antecedent `A` is frequent when
//! `count(A ∪ {target}) >= min_support_count`. Since that count is
//! anti-monotone in `A`, the classical level-wise join and subset prune stay
//! sound and complete while every kept itemset contains the target.
//!
//! Sizes reported here are antecedent sizes; the itemset `A ∪ {target}` has
//! one more item.

mod cache;
mod oracle;
mod prefix;

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

pub use cache::SupportCache;
pub use oracle::{brute_force_mine, brute_force_rules, ORACLE_MAX_ITEMS};
pub use prefix::PrefixIndex;

use crate::itemset::{ItemId, Itemset};
use crate::rule::Rule;
use crate::store::TransactionStore;
use crate::tidset::TidSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinerError {
    #[error("store has no transactions")]
    EmptyStore,
    #[error("store has no positive target item")]
    NoTarget,
    #[error("target item {0} is not in the vocabulary")]
    TargetOutOfVocabulary(ItemId),
    #[error("invalid miner config: {0}")]
    InvalidConfig(String),
    #[error("brute-force oracle refuses {eligible} eligible items (limit {limit})")]
    OracleGuard { eligible: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinerConfig {
    /// Minimum `count(A ∪ {target})`, compared as an integer.
    pub min_support_count: usize,
    pub min_confidence: f64,
    pub target: ItemId,
    /// Items never allowed in an antecedent besides the target itself.
    pub excluded: BTreeSet<ItemId>,
    /// Largest antecedent size to mine.
    pub max_k: Option<usize>,
    /// Serve the subset prune from a [`SupportCache`] instead of recounting.
    pub use_cache: bool,
}

impl MinerConfig {
    /// Config for `store`'s positive target that excludes every missing-value
    /// bin and every other class-label item.
    pub fn for_store(
        store: &TransactionStore,
        min_support_count: usize,
        min_confidence: f64,
    ) -> Result<Self, MinerError> {
        let target = store.positive_target().ok_or(MinerError::NoTarget)?;
        let excluded = store
            .item_ids()
            .filter(|&i| {
                let m = &store.vocabulary()[i.index()];
                i != target && (m.is_missing || m.is_target)
            })
            .collect();
        Ok(MinerConfig { min_support_count, min_confidence, target, excluded, max_k: None, use_cache: true })
    }

    pub fn with_max_k(mut self, max_k: Option<usize>) -> Self {
        self.max_k = max_k;
        self
    }

    pub fn validate(&self, store: &TransactionStore) -> Result<(), MinerError> {
        if store.is_empty() {
            return Err(MinerError::EmptyStore);
        }
        if store.meta(self.target).is_err() {
            return Err(MinerError::TargetOutOfVocabulary(self.target));
        }
        if self.min_support_count < 1 {
            return Err(MinerError::InvalidConfig("min_support_count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(MinerError::InvalidConfig(format!("min_confidence {} outside [0, 1]", self.min_confidence)));
        }
        if self.excluded.contains(&self.target) {
            return Err(MinerError::InvalidConfig("target item is listed as excluded".into()));
        }
        if self.max_k == Some(0) {
            return Err(MinerError::InvalidConfig("max_k must be at least 1".into()));
        }
        Ok(())
    }

    /// Items allowed in antecedents, ascending.
    pub fn eligible_items(&self, store: &TransactionStore) -> Vec<ItemId> {
        store.item_ids().filter(|&i| i != self.target && !self.excluded.contains(&i)).collect()
    }
}

/// Prevalence of `target` in `store` (the baseline confidence `∅ → {target}`).
pub fn prevalence(store: &TransactionStore, target: ItemId) -> f64 {
    let c = store.tidset(target).map(|t| t.count()).unwrap_or(0);
    c as f64 / store.len() as f64
}

/// Confidence floor `β²`: a rule may lower the baseline confidence by at most
/// the same factor `1/β` by which it could raise it to 1.
pub fn beta_squared(store: &TransactionStore, target: ItemId) -> f64 {
    let b = prevalence(store, target);
    b * b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequentAntecedent {
    pub antecedent: Itemset,
    /// `count(antecedent ∪ {target})`
    pub joint_count: usize,
    /// `count(antecedent)`
    pub antecedent_count: usize,
}

/// Frequent antecedents grouped by size; `level(k)` holds size-`k`
/// antecedents in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTable {
    pub target: ItemId,
    /// Number of transactions in the mined store.
    pub n: usize,
    pub target_count: usize,
    levels: Vec<Vec<FrequentAntecedent>>,
}

impl LevelTable {
    pub(crate) fn from_levels(
        target: ItemId,
        n: usize,
        target_count: usize,
        mut levels: Vec<Vec<FrequentAntecedent>>,
    ) -> Self {
        while levels.last().is_some_and(|l| l.is_empty()) {
            levels.pop();
        }
        LevelTable { target, n, target_count, levels }
    }

    /// Antecedents of size `k` (1-based). Empty for sizes never reached.
    pub fn level(&self, k: usize) -> &[FrequentAntecedent] {
        k.checked_sub(1).and_then(|i| self.levels.get(i)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Largest antecedent size present.
    pub fn max_len(&self) -> usize {
        self.levels.len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FrequentAntecedent> {
        self.levels.iter().flatten()
    }

    /// True if every `(k-1)`-subset of each stored size-`k` antecedent is stored.
    pub fn is_downward_closed(&self) -> bool {
        let all: rustc_hash::FxHashSet<&Itemset> = self.iter().map(|f| &f.antecedent).collect();
        self.iter()
            .all(|f| f.antecedent.len() == 1 || f.antecedent.iter().all(|i| all.contains(&f.antecedent.without(i))))
    }
}

struct Node {
    items: Vec<ItemId>,
    tids: TidSet,
    joint: usize,
    ante: usize,
}

impl AsRef<[ItemId]> for Node {
    fn as_ref(&self) -> &[ItemId] {
        &self.items
    }
}

/// Mines every antecedent `A` over eligible items with
/// `count(A ∪ {target}) >= min_support_count`.
///
/// Candidate support counting inside a level runs on the current rayon pool;
/// the output does not depend on the number of workers.
pub fn mine_frequent(store: &TransactionStore, config: &MinerConfig) -> Result<LevelTable, MinerError> {
    config.validate(store)?;
    let target_tids = store.tidset(config.target).expect("validated");
    let target_count = target_tids.count();
    let min = config.min_support_count;
    let max_k = config.max_k.unwrap_or(usize::MAX);

    let mut current: Vec<Node> = config
        .eligible_items(store)
        .into_iter()
        .filter_map(|i| {
            let tids = store.tidset(i).expect("vocabulary item").clone();
            let joint = tids.intersection_count(target_tids);
            (joint >= min).then(|| Node { ante: tids.count(), items: vec![i], tids, joint })
        })
        .collect();

    let mut levels: Vec<Vec<FrequentAntecedent>> = Vec::new();
    let mut cache = SupportCache::new();
    let mut k = 1;
    while !current.is_empty() {
        let next = if k < max_k { extend_level(store, config, &current, &mut cache) } else { Vec::new() };
        levels.push(
            current
                .into_iter()
                .map(|n| FrequentAntecedent {
                    antecedent: Itemset::from_sorted(n.items),
                    joint_count: n.joint,
                    antecedent_count: n.ante,
                })
                .collect(),
        );
        current = next;
        k += 1;
    }
    Ok(LevelTable::from_levels(config.target, store.len(), target_count, levels))
}

/// Builds level `k+1` from the sorted level `k`.
fn extend_level(store: &TransactionStore, config: &MinerConfig, level: &[Node], cache: &mut SupportCache) -> Vec<Node> {
    let target_tids = store.tidset(config.target).expect("validated");
    let min = config.min_support_count;
    let k = level[0].items.len();

    // Only level k is ever queried by the prune, so older entries are dropped.
    if config.use_cache {
        cache.clear();
        for n in level {
            cache.insert(&n.items, n.joint);
        }
    }
    let cache: &SupportCache = cache;
    let index = PrefixIndex::build(level);

    let chunks: Vec<Vec<Node>> = (0..level.len())
        .into_par_iter()
        .map(|i| {
            let left = &level[i];
            let mut out = Vec::new();
            let mut buf: Vec<ItemId> = Vec::with_capacity(k + 2);
            for right in &level[index.join_partners(i)] {
                let last = right.items[k - 1];
                let mut items = Vec::with_capacity(k + 1);
                items.extend_from_slice(&left.items);
                items.push(last);
                if k >= 2 && !subsets_frequent(store, config, cache, &items, &mut buf, min) {
                    continue;
                }
                let tids = left.tids.intersect(store.tidset(last).expect("vocabulary item"));
                let joint = tids.intersection_count(target_tids);
                if joint >= min {
                    out.push(Node { ante: tids.count(), items, tids, joint });
                }
            }
            out
        })
        .collect();
    let next: Vec<Node> = chunks.into_iter().flatten().collect();
    debug_assert!(next.windows(2).all(|w| w[0].items < w[1].items));
    next
}

/// Checks the `(k)`-subsets of a `(k+1)`-candidate that drop one of its first
/// `k-1` items; the two join parents are frequent by construction.
fn subsets_frequent(
    store: &TransactionStore,
    config: &MinerConfig,
    cache: &SupportCache,
    items: &[ItemId],
    buf: &mut Vec<ItemId>,
    min: usize,
) -> bool {
    for skip in 0..items.len() - 2 {
        buf.clear();
        buf.extend(items.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &it)| it));
        let frequent = if config.use_cache {
            cache.get(buf).is_some()
        } else {
            let pos = buf.binary_search(&config.target).unwrap_or_else(|p| p);
            buf.insert(pos, config.target);
            store.count_unchecked(buf) >= min
        };
        if !frequent {
            return false;
        }
    }
    true
}

/// Emits `A → {target}` for every stored antecedent meeting the confidence
/// floor. With `include_empty_baseline`, the rule `∅ → {target}` (confidence
/// equal to the target's prevalence) comes first, provided `{target}` itself
/// meets both thresholds.
pub fn generate_rules(levels: &LevelTable, config: &MinerConfig, include_empty_baseline: bool) -> Vec<Rule> {
    debug_assert_eq!(levels.target, config.target);
    let consequent = Itemset::from_sorted(vec![levels.target]);
    let mut rules = Vec::with_capacity(levels.len() + 1);
    if include_empty_baseline && levels.n > 0 && levels.target_count >= config.min_support_count.max(1) {
        let beta = levels.target_count as f64 / levels.n as f64;
        if beta >= config.min_confidence {
            rules.push(Rule::from_counts(
                Itemset::empty(),
                consequent.clone(),
                levels.target_count,
                levels.n,
                levels.target_count,
                levels.n,
            ));
        }
    }
    for f in levels.iter() {
        let conf = f.joint_count as f64 / f.antecedent_count as f64;
        if conf >= config.min_confidence {
            rules.push(Rule::from_counts(
                f.antecedent.clone(),
                consequent.clone(),
                f.joint_count,
                f.antecedent_count,
                levels.target_count,
                levels.n,
            ));
        }
    }
    rules
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::tests::toy_store;
    use crate::store::ItemMeta;

    fn set(ids: &[u32]) -> Itemset {
        Itemset::from_ids(ids.iter().copied())
    }

    fn antecedents(t: &LevelTable) -> Vec<Itemset> {
        t.iter().map(|f| f.antecedent.clone()).collect()
    }

    #[test]
    fn toy_frequent_antecedents() {
        let store = toy_store();
        let cfg = MinerConfig::for_store(&store, 2, 0.0).unwrap();
        let t = mine_frequent(&store, &cfg).unwrap();
        assert_eq!(antecedents(&t), vec![set(&[0]), set(&[1]), set(&[0, 1])]);
        assert_eq!(t.level_sizes(), vec![2, 1]);
        assert_eq!(t.level(2)[0].joint_count, 2);
        assert_eq!(t.level(2)[0].antecedent_count, 2);
        assert!(t.is_downward_closed());
    }

    #[test]
    fn threshold_above_target_count_is_empty() {
        let store = toy_store();
        let cfg = MinerConfig::for_store(&store, 4, 0.0).unwrap();
        let t = mine_frequent(&store, &cfg).unwrap();
        assert!(t.is_empty());
        assert!(generate_rules(&t, &cfg, true).is_empty());
    }

    #[test]
    fn toy_rules() {
        let store = toy_store();
        let cfg = MinerConfig::for_store(&store, 2, 0.5).unwrap();
        let t = mine_frequent(&store, &cfg).unwrap();
        let rules = generate_rules(&t, &cfg, false);
        let got: Vec<(Itemset, f64)> = rules.iter().map(|r| (r.antecedent.clone(), r.confidence)).collect();
        assert_eq!(got, vec![(set(&[0]), 0.75), (set(&[1]), 2.0 / 3.0), (set(&[0, 1]), 1.0)]);
        let with_base = generate_rules(&t, &cfg, true);
        assert_eq!(with_base.len(), 4);
        assert!(with_base[0].antecedent.is_empty());
        assert_eq!(with_base[0].confidence, 0.6);
        assert_eq!(with_base[0].lift, 1.0);
    }

    #[test]
    fn zero_confidence_keeps_everything() {
        let store = toy_store();
        let cfg = MinerConfig::for_store(&store, 1, 0.0).unwrap();
        let t = mine_frequent(&store, &cfg).unwrap();
        assert_eq!(generate_rules(&t, &cfg, false).len(), t.len());
    }

    #[test]
    fn confidence_floor_at_259_of_1673() {
        // 259 malignant of 1673 cases.
        let vocab = vec![ItemMeta::target("label", "benign"), ItemMeta::target("label", "malignant")];
        let tx = (0..1673).map(|i| if i < 259 { set(&[1]) } else { set(&[0]) }).collect();
        let store = TransactionStore::new(vocab, tx).unwrap().with_positive_target(ItemId(1)).unwrap();
        assert!((prevalence(&store, ItemId(1)) - 0.15481).abs() < 5e-6);
        // (259/1673)² = 0.0239668…; the figure 0.023965 is within 5e-6 of it.
        assert!((beta_squared(&store, ItemId(1)) - 0.023965).abs() < 5e-6);
        assert_eq!(beta_squared(&store, ItemId(1)), (259.0f64 / 1673.0).powi(2));
    }

    #[test]
    fn excluded_items_never_appear() {
        let vocab = vec![
            ItemMeta::new("f", "x"),
            ItemMeta::missing("f", "N/A"),
            ItemMeta::target("label", "benign"),
            ItemMeta::target("label", "malignant"),
        ];
        let tx = vec![set(&[0, 3]), set(&[1, 3]), set(&[1, 3]), set(&[0, 2])];
        let store = TransactionStore::new(vocab, tx).unwrap().with_positive_target(ItemId(3)).unwrap();
        let cfg = MinerConfig::for_store(&store, 1, 0.0).unwrap();
        assert_eq!(cfg.excluded, [ItemId(1), ItemId(2)].into_iter().collect());
        let t = mine_frequent(&store, &cfg).unwrap();
        assert_eq!(antecedents(&t), vec![set(&[0])]);
    }

    #[test]
    fn config_errors() {
        let store = toy_store();
        let mut cfg = MinerConfig::for_store(&store, 1, 0.0).unwrap();
        cfg.target = ItemId(9);
        assert_eq!(mine_frequent(&store, &cfg), Err(MinerError::TargetOutOfVocabulary(ItemId(9))));
        let mut cfg = MinerConfig::for_store(&store, 0, 0.0).unwrap();
        assert!(matches!(mine_frequent(&store, &cfg), Err(MinerError::InvalidConfig(_))));
        cfg.min_support_count = 1;
        cfg.min_confidence = 1.5;
        assert!(matches!(mine_frequent(&store, &cfg), Err(MinerError::InvalidConfig(_))));
        let plain = TransactionStore::new(vec![ItemMeta::new("a", "1")], vec![set(&[0])]).unwrap();
        assert_eq!(MinerConfig::for_store(&plain, 1, 0.0), Err(MinerError::NoTarget));
    }

    #[test]
    fn max_k_caps_antecedent_size() {
        let store = toy_store();
        let cfg = MinerConfig::for_store(&store, 1, 0.0).unwrap().with_max_k(Some(1));
        let t = mine_frequent(&store, &cfg).unwrap();
        assert_eq!(t.max_len(), 1);
    }
}
