//! Transaction database and the classical support / confidence / lift measures.
//!
//! Supports are exposed both as exact counts and as `f64` fractions
//! (`count / n`). Thresholds elsewhere in the crate compare counts, so the
//! fractions are only used for reporting and ratios.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::itemset::{ItemId, Itemset};
use crate::tidset::TidSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoreError {
    #[error("item id {id} is outside the vocabulary of {size} items")]
    InvalidItem { id: ItemId, size: usize },
    #[error("antecedent and consequent share items")]
    Overlap,
    #[error("confidence undefined: antecedent {0:?} never occurs")]
    UndefinedConfidence(Vec<ItemId>),
    #[error("lift undefined: zero support on one side of the rule")]
    UndefinedLift,
    #[error("item {0} is not a target item")]
    NotTarget(ItemId),
    #[error("duplicate item ({feature}, {bin}) in vocabulary")]
    DuplicateItem { feature: String, bin: String },
    #[error("transaction {index} violates a case invariant: {reason}")]
    CaseInvariant { index: usize, reason: String },
}

/// Descriptor of one item: a `(feature, bin)` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemMeta {
    pub feature: String,
    pub bin: String,
    /// True iff this is the dedicated missing-value bin of `feature`.
    pub is_missing: bool,
    /// True iff this is a class-label item (benign or malignant).
    pub is_target: bool,
}

impl ItemMeta {
    pub fn new(feature: impl Into<String>, bin: impl Into<String>) -> Self {
        ItemMeta { feature: feature.into(), bin: bin.into(), is_missing: false, is_target: false }
    }

    pub fn missing(feature: impl Into<String>, bin: impl Into<String>) -> Self {
        ItemMeta { is_missing: true, ..Self::new(feature, bin) }
    }

    pub fn target(feature: impl Into<String>, bin: impl Into<String>) -> Self {
        ItemMeta { is_target: true, ..Self::new(feature, bin) }
    }

    /// `"Feature: bin"`, the display form used in reports.
    pub fn label(&self) -> String {
        format!("{}: {}", self.feature, self.bin)
    }
}

/// One case record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub items: Itemset,
}

/// Immutable encoded case database.
///
/// Keeps both the horizontal layout (sorted item list per transaction) and a
/// vertical one (a [`TidSet`] per item) that backs all counting.
#[derive(Clone, Debug)]
pub struct TransactionStore {
    vocabulary: Vec<ItemMeta>,
    transactions: Vec<Transaction>,
    tidsets: Vec<TidSet>,
    positive_target: Option<ItemId>,
}

impl TransactionStore {
    pub fn new(vocabulary: Vec<ItemMeta>, transactions: Vec<Itemset>) -> Result<Self, StoreError> {
        let size = vocabulary.len();
        let mut seen = rustc_hash::FxHashSet::default();
        for m in &vocabulary {
            if !seen.insert((m.feature.as_str(), m.bin.as_str())) {
                return Err(StoreError::DuplicateItem { feature: m.feature.clone(), bin: m.bin.clone() });
            }
        }
        let n = transactions.len();
        let mut tidsets = vec![TidSet::empty(n); size];
        for (tid, t) in transactions.iter().enumerate() {
            for id in t.iter() {
                if id.index() >= size {
                    return Err(StoreError::InvalidItem { id, size });
                }
                tidsets[id.index()].insert(tid);
            }
        }
        Ok(TransactionStore {
            vocabulary,
            transactions: transactions.into_iter().map(|items| Transaction { items }).collect(),
            tidsets,
            positive_target: None,
        })
    }

    /// Marks `id` as the positive (malignant) class item.
    pub fn with_positive_target(mut self, id: ItemId) -> Result<Self, StoreError> {
        let meta = self.meta(id)?;
        if !meta.is_target {
            return Err(StoreError::NotTarget(id));
        }
        self.positive_target = Some(id);
        Ok(self)
    }

    pub fn positive_target(&self) -> Option<ItemId> {
        self.positive_target
    }

    /// The target-flagged item that is not the positive one, if exactly one exists.
    pub fn negative_target(&self) -> Option<ItemId> {
        let pos = self.positive_target?;
        let mut others = self.item_ids().filter(|&i| i != pos && self.vocabulary[i.index()].is_target);
        match (others.next(), others.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn vocabulary(&self) -> &[ItemMeta] {
        &self.vocabulary
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn item_ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.vocabulary.len() as u32).map(ItemId)
    }

    pub fn meta(&self, id: ItemId) -> Result<&ItemMeta, StoreError> {
        self.vocabulary.get(id.index()).ok_or(StoreError::InvalidItem { id, size: self.vocabulary.len() })
    }

    pub fn find_item(&self, feature: &str, bin: &str) -> Option<ItemId> {
        self.vocabulary.iter().position(|m| m.feature == feature && m.bin == bin).map(|i| ItemId(i as u32))
    }

    pub fn tidset(&self, id: ItemId) -> Result<&TidSet, StoreError> {
        self.tidsets.get(id.index()).ok_or(StoreError::InvalidItem { id, size: self.vocabulary.len() })
    }

    pub fn check_ids(&self, s: &Itemset) -> Result<(), StoreError> {
        for id in s.iter() {
            self.meta(id)?;
        }
        Ok(())
    }

    /// Number of transactions containing every item of `s`.
    pub fn count(&self, s: &Itemset) -> Result<usize, StoreError> {
        self.check_ids(s)?;
        Ok(self.count_unchecked(s.as_slice()))
    }

    pub(crate) fn count_unchecked(&self, items: &[ItemId]) -> usize {
        match items {
            [] => self.len(),
            [a] => self.tidsets[a.index()].count(),
            [a, b] => self.tidsets[a.index()].intersection_count(&self.tidsets[b.index()]),
            [a, rest @ ..] => {
                let mut acc = self.tidsets[a.index()].clone();
                for b in rest {
                    acc.intersect_with(&self.tidsets[b.index()]);
                }
                acc.count()
            }
        }
    }

    /// Fraction of transactions containing `s`. The empty itemset has support 1.
    pub fn support(&self, s: &Itemset) -> Result<f64, StoreError> {
        let c = self.count(s)?;
        Ok(c as f64 / self.len() as f64)
    }

    /// `support(A ∪ C) / support(A)`, computed from counts.
    pub fn confidence(&self, antecedent: &Itemset, consequent: &Itemset) -> Result<f64, StoreError> {
        if !antecedent.is_disjoint(consequent) {
            return Err(StoreError::Overlap);
        }
        let a = self.count(antecedent)?;
        let ac = self.count(&antecedent.union(consequent))?;
        if a == 0 {
            return Err(StoreError::UndefinedConfidence(antecedent.as_slice().to_vec()));
        }
        Ok(ac as f64 / a as f64)
    }

    /// `confidence(A → C) / support(C)`.
    pub fn lift(&self, antecedent: &Itemset, consequent: &Itemset) -> Result<f64, StoreError> {
        if !antecedent.is_disjoint(consequent) {
            return Err(StoreError::Overlap);
        }
        let a = self.count(antecedent)?;
        let c = self.count(consequent)?;
        if a == 0 || c == 0 {
            return Err(StoreError::UndefinedLift);
        }
        let ac = self.count(&antecedent.union(consequent))?;
        let n = self.len() as f64;
        Ok((ac as f64 * n) / (a as f64 * c as f64))
    }

    /// Checks the per-case invariants of an encoded clinical store: exactly
    /// one target item and at most one item per feature in every transaction.
    pub fn validate_case_invariants(&self) -> Result<(), StoreError> {
        for (index, t) in self.transactions.iter().enumerate() {
            let targets = t.items.iter().filter(|i| self.vocabulary[i.index()].is_target).count();
            if targets != 1 {
                return Err(StoreError::CaseInvariant { index, reason: format!("{targets} target items") });
            }
            let mut features: Vec<&str> = t.items.iter().map(|i| self.vocabulary[i.index()].feature.as_str()).collect();
            features.sort_unstable();
            if let Some(w) = features.windows(2).find(|w| w[0] == w[1]) {
                return Err(StoreError::CaseInvariant { index, reason: format!("feature {:?} appears twice", w[0]) });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// T1={a,M}, T2={a,b,M}, T3={a}, T4={b}, T5={a,b,M} with a=0, b=1, M=2.
    pub(crate) fn toy_store() -> TransactionStore {
        let vocab = vec![ItemMeta::new("a", "yes"), ItemMeta::new("b", "yes"), ItemMeta::target("label", "M")];
        let tx = vec![
            Itemset::from_ids([0, 2]),
            Itemset::from_ids([0, 1, 2]),
            Itemset::from_ids([0]),
            Itemset::from_ids([1]),
            Itemset::from_ids([0, 1, 2]),
        ];
        TransactionStore::new(vocab, tx).unwrap().with_positive_target(ItemId(2)).unwrap()
    }

    fn set(ids: &[u32]) -> Itemset {
        Itemset::from_ids(ids.iter().copied())
    }

    #[test]
    fn toy_supports() {
        let s = toy_store();
        assert_eq!(s.support(&set(&[0, 2])).unwrap(), 3.0 / 5.0);
        assert_eq!(s.support(&Itemset::empty()).unwrap(), 1.0);
        assert_eq!(s.count(&set(&[0, 1, 2])).unwrap(), 2);
    }

    #[test]
    fn six_hundred_of_a_thousand() {
        let vocab = vec![ItemMeta::new("Composition", "solid"), ItemMeta::new("Composition", "cystic")];
        let tx = (0..1000).map(|i| if i < 600 { set(&[0]) } else { set(&[1]) }).collect();
        let s = TransactionStore::new(vocab, tx).unwrap();
        assert_eq!(s.support(&set(&[0])).unwrap(), 0.6);
    }

    #[test]
    fn toy_confidence_and_lift() {
        let s = toy_store();
        let m = set(&[2]);
        assert_eq!(s.confidence(&set(&[0]), &m).unwrap(), 0.75);
        assert_eq!(s.confidence(&Itemset::empty(), &m).unwrap(), 0.6);
        assert_eq!(s.confidence(&set(&[0, 1]), &m).unwrap(), 1.0);
        assert!((s.lift(&set(&[0]), &m).unwrap() - 1.25).abs() < 1e-15);
        assert!((s.lift(&set(&[1]), &m).unwrap() - 10.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn error_paths() {
        let s = toy_store();
        assert!(matches!(s.support(&set(&[7])), Err(StoreError::InvalidItem { .. })));
        assert_eq!(s.confidence(&set(&[0, 2]), &set(&[2])), Err(StoreError::Overlap));
        let vocab = vec![ItemMeta::new("a", "1"), ItemMeta::target("y", "M")];
        let never = TransactionStore::new(vocab, vec![set(&[1])]).unwrap();
        assert!(matches!(never.confidence(&set(&[0]), &set(&[1])), Err(StoreError::UndefinedConfidence(_))));
        assert_eq!(never.lift(&set(&[0]), &set(&[1])), Err(StoreError::UndefinedLift));
    }

    #[test]
    fn rejects_bad_construction() {
        let dup = vec![ItemMeta::new("a", "1"), ItemMeta::new("a", "1")];
        assert!(matches!(TransactionStore::new(dup, vec![]), Err(StoreError::DuplicateItem { .. })));
        let vocab = vec![ItemMeta::new("a", "1")];
        assert!(matches!(TransactionStore::new(vocab.clone(), vec![set(&[3])]), Err(StoreError::InvalidItem { .. })));
        let s = TransactionStore::new(vocab, vec![]).unwrap();
        assert_eq!(s.with_positive_target(ItemId(0)).unwrap_err(), StoreError::NotTarget(ItemId(0)));
    }

    #[test]
    fn case_invariants() {
        let vocab = vec![
            ItemMeta::new("f", "x"),
            ItemMeta::new("f", "y"),
            ItemMeta::target("label", "benign"),
            ItemMeta::target("label", "malignant"),
        ];
        let ok = TransactionStore::new(vocab.clone(), vec![set(&[0, 3]), set(&[1, 2])]).unwrap();
        ok.validate_case_invariants().unwrap();
        let ok = ok.with_positive_target(ItemId(3)).unwrap();
        assert_eq!(ok.negative_target(), Some(ItemId(2)));
        let two_bins = TransactionStore::new(vocab.clone(), vec![set(&[0, 1, 3])]).unwrap();
        assert!(two_bins.validate_case_invariants().is_err());
        let no_label = TransactionStore::new(vocab, vec![set(&[0])]).unwrap();
        assert!(no_label.validate_case_invariants().is_err());
    }
}
