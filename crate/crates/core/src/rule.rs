use serde::{Deserialize, Serialize};

use crate::itemset::Itemset;

/// `antecedent → consequent` with its measures.
///
/// Counts are carried alongside the fractions so that every measure can be
/// recomputed exactly: `confidence = joint_count / antecedent_count`,
/// `support = joint_count / n`, `lift = confidence / (consequent_count / n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    pub joint_count: usize,
    pub antecedent_count: usize,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

impl Rule {
    /// Builds a rule from raw counts. `antecedent_count` and `consequent_count`
    /// must be positive.
    pub fn from_counts(
        antecedent: Itemset,
        consequent: Itemset,
        joint_count: usize,
        antecedent_count: usize,
        consequent_count: usize,
        n: usize,
    ) -> Rule {
        debug_assert!(antecedent.is_disjoint(&consequent));
        debug_assert!(antecedent_count > 0 && consequent_count > 0 && n > 0);
        let confidence = joint_count as f64 / antecedent_count as f64;
        let consequent_support = consequent_count as f64 / n as f64;
        Rule {
            antecedent,
            consequent,
            joint_count,
            antecedent_count,
            support: joint_count as f64 / n as f64,
            confidence,
            lift: confidence / consequent_support,
        }
    }
}
