//! Exhaustive reference miner used to check [`super::mine_frequent`].
//!
//! Enumerates every subset of the eligible items as a bitmask and counts it
//! by scanning all transactions; shares no counting code with the
//! level-wise miner.

use super::{FrequentAntecedent, LevelTable, MinerConfig, MinerError};
use crate::itemset::{ItemId, Itemset};
use crate::rule::Rule;
use crate::store::TransactionStore;

pub const ORACLE_MAX_ITEMS: usize = 20;

struct Masks {
    eligible: Vec<ItemId>,
    rows: Vec<(u32, bool)>,
}

fn masks(store: &TransactionStore, config: &MinerConfig) -> Result<Masks, MinerError> {
    config.validate(store)?;
    let eligible = config.eligible_items(store);
    if eligible.len() > ORACLE_MAX_ITEMS {
        return Err(MinerError::OracleGuard { eligible: eligible.len(), limit: ORACLE_MAX_ITEMS });
    }
    let rows = store
        .transactions()
        .iter()
        .map(|t| {
            let mut m = 0u32;
            let mut has_target = false;
            for id in t.items.iter() {
                if id == config.target {
                    has_target = true;
                } else if let Some(pos) = eligible.iter().position(|&e| e == id) {
                    m |= 1 << pos;
                }
            }
            (m, has_target)
        })
        .collect();
    Ok(Masks { eligible, rows })
}

fn counts(m: &Masks, subset: u32) -> (usize, usize) {
    let mut joint = 0;
    let mut ante = 0;
    for &(row, has_target) in &m.rows {
        if row & subset == subset {
            ante += 1;
            if has_target {
                joint += 1;
            }
        }
    }
    (joint, ante)
}

fn decode(m: &Masks, subset: u32) -> Itemset {
    Itemset::new((0..m.eligible.len()).filter(|b| subset & (1 << b) != 0).map(|b| m.eligible[b]))
}

/// Same contract as [`super::mine_frequent`], by exhaustive enumeration.
/// Refuses stores with more than [`ORACLE_MAX_ITEMS`] eligible items.
pub fn brute_force_mine(store: &TransactionStore, config: &MinerConfig) -> Result<LevelTable, MinerError> {
    let m = masks(store, config)?;
    let max_k = config.max_k.unwrap_or(usize::MAX);
    let mut levels: Vec<Vec<FrequentAntecedent>> = vec![Vec::new(); m.eligible.len()];
    for subset in 1u32..(1u32 << m.eligible.len()) {
        let size = subset.count_ones() as usize;
        if size > max_k {
            continue;
        }
        let (joint, ante) = counts(&m, subset);
        if joint >= config.min_support_count {
            levels[size - 1].push(FrequentAntecedent {
                antecedent: decode(&m, subset),
                joint_count: joint,
                antecedent_count: ante,
            });
        }
    }
    for l in &mut levels {
        l.sort_by(|a, b| a.antecedent.cmp(&b.antecedent));
    }
    let target_count = m.rows.iter().filter(|r| r.1).count();
    Ok(LevelTable::from_levels(config.target, store.len(), target_count, levels))
}

/// Rules by exhaustive enumeration, in the order [`super::generate_rules`]
/// emits them (baseline first, then by antecedent size, then canonically).
pub fn brute_force_rules(
    store: &TransactionStore,
    config: &MinerConfig,
    include_empty_baseline: bool,
) -> Result<Vec<Rule>, MinerError> {
    let m = masks(store, config)?;
    let n = store.len();
    let max_k = config.max_k.unwrap_or(usize::MAX);
    let target_count = m.rows.iter().filter(|r| r.1).count();
    let consequent = Itemset::new([config.target]);
    let mut rules = Vec::new();
    for subset in 0u32..(1u32 << m.eligible.len()) {
        let size = subset.count_ones() as usize;
        if size > max_k || (size == 0 && !include_empty_baseline) {
            continue;
        }
        let (joint, ante) = counts(&m, subset);
        if joint < config.min_support_count || joint == 0 {
            continue;
        }
        if (joint as f64 / ante as f64) < config.min_confidence {
            continue;
        }
        rules.push(Rule::from_counts(decode(&m, subset), consequent.clone(), joint, ante, target_count, n));
    }
    rules.sort_by(|a, b| a.antecedent.len().cmp(&b.antecedent.len()).then_with(|| a.antecedent.cmp(&b.antecedent)));
    Ok(rules)
}
