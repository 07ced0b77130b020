//! Target-constrained association rule mining with rule-pair attribution.
//!
//! Pipeline: [`binning`] turns a case table into a [`TransactionStore`],
//! [`miner`] finds every frequent antecedent of the positive class item and
//! the rules they induce, and [`analysis`] scores each item by how the
//! confidence of otherwise-identical rules changes when the item is added.

pub mod analysis;
pub mod binning;
mod itemset;
pub mod miner;
pub mod numfmt;
mod rule;
pub mod seed;
mod store;
pub mod synth;
mod tidset;

pub use analysis::{AnalysisConfig, IndicatorMetrics, PlotData, RulePair, Tier};
pub use itemset::{is_sorted_subset, ItemId, Itemset};
pub use miner::{generate_rules, mine_frequent, LevelTable, MinerConfig};
pub use rule::Rule;
pub use store::{ItemMeta, StoreError, Transaction, TransactionStore};
pub use tidset::TidSet;
