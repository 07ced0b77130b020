//! On-disk record types for the files the stages exchange.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use confboost_core::analysis::{IndicatorMetrics, Tier};
use confboost_core::binning::{BinningConfig, RowCounts};
use confboost_core::{ItemId, ItemMeta, Itemset, Rule, TransactionStore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{AnalysisSettings, MinerSettings};
use crate::error::{CliError, Result};

pub const BINNED: &str = "binned.csv";
pub const STORE: &str = "store.json";
pub const FREQUENT: &str = "frequent.jsonl";
pub const RULES: &str = "rules.jsonl";
pub const INDICATORS: &str = "indicators.json";
pub const PLOTDATA: &str = "plotdata.json";
pub const MANIFEST: &str = "manifest.json";
pub const TIMINGS: &str = "timings.json";

/// The seven files a full run leaves in the output directory.
pub const ALL: [&str; 7] = [BINNED, STORE, FREQUENT, RULES, INDICATORS, PLOTDATA, MANIFEST];

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path, stage: &'static str) -> Result<Vec<u8>> {
    match std::fs::read(path) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(CliError::MissingArtifact { path: path.to_path_buf(), stage })
        }
        Err(e) => Err(CliError::file(path, e)),
    }
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::file(path, e))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItemRef {
    pub feature: String,
    pub bin: String,
}

impl ItemRef {
    pub fn of(meta: &ItemMeta) -> Self {
        ItemRef { feature: meta.feature.clone(), bin: meta.bin.clone() }
    }

    pub fn label(&self) -> String {
        format!("{}: {}", self.feature, self.bin)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub id: u32,
    pub feature: String,
    pub bin: String,
    pub is_missing: bool,
    pub is_target: bool,
    /// Rows carrying the item.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreDoc {
    pub n_transactions: usize,
    pub positive_target: u32,
    pub vocabulary: Vec<VocabEntry>,
    pub transactions: Vec<Vec<u32>>,
}

pub fn vocabulary_entries(store: &TransactionStore) -> Vec<VocabEntry> {
    store
        .item_ids()
        .map(|id| {
            let m = &store.vocabulary()[id.index()];
            VocabEntry {
                id: id.0,
                feature: m.feature.clone(),
                bin: m.bin.clone(),
                is_missing: m.is_missing,
                is_target: m.is_target,
                count: store.tidset(id).map(|t| t.count()).unwrap_or(0),
            }
        })
        .collect()
}

impl StoreDoc {
    pub fn from_store(store: &TransactionStore) -> Result<Self> {
        let target =
            store.positive_target().ok_or_else(|| CliError::Internal("store has no positive target".into()))?;
        Ok(StoreDoc {
            n_transactions: store.len(),
            positive_target: target.0,
            vocabulary: vocabulary_entries(store),
            transactions: store.transactions().iter().map(|t| t.items.iter().map(|i| i.0).collect()).collect(),
        })
    }

    pub fn into_store(self) -> Result<TransactionStore> {
        let bad = |m: String| CliError::Input(format!("{STORE}: {m}"));
        for (i, v) in self.vocabulary.iter().enumerate() {
            if v.id as usize != i {
                return Err(bad(format!("vocabulary entry {i} has id {}", v.id)));
            }
        }
        if self.transactions.len() != self.n_transactions {
            return Err(bad(format!(
                "{} transactions listed, header says {}",
                self.transactions.len(),
                self.n_transactions
            )));
        }
        let vocab = self
            .vocabulary
            .into_iter()
            .map(|v| ItemMeta { feature: v.feature, bin: v.bin, is_missing: v.is_missing, is_target: v.is_target })
            .collect();
        let tx = self.transactions.into_iter().map(Itemset::from_ids).collect();
        TransactionStore::new(vocab, tx)
            .and_then(|s| s.with_positive_target(ItemId(self.positive_target)))
            .map_err(|e| bad(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequentLine {
    pub antecedent: Vec<ItemRef>,
    pub size: usize,
    pub joint_count: usize,
    pub antecedent_count: usize,
    pub support: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleLine {
    pub antecedent: Vec<ItemRef>,
    pub consequent: Vec<ItemRef>,
    pub joint_count: usize,
    pub antecedent_count: usize,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

pub fn refs(store: &TransactionStore, items: &Itemset) -> Vec<ItemRef> {
    items.iter().map(|i| ItemRef::of(&store.vocabulary()[i.index()])).collect()
}

impl RuleLine {
    pub fn of(store: &TransactionStore, r: &Rule) -> Self {
        RuleLine {
            antecedent: refs(store, &r.antecedent),
            consequent: refs(store, &r.consequent),
            joint_count: r.joint_count,
            antecedent_count: r.antecedent_count,
            support: r.support,
            confidence: r.confidence,
            lift: r.lift,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub feature: String,
    pub bin: String,
    pub n_pairs_total: usize,
    pub n_pairs_kept: usize,
    pub acb: Option<f64>,
    pub pic: f64,
    pub tier: Tier,
}

impl IndicatorRow {
    pub fn of(store: &TransactionStore, m: &IndicatorMetrics) -> Self {
        let meta = &store.vocabulary()[m.item.index()];
        IndicatorRow {
            feature: meta.feature.clone(),
            bin: meta.bin.clone(),
            n_pairs_total: m.n_pairs_total,
            n_pairs_kept: m.n_pairs_kept,
            acb: m.acb,
            pic: m.pic,
            tier: m.tier,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    /// As written in the config or on the command line.
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinSection {
    pub config: BinningConfig,
    pub seed: u64,
    pub cases: InputDigest,
    pub tsh: Option<InputDigest>,
    pub rows: RowCounts,
    pub positive_target: ItemRef,
    pub vocabulary: Vec<VocabEntry>,
    /// File name to SHA-256 of the bytes written.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MineSection {
    pub settings: MinerSettings,
    pub min_support_count: usize,
    /// Prevalence of the positive class.
    pub beta: f64,
    pub min_confidence: f64,
    pub store_sha256: String,
    /// Frequent antecedents per size, starting at size 1.
    pub level_sizes: Vec<usize>,
    pub n_frequent: usize,
    pub n_rules: usize,
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSection {
    pub settings: AnalysisSettings,
    pub kappa: f64,
    pub seed: u64,
    pub rules_sha256: String,
    pub n_indicators: usize,
    pub tiers: BTreeMap<String, usize>,
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Tool { name: "confboost".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

/// Run record, merged stage by stage. Timings live in `timings.json` so the
/// manifest bytes depend only on inputs, config and seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: Tool,
    pub bin: Option<BinSection>,
    pub mine: Option<MineSection>,
    pub analyze: Option<AnalyzeSection>,
}

impl Manifest {
    pub fn load(path: &Path, stage: &'static str) -> Result<Self> {
        let bytes = read(path, stage)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::file(path, e))
    }

    pub fn load_or_default(path: &Path) -> Result<Self> {
        if path.exists() {
            Self::load(path, "bin")
        } else {
            Ok(Manifest::default())
        }
    }
}
