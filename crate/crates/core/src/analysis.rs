//! Rule-pair attribution metrics.
//!
//! For an item `i`, a rule pair is two mined rules whose antecedents differ
//! exactly by `{i}`. Over all pairs of `i`:
//!
//! * CR  = conf(with i) / conf(without i), per pair;
//! * ACB = geometric mean of CR over pairs with `|ln CR| >= kappa`;
//! * PIC = share of all pairs (unfiltered) where confidence strictly rises.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::itemset::{ItemId, Itemset};
use crate::rule::Rule;
use crate::seed;
use crate::store::ItemMeta;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no rule pairs to aggregate")]
    EmptyInput,
    #[error("confidence ratio undefined: rule without the item has zero confidence")]
    UndefinedRatio,
    #[error("invalid analysis config: {0}")]
    InvalidConfig(String),
}

/// κ as printed in the source material.
pub const KAPPA_PRINTED: f64 = 0.223;
/// κ = ln(1/0.95) evaluated exactly (≈ 0.0513).
pub fn kappa_ln_inv_095() -> f64 {
    (1.0f64 / 0.95).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub kappa: f64,
    pub pic_threshold: f64,
    pub acb_threshold: f64,
    pub swarm_cap: usize,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { kappa: KAPPA_PRINTED, pic_threshold: 0.75, acb_threshold: 1.2, swarm_cap: 100, seed: 0 }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: &str| Err(AnalysisError::InvalidConfig(m.into()));
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return bad("kappa must be finite and non-negative");
        }
        if !self.pic_threshold.is_finite() || !self.acb_threshold.is_finite() {
            return bad("thresholds must be finite");
        }
        if self.swarm_cap == 0 {
            return bad("swarm_cap must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RulePair<'a> {
    pub item: ItemId,
    pub rule_with: &'a Rule,
    pub rule_without: &'a Rule,
    pub cr: f64,
}

/// `conf(with) / conf(without)`.
pub fn confidence_ratio(rule_with: &Rule, rule_without: &Rule) -> Result<f64, AnalysisError> {
    if rule_without.confidence <= 0.0 {
        return Err(AnalysisError::UndefinedRatio);
    }
    Ok(rule_with.confidence / rule_without.confidence)
}

/// Lookup of rules by antecedent.
pub struct RuleIndex<'a> {
    rules: &'a [Rule],
    by_antecedent: FxHashMap<&'a Itemset, &'a Rule>,
}

impl<'a> RuleIndex<'a> {
    /// `rules` must be deduplicated by antecedent; later duplicates are ignored.
    pub fn new(rules: &'a [Rule]) -> Self {
        let mut by_antecedent = FxHashMap::default();
        for r in rules {
            by_antecedent.entry(&r.antecedent).or_insert(r);
        }
        RuleIndex { rules, by_antecedent }
    }

    pub fn get(&self, antecedent: &Itemset) -> Option<&'a Rule> {
        self.by_antecedent.get(antecedent).copied()
    }

    /// Pairs for `item`, in rule order of the with-item rule. Pairs whose
    /// ratio is undefined are skipped.
    pub fn pairs_for(&self, item: ItemId) -> Vec<RulePair<'a>> {
        self.rules.iter().filter(|r| r.antecedent.contains(item)).filter_map(|r| self.pair(r, item)).collect()
    }

    fn pair(&self, rule_with: &'a Rule, item: ItemId) -> Option<RulePair<'a>> {
        let rule_without = self.get(&rule_with.antecedent.without(item))?;
        let cr = confidence_ratio(rule_with, rule_without).ok()?;
        Some(RulePair { item, rule_with, rule_without, cr })
    }

    /// Pairs for every item that has at least one, keyed by item.
    pub fn all_pairs(&self) -> BTreeMap<ItemId, Vec<RulePair<'a>>> {
        let mut out: BTreeMap<ItemId, Vec<RulePair<'a>>> = BTreeMap::new();
        for r in self.rules {
            for item in r.antecedent.iter() {
                if let Some(p) = self.pair(r, item) {
                    out.entry(item).or_default().push(p);
                }
            }
        }
        out
    }
}

/// Every rule pair for `item` among `rules`.
pub fn find_rule_pairs(rules: &[Rule], item: ItemId) -> Vec<RulePair<'_>> {
    RuleIndex::new(rules).pairs_for(item)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Acb {
    /// `None` when κ filtered out every pair.
    pub value: Option<f64>,
    pub n_kept: usize,
}

/// Geometric mean of the ratios with `|ln r| >= kappa`.
pub fn acb_of_ratios<I: IntoIterator<Item = f64>>(ratios: I, kappa: f64) -> Result<Acb, AnalysisError> {
    let mut total = 0usize;
    let mut kept = 0usize;
    let mut sum = 0.0;
    for r in ratios {
        total += 1;
        let l = r.ln();
        if l.abs() >= kappa {
            kept += 1;
            sum += l;
        }
    }
    if total == 0 {
        return Err(AnalysisError::EmptyInput);
    }
    let value = (kept > 0).then(|| (sum / kept as f64).exp());
    Ok(Acb { value, n_kept: kept })
}

pub fn acb(pairs: &[RulePair<'_>], kappa: f64) -> Result<Acb, AnalysisError> {
    acb_of_ratios(pairs.iter().map(|p| p.cr), kappa)
}

/// Share of `(conf_with, conf_without)` pairs with `conf_with > conf_without`.
pub fn pic_of_confidences<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<f64, AnalysisError> {
    let (mut up, mut total) = (0usize, 0usize);
    for (w, wo) in pairs {
        total += 1;
        if w > wo {
            up += 1;
        }
    }
    if total == 0 {
        return Err(AnalysisError::EmptyInput);
    }
    Ok(up as f64 / total as f64)
}

pub fn pic(pairs: &[RulePair<'_>]) -> Result<f64, AnalysisError> {
    pic_of_confidences(pairs.iter().map(|p| (p.rule_with.confidence, p.rule_without.confidence)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    /// ACB undefined (every pair filtered by κ).
    Unclassifiable,
    Low,
    Moderate,
    High,
}

/// High when both `pic >= pic_threshold` and `acb >= acb_threshold`,
/// Moderate when exactly one holds, Low otherwise.
pub fn classify(acb: Option<f64>, pic: f64, config: &AnalysisConfig) -> Tier {
    let Some(acb) = acb else { return Tier::Unclassifiable };
    match (pic >= config.pic_threshold, acb >= config.acb_threshold) {
        (true, true) => Tier::High,
        (false, false) => Tier::Low,
        _ => Tier::Moderate,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorMetrics {
    pub item: ItemId,
    pub n_pairs_total: usize,
    pub n_pairs_kept: usize,
    pub acb: Option<f64>,
    pub pic: f64,
    /// Every pair's CR, in pair order, before κ filtering.
    pub cr_values: Vec<f64>,
    pub tier: Tier,
}

impl IndicatorMetrics {
    pub fn from_pairs(item: ItemId, pairs: &[RulePair<'_>], config: &AnalysisConfig) -> Result<Self, AnalysisError> {
        let a = acb(pairs, config.kappa)?;
        let p = pic(pairs)?;
        Ok(IndicatorMetrics {
            item,
            n_pairs_total: pairs.len(),
            n_pairs_kept: a.n_kept,
            acb: a.value,
            pic: p,
            cr_values: pairs.iter().map(|p| p.cr).collect(),
            tier: classify(a.value, p, config),
        })
    }

    /// CR values surviving the κ filter.
    pub fn kept_cr_values(&self, kappa: f64) -> impl Iterator<Item = f64> + '_ {
        self.cr_values.iter().copied().filter(move |c| c.ln().abs() >= kappa)
    }
}

/// Metrics for every item with at least one rule pair, ordered by item id.
/// `eligible` restricts which items are reported.
pub fn analyze<F>(rules: &[Rule], config: &AnalysisConfig, eligible: F) -> Result<Vec<IndicatorMetrics>, AnalysisError>
where
    F: Fn(ItemId) -> bool + Sync,
{
    config.validate()?;
    let index = RuleIndex::new(rules);
    let groups: Vec<(ItemId, Vec<RulePair<'_>>)> =
        index.all_pairs().into_iter().filter(|(i, _)| eligible(*i)).collect();
    groups.par_iter().map(|(item, pairs)| IndicatorMetrics::from_pairs(*item, pairs, config)).collect()
}

/// Uniform sample without replacement of `min(cap, n)` values, kept in their
/// original order. Deterministic given `seed`.
pub fn swarm_sample(values: &[f64], cap: usize, seed: u64) -> Vec<f64> {
    if values.len() <= cap {
        return values.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, values.len(), cap).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| values[i]).collect()
}

/// `(label, value)` list that (de)serializes as a JSON object in list order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabelMap<V>(pub Vec<(String, V)>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for LabelMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Entries<V>(std::marker::PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for Entries<V> {
            type Value = LabelMap<V>;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("an object keyed by indicator label")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some(entry) = map.next_entry()? {
                    out.push(entry);
                }
                Ok(LabelMap(out))
            }
        }

        d.deserialize_map(Entries(std::marker::PhantomData))
    }
}

impl<V: Serialize> Serialize for LabelMap<V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub label: String,
    pub pic: f64,
    pub acb: f64,
    pub tier: Tier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub pic_threshold: f64,
    pub acb_threshold: f64,
    /// Histogram bars at or above this mean are highlighted.
    pub highlight: f64,
}

/// Input document for the scatter and distribution renderers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub scatter: Vec<ScatterPoint>,
    /// Every pair's ln CR per indicator.
    pub violin: LabelMap<Vec<f64>>,
    /// Every pair's CR per indicator.
    pub violin_cr: LabelMap<Vec<f64>>,
    /// At most `swarm_cap` κ-kept CR values per indicator.
    pub swarm: LabelMap<Vec<f64>>,
    /// ACB per indicator.
    pub histogram: LabelMap<f64>,
    pub thresholds: Thresholds,
}

/// Sorts indicators by descending ACB; undefined ACB last, ties by item id.
pub fn sort_by_acb(metrics: &mut [IndicatorMetrics]) {
    metrics.sort_by(|a, b| match (a.acb, b.acb) {
        (Some(x), Some(y)) => y.total_cmp(&x).then(a.item.cmp(&b.item)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.item.cmp(&b.item),
    });
}

/// Builds plot data for indicators with a defined ACB, in the given order.
/// Swarm samples use seed purpose `"swarm:<label>"`.
pub fn plot_data(metrics: &[IndicatorMetrics], vocabulary: &[ItemMeta], config: &AnalysisConfig) -> PlotData {
    let mut doc = PlotData {
        scatter: Vec::new(),
        violin: LabelMap::default(),
        violin_cr: LabelMap::default(),
        swarm: LabelMap::default(),
        histogram: LabelMap::default(),
        thresholds: Thresholds {
            pic_threshold: config.pic_threshold,
            acb_threshold: config.acb_threshold,
            highlight: config.acb_threshold,
        },
    };
    for m in metrics {
        let Some(acb) = m.acb else { continue };
        let label = vocabulary[m.item.index()].label();
        let kept: Vec<f64> = m.kept_cr_values(config.kappa).collect();
        let swarm = swarm_sample(&kept, config.swarm_cap, seed::derive(config.seed, &format!("swarm:{label}")));
        doc.scatter.push(ScatterPoint { label: label.clone(), pic: m.pic, acb, tier: m.tier });
        doc.violin.0.push((label.clone(), m.cr_values.iter().map(|c| c.ln()).collect()));
        doc.violin_cr.0.push((label.clone(), m.cr_values.clone()));
        doc.swarm.0.push((label.clone(), swarm));
        doc.histogram.0.push((label, acb));
    }
    doc
}
