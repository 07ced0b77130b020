use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use confboost_core::analysis::{analyze, plot_data, sort_by_acb};
use confboost_core::binning::{bin_table, encode_dataset, read_tsh_csv, RawTable, RowCounts};
use confboost_core::miner::{beta_squared, prevalence};
use confboost_core::{generate_rules, mine_frequent, MinerConfig, Rule, TransactionStore};
use log::info;

use crate::artifacts::{self as art, *};
use crate::config::{MinConfidence, PipelineConfig};
use crate::error::{CliError, Result};
use crate::json;

/// Output directory layout.
#[derive(Clone, Debug)]
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        OutDir(path.into())
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.0.join(file)
    }

    pub fn root(&self) -> &Path {
        &self.0
    }

    fn create(&self) -> Result<()> {
        std::fs::create_dir_all(&self.0).map_err(|e| CliError::file(&self.0, e))
    }

    fn write_tracked(&self, file: &str, bytes: &[u8], digests: &mut BTreeMap<String, String>) -> Result<()> {
        art::write(&self.path(file), bytes)?;
        digests.insert(file.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn save_manifest(&self, m: &Manifest) -> Result<()> {
        art::write(&self.path(MANIFEST), &json::to_pretty(m).map_err(internal)?)
    }

    fn record_timing(&self, stage: &str, seconds: f64) -> Result<()> {
        let path = self.path(TIMINGS);
        let mut t: BTreeMap<String, f64> =
            std::fs::read(&path).ok().and_then(|b| serde_json::from_slice(&b).ok()).unwrap_or_default();
        t.insert(stage.to_string(), seconds);
        art::write(&path, &json::to_pretty(&t).map_err(internal)?)
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn digest_input(cfg_path: &Path, resolved: &Path) -> Result<(Vec<u8>, InputDigest)> {
    let bytes = std::fs::read(resolved).map_err(|e| CliError::file(resolved, e))?;
    let d = InputDigest { path: cfg_path.to_path_buf(), sha256: sha256_hex(&bytes) };
    Ok((bytes, d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinSummary {
    pub rows: RowCounts,
    pub n_items: usize,
}

/// Reads the input CSVs, bins every column and writes `binned.csv`,
/// `store.json` and a fresh manifest (downstream sections are dropped).
pub fn bin_stage(cfg: &PipelineConfig, out: &OutDir) -> Result<BinSummary> {
    let t0 = Instant::now();
    out.create()?;
    let cases_path = cfg.cases_path()?;
    let (cases_bytes, cases_digest) = digest_input(cfg.cases.as_deref().unwrap_or(&cases_path), &cases_path)?;
    let table = RawTable::from_csv(&cases_bytes[..], &cfg.na_tokens).map_err(|e| CliError::file(&cases_path, e))?;
    let (tsh, tsh_digest) = match (cfg.tsh.as_deref(), cfg.tsh_path()) {
        (Some(raw), Some(p)) => {
            let (bytes, d) = digest_input(raw, &p)?;
            (Some(read_tsh_csv(&bytes[..], &cfg.na_tokens).map_err(|e| CliError::file(&p, e))?), Some(d))
        }
        _ => (None, None),
    };
    let binning = cfg.binning();
    let ingested = bin_table(&table, tsh.as_ref(), &binning, cfg.seed)?;
    if ingested.rows.retained == 0 {
        return Err(CliError::Input(format!("{}: no rows left after filtering", cases_path.display())));
    }
    let store = encode_dataset(&ingested.dataset)?;
    store.validate_case_invariants().map_err(internal)?;

    let mut digests = BTreeMap::new();
    let mut binned = Vec::new();
    ingested.dataset.write_csv(&mut binned).map_err(internal)?;
    out.write_tracked(BINNED, &binned, &mut digests)?;
    let doc = StoreDoc::from_store(&store)?;
    out.write_tracked(STORE, &json::to_pretty(&doc).map_err(internal)?, &mut digests)?;

    let target = store.positive_target().ok_or_else(|| internal("store has no positive target"))?;
    let manifest = Manifest {
        bin: Some(BinSection {
            config: binning,
            seed: cfg.seed,
            cases: cases_digest,
            tsh: tsh_digest,
            rows: ingested.rows,
            positive_target: ItemRef::of(&store.vocabulary()[target.index()]),
            vocabulary: doc.vocabulary,
            artifacts: digests,
        }),
        ..Default::default()
    };
    out.save_manifest(&manifest)?;
    let r = ingested.rows;
    info!(
        "bin: {} rows loaded, {} dropped by label, {} invalid, {} retained; {} items ({:.2?})",
        r.loaded,
        r.dropped_label,
        r.dropped_invalid,
        r.retained,
        store.vocabulary().len(),
        t0.elapsed()
    );
    out.record_timing("bin", t0.elapsed().as_secs_f64())?;
    Ok(BinSummary { rows: r, n_items: store.vocabulary().len() })
}

/// Loads `store.json` after checking it is the one the manifest recorded
/// and, when the config carries columns, that it was binned from the same
/// inputs, columns and seed.
pub fn load_store(cfg: &PipelineConfig, out: &OutDir) -> Result<(TransactionStore, Manifest, String)> {
    let store_path = out.path(STORE);
    let bytes = art::read(&store_path, "bin")?;
    let manifest = Manifest::load(&out.path(MANIFEST), "bin")?;
    let stale = |reason: String| CliError::StaleArtifact { path: store_path.clone(), reason, stage: "bin" };
    let bin = manifest.bin.as_ref().ok_or_else(|| stale("manifest has no binning record".into()))?;
    let digest = sha256_hex(&bytes);
    if bin.artifacts.get(STORE) != Some(&digest) {
        return Err(stale("contents differ from the manifest record".into()));
    }
    if !cfg.columns.is_empty() {
        if bin.config != cfg.binning() || bin.seed != cfg.seed {
            return Err(stale("binning config or seed changed".into()));
        }
        let cases = cfg.cases_path()?;
        let (_, now) = digest_input(&bin.cases.path, &cases)?;
        if now.sha256 != bin.cases.sha256 {
            return Err(stale(format!("{} changed", cases.display())));
        }
        if let (Some(tsh), Some(rec)) = (cfg.tsh_path(), bin.tsh.as_ref()) {
            if digest_input(&rec.path, &tsh)?.1.sha256 != rec.sha256 {
                return Err(stale(format!("{} changed", tsh.display())));
            }
        }
        if cfg.tsh.is_some() != bin.tsh.is_some() {
            return Err(stale("TSH input added or removed".into()));
        }
    }
    let doc: StoreDoc = serde_json::from_slice(&bytes).map_err(|e| CliError::file(&store_path, e))?;
    Ok((doc.into_store()?, manifest, digest))
}

pub fn miner_config(cfg: &PipelineConfig, store: &TransactionStore) -> Result<MinerConfig> {
    let target = store.positive_target().ok_or_else(|| internal("store has no positive target"))?;
    let min = cfg.miner.min_support.resolve(store.len())?;
    let gamma = match cfg.miner.min_confidence {
        MinConfidence::BetaSquared => beta_squared(store, target),
        MinConfidence::Value(g) => g,
    };
    Ok(MinerConfig::for_store(store, min, gamma)?.with_max_k(cfg.miner.max_k))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MineSummary {
    pub min_support_count: usize,
    pub min_confidence: f64,
    pub level_sizes: Vec<usize>,
    pub n_rules: usize,
}

/// Mines frequent antecedents and rules from `store.json`, writing
/// `frequent.jsonl` and `rules.jsonl`.
pub fn mine_stage(cfg: &PipelineConfig, out: &OutDir) -> Result<MineSummary> {
    let t0 = Instant::now();
    let (store, mut manifest, store_digest) = load_store(cfg, out)?;
    let mc = miner_config(cfg, &store)?;
    let levels = mine_frequent(&store, &mc)?;
    let rules = generate_rules(&levels, &mc, cfg.miner.include_baseline);
    let mined = t0.elapsed();

    let n = store.len() as f64;
    let mut frequent = Vec::new();
    for f in levels.iter() {
        let line = FrequentLine {
            antecedent: refs(&store, &f.antecedent),
            size: f.antecedent.len(),
            joint_count: f.joint_count,
            antecedent_count: f.antecedent_count,
            support: f.joint_count as f64 / n,
        };
        json::write_line(&mut frequent, &line).map_err(internal)?;
    }
    let mut lines = Vec::new();
    for r in &rules {
        json::write_line(&mut lines, &RuleLine::of(&store, r)).map_err(internal)?;
    }
    let mut digests = BTreeMap::new();
    out.write_tracked(FREQUENT, &frequent, &mut digests)?;
    out.write_tracked(RULES, &lines, &mut digests)?;

    let summary = MineSummary {
        min_support_count: mc.min_support_count,
        min_confidence: mc.min_confidence,
        level_sizes: levels.level_sizes(),
        n_rules: rules.len(),
    };
    manifest.mine = Some(MineSection {
        settings: cfg.miner.clone(),
        min_support_count: mc.min_support_count,
        beta: prevalence(&store, mc.target),
        min_confidence: mc.min_confidence,
        store_sha256: store_digest,
        level_sizes: summary.level_sizes.clone(),
        n_frequent: levels.len(),
        n_rules: rules.len(),
        artifacts: digests,
    });
    manifest.analyze = None;
    out.save_manifest(&manifest)?;
    info!(
        "mine: min support {} rows, min confidence {:.6}; {} frequent antecedents (sizes {:?}), {} rules (mined in {:.2?}, total {:.2?})",
        mc.min_support_count,
        mc.min_confidence,
        levels.len(),
        summary.level_sizes,
        rules.len(),
        mined,
        t0.elapsed()
    );
    out.record_timing("mine", t0.elapsed().as_secs_f64())?;
    Ok(summary)
}

/// Parses `rules.jsonl` back into rules over the store's item ids. Every
/// rule must predict the positive target and its measures must match its
/// counts.
pub fn read_rules(store: &TransactionStore, path: &Path, bytes: &[u8]) -> Result<Vec<Rule>> {
    let target = store.positive_target().ok_or_else(|| internal("store has no positive target"))?;
    let target_count = store.tidset(target).map_err(internal)?.count();
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::file(path, e))?;
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let at = |m: String| CliError::file(path, format!("line {}: {m}", i + 1));
        let l: RuleLine = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
        let ids = |items: &[ItemRef]| -> Result<confboost_core::Itemset> {
            items
                .iter()
                .map(|r| store.find_item(&r.feature, &r.bin).ok_or_else(|| at(format!("unknown item {:?}", r.label()))))
                .collect::<Result<Vec<_>>>()
                .map(confboost_core::Itemset::new)
        };
        let antecedent = ids(&l.antecedent)?;
        let consequent = ids(&l.consequent)?;
        if consequent.as_slice() != [target] {
            return Err(at("consequent is not the positive target".into()));
        }
        let rule =
            Rule::from_counts(antecedent, consequent, l.joint_count, l.antecedent_count, target_count, store.len());
        if rule.confidence != l.confidence || rule.support != l.support || rule.lift != l.lift {
            return Err(at("measures do not match the counts".into()));
        }
        rules.push(rule);
    }
    Ok(rules)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeSummary {
    pub n_indicators: usize,
    pub tiers: BTreeMap<String, usize>,
}

/// Builds rule pairs from `rules.jsonl`, scores every eligible indicator
/// and writes `indicators.json` and `plotdata.json`.
pub fn analyze_stage(cfg: &PipelineConfig, out: &OutDir) -> Result<AnalyzeSummary> {
    let t0 = Instant::now();
    let (store, mut manifest, store_digest) = load_store(cfg, out)?;
    let rules_path = out.path(RULES);
    let bytes = art::read(&rules_path, "mine")?;
    let stale =
        |reason: &str| CliError::StaleArtifact { path: rules_path.clone(), reason: reason.into(), stage: "mine" };
    let mine = manifest.mine.as_ref().ok_or_else(|| stale("manifest has no mining record"))?;
    let rules_digest = sha256_hex(&bytes);
    if mine.artifacts.get(RULES) != Some(&rules_digest) {
        return Err(stale("contents differ from the manifest record"));
    }
    if mine.store_sha256 != store_digest {
        return Err(stale("store.json changed after mining"));
    }
    if !cfg.columns.is_empty() && mine.settings != cfg.miner {
        return Err(stale("miner settings changed"));
    }
    let rules = read_rules(&store, &rules_path, &bytes)?;

    let acfg = cfg.analysis.to_config(cfg.seed);
    let mc = miner_config(cfg, &store)?;
    let mut metrics = analyze(&rules, &acfg, |i| !mc.excluded.contains(&i) && Some(i) != store.positive_target())?;
    sort_by_acb(&mut metrics);
    let rows: Vec<IndicatorRow> = metrics.iter().map(|m| IndicatorRow::of(&store, m)).collect();
    let plot = plot_data(&metrics, store.vocabulary(), &acfg);

    let mut digests = BTreeMap::new();
    out.write_tracked(INDICATORS, &json::to_pretty(&rows).map_err(internal)?, &mut digests)?;
    out.write_tracked(PLOTDATA, &json::to_pretty(&plot).map_err(internal)?, &mut digests)?;
    let mut tiers = BTreeMap::new();
    for m in &metrics {
        *tiers.entry(format!("{:?}", m.tier)).or_insert(0) += 1;
    }
    manifest.analyze = Some(AnalyzeSection {
        settings: cfg.analysis.clone(),
        kappa: acfg.kappa,
        seed: cfg.seed,
        rules_sha256: rules_digest,
        n_indicators: metrics.len(),
        tiers: tiers.clone(),
        artifacts: digests,
    });
    out.save_manifest(&manifest)?;
    info!("analyze: {} indicators scored, tiers {:?} ({:.2?})", metrics.len(), tiers, t0.elapsed());
    out.record_timing("analyze", t0.elapsed().as_secs_f64())?;
    Ok(AnalyzeSummary { n_indicators: metrics.len(), tiers })
}

pub fn run_pipeline(cfg: &PipelineConfig, out: &OutDir) -> Result<(BinSummary, MineSummary, AnalyzeSummary)> {
    let b = bin_stage(cfg, out)?;
    let m = mine_stage(cfg, out)?;
    let a = analyze_stage(cfg, out)?;
    Ok((b, m, a))
}

/// Prints indicators as a `Indicator | ACB | PIC` table, highest ACB first.
pub fn report<W: Write>(out: &OutDir, top: Option<usize>, w: &mut W) -> Result<()> {
    let path = out.path(INDICATORS);
    let bytes = art::read(&path, "analyze")?;
    if let Ok(m) = Manifest::load(&out.path(MANIFEST), "analyze") {
        let recorded = m.analyze.as_ref().and_then(|a| a.artifacts.get(INDICATORS));
        if recorded != Some(&sha256_hex(&bytes)) {
            return Err(CliError::StaleArtifact {
                path,
                reason: "contents differ from the manifest record".into(),
                stage: "analyze",
            });
        }
    }
    let mut rows: Vec<IndicatorRow> = serde_json::from_slice(&bytes).map_err(|e| CliError::file(&path, e))?;
    rows.sort_by(|a, b| match (a.acb, b.acb) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let io = |e: std::io::Error| internal(e);
    writeln!(w, "Indicator | ACB | PIC").map_err(io)?;
    writeln!(w, "--- | --- | ---").map_err(io)?;
    for r in rows.iter().take(top.unwrap_or(usize::MAX)) {
        let acb = r.acb.map_or_else(|| "n/a".to_string(), |a| format!("{a:.3}"));
        writeln!(w, "{}: {} | {} | {:.3}", r.feature, r.bin, acb, r.pic).map_err(io)?;
    }
    Ok(())
}
