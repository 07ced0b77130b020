//! Row filtering, per-column binning and encoding into a [`TransactionStore`].

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BinningConfig, ColumnConfig, ColumnType, Derived, Role};
use super::spec::{Binning, NA_LABEL};
use super::table::{RawTable, TshTable};
use super::tsh::{mean_tsh_score, tsh_trmssd};
use super::BinningError;
use crate::itemset::{ItemId, Itemset};
use crate::seed;
use crate::store::{ItemMeta, TransactionStore};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Feature,
    /// Class label column; `positive` indexes the malignant label.
    Target {
        positive: usize,
    },
}

/// One binned column: ordered non-N/A bin labels and each row's bin.
#[derive(Clone, Debug, PartialEq)]
pub struct BinnedColumn {
    pub name: String,
    pub kind: ColumnKind,
    pub labels: Vec<String>,
    pub assignment: Vec<Option<usize>>,
}

impl BinnedColumn {
    pub fn from_binning(name: impl Into<String>, kind: ColumnKind, b: Binning) -> Self {
        BinnedColumn { name: name.into(), kind, labels: b.labels, assignment: b.assignment }
    }

    pub fn label_of(&self, row: usize) -> &str {
        self.assignment[row].map_or(NA_LABEL, |b| self.labels[b].as_str())
    }

    /// Row count per bin in bin order, then the N/A bin (always listed).
    pub fn bin_counts(&self) -> Vec<(String, usize)> {
        let mut counts = vec![0usize; self.labels.len() + 1];
        for a in &self.assignment {
            counts[a.unwrap_or(self.labels.len())] += 1;
        }
        self.labels.iter().cloned().chain(std::iter::once(NA_LABEL.to_string())).zip(counts).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinnedDataset {
    pub case_ids: Vec<String>,
    pub columns: Vec<BinnedColumn>,
}

impl BinnedDataset {
    pub fn n_rows(&self) -> usize {
        self.case_ids.len()
    }

    /// `case_id` followed by each column's bin label.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<(), BinningError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("case_id").chain(self.columns.iter().map(|c| c.name.as_str())))?;
        for (r, id) in self.case_ids.iter().enumerate() {
            w.write_record(std::iter::once(id.as_str()).chain(self.columns.iter().map(|c| c.label_of(r))))?;
        }
        w.flush().map_err(|e| BinningError::Csv(e.to_string()))?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCounts {
    pub loaded: usize,
    /// Rows whose class label is listed under the target's `drop`.
    pub dropped_label: usize,
    /// Rows with an unknown class label, undeclared categorical code or
    /// out-of-range continuous value.
    pub dropped_invalid: usize,
    pub retained: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ingested {
    pub dataset: BinnedDataset,
    pub rows: RowCounts,
}

fn validate_config(table: &RawTable, cfg: &BinningConfig, tsh: Option<&TshTable>) -> Result<(), BinningError> {
    let err = |m: String| Err(BinningError::Config(m));
    let mut names = BTreeSet::new();
    for c in &cfg.columns {
        if !names.insert(c.name.as_str()) {
            return err(format!("column {:?} configured twice", c.name));
        }
        if c.derive.is_none() && table.column_index(&c.name).is_none() {
            return Err(BinningError::MissingColumn(c.name.clone()));
        }
    }
    let targets: Vec<&ColumnConfig> = cfg.columns.iter().filter(|c| c.role == Role::Target).collect();
    match targets.as_slice() {
        [t] => {
            if t.positive.is_none() || t.negative.is_none() || t.positive == t.negative {
                return err(format!("target {:?} needs distinct positive and negative values", t.name));
            }
        }
        [] => return err("no column has role target".into()),
        _ => return err("more than one column has role target".into()),
    }
    if cfg.columns.iter().filter(|c| c.role == Role::Id).count() > 1 {
        return err("more than one column has role id".into());
    }
    for c in cfg.columns.iter().filter(|c| c.role == Role::Feature) {
        if c.derive.is_some() {
            if !cfg.columns.iter().any(|c| c.role == Role::Id) {
                return err(format!("derived column {:?} needs an id column", c.name));
            }
            if tsh.is_none() {
                return err(format!("derived column {:?} needs a TSH series table", c.name));
            }
            if c.binspec.is_none() {
                return err(format!("derived column {:?} needs a binspec", c.name));
            }
            continue;
        }
        match c.kind {
            Some(ColumnType::Continuous) if c.binspec.is_none() => {
                return err(format!("continuous column {:?} needs a binspec", c.name))
            }
            None => return err(format!("feature column {:?} needs a type", c.name)),
            _ => {}
        }
        if let Some(s) = &c.binspec {
            s.validate()?;
        }
    }
    Ok(())
}

enum RowFate {
    Keep,
    DropLabel,
    DropInvalid,
}

/// Filters rows and bins every feature and the target column.
///
/// `seed` feeds k-means columns that do not pin their own seed, through
/// [`seed::derive`] with purpose `"kmeans:<column>"`.
pub fn bin_table(
    table: &RawTable,
    tsh: Option<&TshTable>,
    config: &BinningConfig,
    run_seed: u64,
) -> Result<Ingested, BinningError> {
    validate_config(table, config, tsh)?;
    let idx = |c: &ColumnConfig| table.column_index(&c.name);
    let target = config.columns.iter().find(|c| c.role == Role::Target).expect("validated");
    let ti = idx(target).expect("validated");
    let id_col = config.columns.iter().find(|c| c.role == Role::Id).and_then(idx);

    let mut rows = RowCounts { loaded: table.rows.len(), ..Default::default() };
    let mut kept: Vec<usize> = Vec::new();
    for (r, row) in table.rows.iter().enumerate() {
        let line = r + 2;
        let fate = row_fate(row, line, ti, target, config, table)?;
        match fate {
            RowFate::Keep => kept.push(r),
            RowFate::DropLabel => rows.dropped_label += 1,
            RowFate::DropInvalid => rows.dropped_invalid += 1,
        }
    }
    rows.retained = kept.len();

    let case_ids: Vec<String> = kept
        .iter()
        .map(|&r| match id_col {
            Some(i) => table.rows[r][i].clone().unwrap_or_default(),
            None => (r + 1).to_string(),
        })
        .collect();

    let binnable: Vec<&ColumnConfig> =
        config.columns.iter().filter(|c| matches!(c.role, Role::Feature | Role::Target)).collect();
    let columns = binnable
        .par_iter()
        .map(|c| bin_column(c, table, tsh, &kept, &case_ids, run_seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ingested { dataset: BinnedDataset { case_ids, columns }, rows })
}

fn row_fate(
    row: &[Option<String>],
    line: usize,
    ti: usize,
    target: &ColumnConfig,
    config: &BinningConfig,
    table: &RawTable,
) -> Result<RowFate, BinningError> {
    let label = row[ti].as_deref().ok_or_else(|| BinningError::MissingTarget { line, column: target.name.clone() })?;
    if target.drop.iter().any(|d| d == label) {
        return Ok(RowFate::DropLabel);
    }
    if Some(label) != target.positive.as_deref() && Some(label) != target.negative.as_deref() {
        return Ok(RowFate::DropInvalid);
    }
    for c in config.columns.iter().filter(|c| c.role == Role::Feature && c.derive.is_none()) {
        let Some(cell) = row[table.column_index(&c.name).expect("validated")].as_deref() else { continue };
        match c.kind {
            Some(ColumnType::Categorical) => {
                if let Some(levels) = &c.levels {
                    if !levels.iter().any(|l| l.code() == cell) {
                        return Ok(RowFate::DropInvalid);
                    }
                }
            }
            Some(ColumnType::Continuous) => {
                let v = parse_number(cell, line, &c.name)?;
                if let Some((lo, hi)) = c.range {
                    if v < lo || v > hi {
                        return Ok(RowFate::DropInvalid);
                    }
                }
            }
            None => {}
        }
    }
    Ok(RowFate::Keep)
}

fn parse_number(cell: &str, line: usize, column: &str) -> Result<f64, BinningError> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(BinningError::Parse {
            line,
            column: column.to_string(),
            message: format!("cannot parse {cell:?} as a finite number"),
        }),
    }
}

fn bin_column(
    c: &ColumnConfig,
    table: &RawTable,
    tsh: Option<&TshTable>,
    kept: &[usize],
    case_ids: &[String],
    run_seed: u64,
) -> Result<BinnedColumn, BinningError> {
    let col_seed = seed::derive(run_seed, &format!("kmeans:{}", c.name));
    if c.role == Role::Target {
        let ti = table.column_index(&c.name).expect("validated");
        let neg = c.negative.clone().expect("validated");
        let pos = c.positive.clone().expect("validated");
        let assignment =
            kept.iter().map(|&r| Some(usize::from(table.rows[r][ti].as_deref() == Some(pos.as_str())))).collect();
        return Ok(BinnedColumn {
            name: c.name.clone(),
            kind: ColumnKind::Target { positive: 1 },
            labels: vec![neg, pos],
            assignment,
        });
    }
    if let Some(d) = c.derive {
        let tsh = tsh.expect("validated");
        let values: Vec<Option<f64>> = case_ids
            .iter()
            .map(|id| {
                tsh.get(id).and_then(|s| match d {
                    Derived::TshMean => Some(mean_tsh_score(s)),
                    Derived::TshTrmssd => tsh_trmssd(s),
                })
            })
            .collect();
        let b = c.binspec.as_ref().expect("validated").apply(&values, col_seed)?;
        return Ok(BinnedColumn::from_binning(&c.name, ColumnKind::Feature, b));
    }
    let ci = table.column_index(&c.name).expect("validated");
    let cells: Vec<Option<&str>> = kept.iter().map(|&r| table.rows[r][ci].as_deref()).collect();
    let b = match c.kind.expect("validated") {
        ColumnType::Categorical => {
            let (codes, labels): (Vec<String>, Vec<String>) = match &c.levels {
                Some(levels) => levels.iter().map(|l| (l.code().to_string(), l.label().to_string())).unzip(),
                None => {
                    let set: BTreeSet<&str> = cells.iter().flatten().copied().collect();
                    set.into_iter().map(|s| (s.to_string(), s.to_string())).unzip()
                }
            };
            let assignment =
                cells.iter().map(|cell| cell.map(|v| codes.iter().position(|c| c == v).expect("filtered"))).collect();
            Binning { labels, assignment }
        }
        ColumnType::Continuous => {
            let values = cells
                .iter()
                .zip(kept)
                .map(|(cell, &r)| cell.map(|v| parse_number(v, r + 2, &c.name)).transpose())
                .collect::<Result<Vec<_>, _>>()?;
            c.binspec.as_ref().expect("validated").apply(&values, col_seed)?
        }
    };
    Ok(BinnedColumn::from_binning(&c.name, ColumnKind::Feature, b))
}

/// Numbers the occupied `(column, bin)` pairs in column order then bin order
/// (N/A last) and turns each row into a transaction.
pub fn encode_dataset(binned: &BinnedDataset) -> Result<TransactionStore, BinningError> {
    let n_targets = binned.columns.iter().filter(|c| matches!(c.kind, ColumnKind::Target { .. })).count();
    if n_targets != 1 {
        return Err(BinningError::Config(format!("expected one target column, found {n_targets}")));
    }
    let mut vocab = Vec::new();
    // item_of[col][bin], with the N/A bin at index labels.len()
    let mut item_of: Vec<Vec<Option<ItemId>>> = Vec::with_capacity(binned.columns.len());
    let mut positive = None;
    for c in &binned.columns {
        let mut occupied = vec![false; c.labels.len() + 1];
        for a in &c.assignment {
            occupied[a.unwrap_or(c.labels.len())] = true;
        }
        let is_target = matches!(c.kind, ColumnKind::Target { .. });
        let mut ids = vec![None; c.labels.len() + 1];
        for (b, _) in occupied.iter().enumerate().filter(|(_, &o)| o) {
            let id = ItemId(vocab.len() as u32);
            ids[b] = Some(id);
            if b == c.labels.len() {
                vocab.push(ItemMeta { is_target, ..ItemMeta::missing(&c.name, NA_LABEL) });
            } else {
                vocab.push(ItemMeta { is_target, ..ItemMeta::new(&c.name, &c.labels[b]) });
            }
            if let ColumnKind::Target { positive: p } = c.kind {
                if p == b {
                    positive = Some(id);
                }
            }
        }
        item_of.push(ids);
    }
    let mut transactions = Vec::with_capacity(binned.n_rows());
    for r in 0..binned.n_rows() {
        let mut items = Vec::with_capacity(binned.columns.len());
        for (c, ids) in binned.columns.iter().zip(&item_of) {
            if matches!(c.kind, ColumnKind::Target { .. }) && c.assignment[r].is_none() {
                return Err(BinningError::MissingTarget { line: r + 2, column: c.name.clone() });
            }
            items.push(ids[c.assignment[r].unwrap_or(c.labels.len())].expect("occupied"));
        }
        transactions.push(Itemset::new(items));
    }
    let store = TransactionStore::new(vocab, transactions)?;
    match positive {
        Some(p) => Ok(store.with_positive_target(p)?),
        None => Ok(store),
    }
}

/// `(feature, bin)` pairs of every transaction, in item order.
pub fn decode_store(store: &TransactionStore) -> Vec<Vec<(String, String)>> {
    store
        .transactions()
        .iter()
        .map(|t| {
            t.items
                .iter()
                .map(|i| {
                    let m = &store.vocabulary()[i.index()];
                    (m.feature.clone(), m.bin.clone())
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::config::{default_na_tokens, Level};
    use crate::binning::spec::{BinSpec, Cutpoints};
    use crate::binning::TshSeries;

    fn table(csv: &str) -> RawTable {
        RawTable::from_csv(csv.as_bytes(), &default_na_tokens()).unwrap()
    }

    fn config(columns: Vec<ColumnConfig>) -> BinningConfig {
        BinningConfig { na_tokens: default_na_tokens(), columns }
    }

    fn bmi_spec() -> BinSpec {
        BinSpec::Cutpoints(Cutpoints {
            boundaries: vec![18.5, 24.0, 28.0],
            labels: ["underweight", "normal", "overweight", "obese"].map(String::from).to_vec(),
        })
    }

    const TOY: &str = "id,margin,bmi,label\n\
        a,smooth,23.9,benign\n\
        b,lobulated,24.0,malignant\n\
        c,NA,30,benign\n\
        d,smooth,,MPU\n\
        e,weird,20,benign\n\
        f,lobulated,17,malignant\n";

    fn toy_config() -> BinningConfig {
        config(vec![
            ColumnConfig::new("id", Role::Id),
            ColumnConfig::categorical("margin", &["smooth", "lobulated", "irregular"]),
            ColumnConfig::continuous("bmi", bmi_spec()),
            ColumnConfig::target("label", "benign", "malignant", &["MPU"]),
        ])
    }

    #[test]
    fn filters_and_bins() {
        let ing = bin_table(&table(TOY), None, &toy_config(), 0).unwrap();
        assert_eq!(ing.rows, RowCounts { loaded: 6, dropped_label: 1, dropped_invalid: 1, retained: 4 });
        let d = &ing.dataset;
        assert_eq!(d.case_ids, vec!["a", "b", "c", "f"]);
        let margin: Vec<&str> = (0..4).map(|r| d.columns[0].label_of(r)).collect();
        assert_eq!(margin, vec!["smooth", "lobulated", NA_LABEL, "lobulated"]);
        let bmi: Vec<&str> = (0..4).map(|r| d.columns[1].label_of(r)).collect();
        assert_eq!(bmi, vec!["normal", "overweight", "obese", "underweight"]);
        for c in &d.columns {
            assert_eq!(c.bin_counts().iter().map(|b| b.1).sum::<usize>(), d.n_rows());
        }
    }

    #[test]
    fn encodes_only_occupied_bins() {
        let ing = bin_table(&table(TOY), None, &toy_config(), 0).unwrap();
        let store = encode_dataset(&ing.dataset).unwrap();
        let names: Vec<String> = store.vocabulary().iter().map(|m| m.label()).collect();
        assert_eq!(
            names,
            vec![
                "margin: smooth",
                "margin: lobulated",
                "margin: N/A",
                "bmi: underweight",
                "bmi: normal",
                "bmi: overweight",
                "bmi: obese",
                "label: benign",
                "label: malignant"
            ]
        );
        assert!(store.vocabulary()[2].is_missing);
        assert_eq!(store.positive_target(), Some(ItemId(8)));
        assert_eq!(store.negative_target(), Some(ItemId(7)));
        store.validate_case_invariants().unwrap();
    }

    #[test]
    fn minimal_table_has_four_items() {
        let t = table("f,y\nx,0\nz,1\n");
        let cfg = config(vec![ColumnConfig::categorical("f", &["x", "z"]), ColumnConfig::target("y", "0", "1", &[])]);
        let store = encode_dataset(&bin_table(&t, None, &cfg, 0).unwrap().dataset).unwrap();
        assert_eq!(store.vocabulary().len(), 4);
    }

    #[test]
    fn decode_round_trips() {
        let ing = bin_table(&table(TOY), None, &toy_config(), 0).unwrap();
        let store = encode_dataset(&ing.dataset).unwrap();
        let decoded = decode_store(&store);
        for (r, row) in decoded.iter().enumerate() {
            let expect: Vec<(String, String)> =
                ing.dataset.columns.iter().map(|c| (c.name.clone(), c.label_of(r).to_string())).collect();
            assert_eq!(row, &expect);
        }
    }

    #[test]
    fn coded_levels_and_sorted_fallback() {
        let t = table("f,g,y\n1,b,0\n2,a,1\n");
        let mut f = ColumnConfig::new("f", Role::Feature);
        f.kind = Some(ColumnType::Categorical);
        f.levels = Some(vec![
            Level::Coded { code: "1".into(), label: "Absent".into() },
            Level::Coded { code: "2".into(), label: "Present".into() },
        ]);
        let mut g = ColumnConfig::new("g", Role::Feature);
        g.kind = Some(ColumnType::Categorical);
        let cfg = config(vec![f, g, ColumnConfig::target("y", "0", "1", &[])]);
        let d = bin_table(&t, None, &cfg, 0).unwrap().dataset;
        assert_eq!(d.columns[0].labels, vec!["Absent", "Present"]);
        assert_eq!(d.columns[1].labels, vec!["a", "b"]);
        assert_eq!(d.columns[1].label_of(0), "b");
    }

    #[test]
    fn missing_target_value_is_an_error() {
        let t = table("f,y\nx,0\nx,NA\n");
        let cfg = config(vec![ColumnConfig::categorical("f", &["x"]), ColumnConfig::target("y", "0", "1", &[])]);
        assert_eq!(
            bin_table(&t, None, &cfg, 0).unwrap_err(),
            BinningError::MissingTarget { line: 3, column: "y".into() }
        );
    }

    #[test]
    fn config_errors() {
        let t = table("f,y\nx,0\n");
        let cfg = config(vec![ColumnConfig::categorical("f", &["x"])]);
        assert!(matches!(bin_table(&t, None, &cfg, 0), Err(BinningError::Config(_))));
        let cfg = config(vec![ColumnConfig::categorical("f", &["x"]), ColumnConfig::target("label", "0", "1", &[])]);
        assert_eq!(bin_table(&t, None, &cfg, 0).unwrap_err(), BinningError::MissingColumn("label".into()));
        let bad = table("f,y\nabc,0\n");
        let cfg = config(vec![ColumnConfig::continuous("f", bmi_spec()), ColumnConfig::target("y", "0", "1", &[])]);
        assert!(matches!(bin_table(&bad, None, &cfg, 0), Err(BinningError::Parse { line: 2, .. })));
    }

    #[test]
    fn range_drops_rows() {
        let t = table("f,y\n20,0\n900,1\n");
        let mut f = ColumnConfig::continuous("f", bmi_spec());
        f.range = Some((10.0, 80.0));
        let cfg = config(vec![f, ColumnConfig::target("y", "0", "1", &[])]);
        let ing = bin_table(&t, None, &cfg, 0).unwrap();
        assert_eq!(ing.rows.dropped_invalid, 1);
        assert_eq!(ing.rows.retained, 1);
    }

    #[test]
    fn derived_tsh_columns() {
        let t = table("id,y\nc1,0\nc2,1\nc3,0\n");
        let mut tsh = TshTable::new();
        tsh.insert("c1".into(), TshSeries::from_log(vec![(0.0, 1.0), (1.0, 3.0), (3.0, 3.0)]).unwrap());
        tsh.insert("c2".into(), TshSeries::from_log(vec![(0.0, 0.5)]).unwrap());
        let cut = |name: &str, derive| {
            let mut c = ColumnConfig::new(name, Role::Feature);
            c.derive = Some(derive);
            c.binspec = Some(BinSpec::Cutpoints(Cutpoints {
                boundaries: vec![1.0],
                labels: vec!["low".into(), "high".into()],
            }));
            c
        };
        let cfg = config(vec![
            ColumnConfig::new("id", Role::Id),
            cut("mean", Derived::TshMean),
            cut("rmssd", Derived::TshTrmssd),
            ColumnConfig::target("y", "0", "1", &[]),
        ]);
        let d = bin_table(&t, Some(&tsh), &cfg, 0).unwrap().dataset;
        let mean: Vec<&str> = (0..3).map(|r| d.columns[0].label_of(r)).collect();
        let rmssd: Vec<&str> = (0..3).map(|r| d.columns[1].label_of(r)).collect();
        assert_eq!(mean, vec!["high", "low", NA_LABEL]);
        assert_eq!(rmssd, vec!["high", NA_LABEL, NA_LABEL]);
        assert!(matches!(bin_table(&t, None, &cfg, 0), Err(BinningError::Config(_))));
    }
}
