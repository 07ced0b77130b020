//! Synthetic data generators: a thyroid-nodule case table (22 indicators,
//! 102 items of which 19 are N/A bins, ~15.5% malignant) and small random
//! transaction stores for oracle and property tests.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::binning::{
    default_na_tokens, BinSpec, BinningConfig, ColumnConfig, ColumnType, Cutpoints, Derived, FixedWidth, Grid,
    KMeansBins, Level, RawTable, Role,
};
use crate::itemset::{ItemId, Itemset};
use crate::store::{ItemMeta, TransactionStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseTableSpec {
    /// Benign + malignant rows that survive filtering.
    pub retained: usize,
    pub malignant: usize,
    /// Rows labelled `MPU` (dropped at ingestion).
    pub undetermined: usize,
    /// Rows with an undeclared code or implausible value (dropped at ingestion).
    pub invalid: usize,
    pub seed: u64,
}

impl CaseTableSpec {
    /// 2091 loaded rows, 1673 retained, 259 malignant.
    pub fn study_sized(seed: u64) -> Self {
        CaseTableSpec { retained: 1673, malignant: 259, undetermined: 300, invalid: 118, seed }
    }

    pub fn demo(seed: u64) -> Self {
        CaseTableSpec { retained: 400, malignant: 80, undetermined: 25, invalid: 12, seed }
    }
}

pub struct SyntheticCases {
    pub cases: RawTable,
    /// `(case_id, timestamp, tsh)` rows; TSH may be `"NA"`.
    pub tsh: Vec<[String; 3]>,
    pub config: BinningConfig,
}

impl SyntheticCases {
    pub fn write_cases<W: std::io::Write>(&self, w: W) -> Result<(), crate::binning::BinningError> {
        self.cases.to_csv(w)
    }

    pub fn write_tsh<W: std::io::Write>(&self, w: W) -> Result<(), crate::binning::BinningError> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["case_id", "timestamp", "tsh"])?;
        for r in &self.tsh {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| crate::binning::BinningError::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Categorical indicator: name, level labels, benign and malignant level
/// probabilities, N/A rate.
struct Categorical {
    name: &'static str,
    levels: &'static [&'static str],
    benign: &'static [f64],
    malignant: &'static [f64],
    na: f64,
}

const CATEGORICAL: &[Categorical] = &[
    Categorical {
        name: "Envelope invasion",
        levels: &["Absent", "Present"],
        benign: &[0.99, 0.01],
        malignant: &[0.80, 0.20],
        na: 0.0,
    },
    Categorical {
        name: "Vascular invasion",
        levels: &["None", "≤4 vessels", ">4 vessels"],
        benign: &[0.985, 0.01, 0.005],
        malignant: &[0.80, 0.13, 0.07],
        na: 0.0,
    },
    Categorical {
        name: "Tumor envelope",
        levels: &["Complete", "Incomplete"],
        benign: &[0.95, 0.05],
        malignant: &[0.80, 0.20],
        na: 0.0,
    },
    Categorical {
        name: "Margin",
        levels: &["Smooth", "Lobulated", "Irregular", "Ill-defined", "Extrathyroidal extension"],
        benign: &[0.72, 0.08, 0.06, 0.12, 0.02],
        malignant: &[0.50, 0.18, 0.14, 0.13, 0.05],
        na: 0.06,
    },
    Categorical {
        name: "Trabecular pattern",
        levels: &["Absent", "Present"],
        benign: &[0.96, 0.04],
        malignant: &[0.86, 0.14],
        na: 0.12,
    },
    Categorical {
        name: "Echogenic foci",
        levels: &["None", "Microcalcifications", "Macrocalcifications", "Peripheral calcifications"],
        benign: &[0.78, 0.09, 0.09, 0.04],
        malignant: &[0.58, 0.15, 0.15, 0.12],
        na: 0.05,
    },
    Categorical {
        name: "Nodule-in-nodule pattern",
        levels: &["Absent", "Present"],
        benign: &[0.94, 0.06],
        malignant: &[0.82, 0.18],
        na: 0.10,
    },
    Categorical {
        name: "Halo",
        levels: &["None", "Thin even halo", "Thick even halo", "Uneven thickness halo"],
        benign: &[0.52, 0.28, 0.12, 0.08],
        malignant: &[0.40, 0.20, 0.14, 0.26],
        na: 0.07,
    },
    Categorical {
        name: "Echogenicity",
        levels: &["Hyperechoic", "Isoechoic", "Hypoechoic", "Markedly hypoechoic", "Anechoic"],
        benign: &[0.10, 0.45, 0.38, 0.04, 0.03],
        malignant: &[0.06, 0.32, 0.52, 0.08, 0.02],
        na: 0.04,
    },
    Categorical {
        name: "Hashimoto's thyroiditis",
        levels: &["Absent", "Present"],
        benign: &[0.80, 0.20],
        malignant: &[0.68, 0.32],
        na: 0.15,
    },
    Categorical {
        name: "Vascularity",
        levels: &[
            "None",
            "Peripheral vascularity",
            "Mainly central vascularity",
            "Mixed vascularity",
            "Diffuse vascularity",
        ],
        benign: &[0.15, 0.40, 0.14, 0.26, 0.05],
        malignant: &[0.08, 0.28, 0.26, 0.33, 0.05],
        na: 0.08,
    },
    Categorical {
        name: "Composition",
        levels: &["Solid", "Mostly solid", "Mostly cystic", "Spongiform"],
        benign: &[0.55, 0.28, 0.12, 0.05],
        malignant: &[0.68, 0.25, 0.05, 0.02],
        na: 0.05,
    },
    Categorical {
        name: "Shape",
        levels: &["Wider-than-tall", "Taller-than-wide"],
        benign: &[0.90, 0.10],
        malignant: &[0.86, 0.14],
        na: 0.06,
    },
    Categorical { name: "Sex", levels: &["Female", "Male"], benign: &[0.78, 0.22], malignant: &[0.70, 0.30], na: 0.02 },
    Categorical {
        name: "Cystic change",
        levels: &["Absent", "Present"],
        benign: &[0.66, 0.34],
        malignant: &[0.78, 0.22],
        na: 0.09,
    },
    Categorical {
        name: "Location",
        levels: &["Left lobe", "Right lobe", "Isthmus", "Bilateral"],
        benign: &[0.45, 0.45, 0.07, 0.03],
        malignant: &[0.44, 0.46, 0.07, 0.03],
        na: 0.03,
    },
];

const INVALID_CODE: &str = "9";

fn pick(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let mut u: f64 = rng.gen();
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

/// Builds a synthetic case table, its TSH history and the matching binning
/// config. Deterministic given `spec.seed`.
pub fn case_table(spec: &CaseTableSpec) -> SyntheticCases {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // 0 benign, 1 malignant, 2 undetermined, 3 invalid
    let mut kinds: Vec<u8> = Vec::new();
    kinds.extend(std::iter::repeat_n(1, spec.malignant));
    kinds.extend(std::iter::repeat_n(0, spec.retained - spec.malignant));
    kinds.extend(std::iter::repeat_n(2, spec.undetermined));
    kinds.extend(std::iter::repeat_n(3, spec.invalid));
    kinds.shuffle(&mut rng);

    let mut headers: Vec<String> =
        vec!["case_id".into(), "Max diameter".into(), "Mean diameter".into(), "BMI".into(), "Age".into()];
    headers.extend(CATEGORICAL.iter().map(|c| c.name.to_string()));
    headers.push("pathology".into());
    headers.push("notes".into());

    let base = NaiveDate::from_ymd_opt(2012, 1, 1).expect("valid date");
    let mut rows = Vec::with_capacity(kinds.len());
    let mut tsh = Vec::new();
    let mut first_retained = true;
    for (r, &kind) in kinds.iter().enumerate() {
        let id = format!("C{:05}", r + 1);
        let malignant = match kind {
            1 => true,
            0 => false,
            _ => rng.gen_bool(0.3),
        };
        let na = |rng: &mut ChaCha8Rng, p: f64| rng.gen_bool(p);
        let mut row: Vec<Option<String>> = vec![Some(id.clone())];

        let max_d = lognormal(&mut rng, if malignant { 2.8f64.ln() } else { 2.0f64.ln() }, 0.55).clamp(0.2, 12.0);
        let mean_d = max_d * rng.gen_range(0.6..0.95);
        row.push((!na(&mut rng, 0.04)).then(|| format!("{max_d:.2}")));
        row.push((!na(&mut rng, 0.05)).then(|| format!("{mean_d:.2}")));
        let bmi = normal(&mut rng, if malignant { 24.6 } else { 23.4 }, 3.6).clamp(14.0, 45.0);
        row.push((!na(&mut rng, 0.08)).then(|| format!("{bmi:.1}")));
        let mut age = normal(&mut rng, 47.0, 13.0).round().clamp(15.0, 84.0);
        if kind < 2 && first_retained {
            // Pin the age grid: the youngest retained case anchors the decades at 15.
            age = 15.0;
            first_retained = false;
        }
        row.push((!na(&mut rng, 0.03)).then(|| format!("{age}")));

        for c in CATEGORICAL {
            let level = pick(&mut rng, if malignant { c.malignant } else { c.benign });
            let missing = c.na > 0.0 && rng.gen_bool(c.na);
            row.push((!missing).then(|| level.to_string()));
        }
        let label = match kind {
            1 => "malignant",
            0 | 3 => {
                if malignant {
                    "malignant"
                } else {
                    "benign"
                }
            }
            _ => "MPU",
        };
        row.push(Some(label.to_string()));
        row.push(rng.gen_bool(0.2).then(|| "free text".to_string()));

        if kind == 3 {
            // Out-of-range code in a categorical column, or an implausible BMI.
            if rng.gen_bool(0.5) {
                let col = 5 + rng.gen_range(0..CATEGORICAL.len());
                row[col] = Some(INVALID_CODE.to_string());
            } else {
                row[3] = Some("0.0".into());
            }
        }
        rows.push(row);

        // TSH history: none (10%), a single record (15%), or 2-8 records.
        let n_rec = match rng.gen::<f64>() {
            u if u < 0.10 => 0,
            u if u < 0.25 => 1,
            _ => rng.gen_range(2..=8),
        };
        let level = normal(&mut rng, if malignant { 0.15 } else { 0.6 }, 0.9);
        let vol = if malignant { 0.45 } else { 0.25 };
        let mut day = rng.gen_range(0..2000);
        for _ in 0..n_rec {
            let date = base + Duration::days(day);
            let value = if rng.gen_bool(0.05) {
                "NA".to_string()
            } else {
                format!("{:.4}", normal(&mut rng, level, vol).exp().max(0.0001))
            };
            tsh.push([id.clone(), date.format("%Y-%m-%d").to_string(), value]);
            day += rng.gen_range(30..400);
        }
    }
    SyntheticCases { cases: RawTable { headers, rows }, tsh, config: study_config() }
}

/// Binning config matching [`case_table`]'s columns.
pub fn study_config() -> BinningConfig {
    let diameter = |name: &str| ColumnConfig {
        range: Some((0.0, 20.0)),
        ..ColumnConfig::continuous(
            name,
            BinSpec::FixedWidth(FixedWidth {
                start: 1.0,
                width: 1.0,
                n_interior: 3,
                open_below: true,
                open_above: true,
                unit: "cm".into(),
            }),
        )
    };
    let mut columns = vec![ColumnConfig::new("case_id", Role::Id), diameter("Max diameter"), diameter("Mean diameter")];
    columns.push(ColumnConfig {
        range: Some((10.0, 60.0)),
        ..ColumnConfig::continuous(
            "BMI",
            BinSpec::Cutpoints(Cutpoints {
                boundaries: vec![18.5, 24.0, 28.0],
                labels: ["Underweight", "Normal weight", "Overweight", "Obese"].map(String::from).to_vec(),
            }),
        )
    });
    columns.push(ColumnConfig {
        range: Some((0.0, 120.0)),
        ..ColumnConfig::continuous("Age", BinSpec::Grid(Grid { width: 10.0, anchor: None }))
    });
    let mut mean = ColumnConfig::new("Mean TSH score", Role::Feature);
    mean.derive = Some(Derived::TshMean);
    mean.binspec = Some(BinSpec::Kmeans(KMeansBins { k: 5, log_offset: None, normalize: true, seed: None }));
    columns.push(mean);
    let mut rmssd = ColumnConfig::new("TSH tRMSSD", Role::Feature);
    rmssd.derive = Some(Derived::TshTrmssd);
    rmssd.binspec = Some(BinSpec::Kmeans(KMeansBins { k: 5, log_offset: Some(1e-5), normalize: true, seed: None }));
    columns.push(rmssd);
    for c in CATEGORICAL {
        let mut col = ColumnConfig::new(c.name, Role::Feature);
        col.kind = Some(ColumnType::Categorical);
        col.levels = Some(
            c.levels
                .iter()
                .enumerate()
                .map(|(i, l)| Level::Coded { code: i.to_string(), label: l.to_string() })
                .collect(),
        );
        columns.push(col);
    }
    columns.push(ColumnConfig::target("pathology", "benign", "malignant", &["MPU"]));
    columns.push(ColumnConfig::new("notes", Role::Excluded));
    BinningConfig { na_tokens: default_na_tokens(), columns }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomStoreSpec {
    pub eligible_items: usize,
    /// Extra N/A-bin items that must never reach an antecedent.
    pub missing_items: usize,
    pub transactions: usize,
    /// Probability that a transaction carries the positive label.
    pub prevalence: f64,
    pub seed: u64,
}

/// Random store: items `0..eligible` are plain, then `missing_items` N/A
/// bins, then the benign and malignant label items (malignant last and set
/// as positive target). Item frequencies and their association with the
/// label are drawn at random.
pub fn random_store(spec: &RandomStoreSpec) -> TransactionStore {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut vocab: Vec<ItemMeta> = (0..spec.eligible_items).map(|i| ItemMeta::new(format!("f{i}"), "x")).collect();
    vocab.extend((0..spec.missing_items).map(|i| ItemMeta::missing(format!("m{i}"), "N/A")));
    let benign = vocab.len() as u32;
    vocab.push(ItemMeta::target("label", "benign"));
    vocab.push(ItemMeta::target("label", "malignant"));
    let malignant = benign + 1;
    let base: Vec<f64> = (0..spec.eligible_items + spec.missing_items).map(|_| rng.gen_range(0.05..0.8)).collect();
    let shift: Vec<f64> = base.iter().map(|_| rng.gen_range(-0.3..0.3)).collect();
    let tx = (0..spec.transactions)
        .map(|_| {
            let pos = rng.gen_bool(spec.prevalence);
            let mut items: Vec<ItemId> = base
                .iter()
                .zip(&shift)
                .enumerate()
                .filter(|(_, (&p, &s))| rng.gen_bool((if pos { p + s } else { p }).clamp(0.0, 1.0)))
                .map(|(i, _)| ItemId(i as u32))
                .collect();
            items.push(ItemId(if pos { malignant } else { benign }));
            Itemset::new(items)
        })
        .collect();
    TransactionStore::new(vocab, tx)
        .expect("ids in range")
        .with_positive_target(ItemId(malignant))
        .expect("target item")
}

fn normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).expect("positive sd").sample(rng)
}

fn lognormal(rng: &mut ChaCha8Rng, mu: f64, sigma: f64) -> f64 {
    LogNormal::new(mu, sigma).expect("positive sigma").sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::{bin_table, encode_dataset, read_tsh_csv};

    #[test]
    fn study_sized_table_has_expected_vocabulary() {
        let s = case_table(&CaseTableSpec::study_sized(7));
        let mut buf = Vec::new();
        s.write_tsh(&mut buf).unwrap();
        let tsh = read_tsh_csv(&buf[..], &s.config.na_tokens).unwrap();
        let ing = bin_table(&s.cases, Some(&tsh), &s.config, 7).unwrap();
        assert_eq!(ing.rows.loaded, 2091);
        assert_eq!(ing.rows.dropped_label, 300);
        assert_eq!(ing.rows.dropped_invalid, 118);
        assert_eq!(ing.rows.retained, 1673);
        let store = encode_dataset(&ing.dataset).unwrap();
        assert_eq!(store.len(), 1673);
        assert_eq!(store.vocabulary().len(), 102);
        assert_eq!(store.vocabulary().iter().filter(|m| m.is_missing).count(), 19);
        let features: std::collections::BTreeSet<&str> =
            store.vocabulary().iter().filter(|m| !m.is_target).map(|m| m.feature.as_str()).collect();
        assert_eq!(features.len(), 22);
        let m = store.positive_target().unwrap();
        assert_eq!(store.tidset(m).unwrap().count(), 259);
        store.validate_case_invariants().unwrap();
    }

    #[test]
    fn random_store_shape() {
        let spec = RandomStoreSpec { eligible_items: 6, missing_items: 2, transactions: 50, prevalence: 0.3, seed: 1 };
        let s = random_store(&spec);
        assert_eq!(s.vocabulary().len(), 10);
        assert_eq!(s.positive_target(), Some(ItemId(9)));
        s.validate_case_invariants().unwrap_or(());
        assert_eq!(s.len(), 50);
    }
}
