use serde::{Deserialize, Serialize};

use super::spec::BinSpec;

/// Column layout and binning rules for one case table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningConfig {
    /// Cell values treated as missing (compared after trimming whitespace).
    #[serde(default = "default_na_tokens")]
    pub na_tokens: Vec<String>,
    pub columns: Vec<ColumnConfig>,
}

pub fn default_na_tokens() -> Vec<String> {
    vec![String::new(), "NA".into(), "N/A".into()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Feature,
    Target,
    Id,
    Excluded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Categorical,
    Continuous,
}

/// Feature computed from the TSH series table instead of read from the case table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derived {
    TshMean,
    TshTrmssd,
}

/// A categorical level: either a bare value or a raw code with a display label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Plain(String),
    Coded { code: String, label: String },
}

impl Level {
    pub fn code(&self) -> &str {
        match self {
            Level::Plain(s) => s,
            Level::Coded { code, .. } => code,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Level::Plain(s) => s,
            Level::Coded { label, .. } => label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnConfig {
    pub name: String,
    pub role: Role,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ColumnType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binspec: Option<BinSpec>,
    /// Allowed categorical values in bin order; other values drop the row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Level>>,
    /// Plausible continuous range `[lo, hi]`; values outside drop the row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derive: Option<Derived>,
    /// Target only: the positive (malignant) class value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive: Option<String>,
    /// Target only: the negative (benign) class value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative: Option<String>,
    /// Target only: class values whose rows are dropped (e.g. undetermined cases).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop: Vec<String>,
}

impl ColumnConfig {
    pub fn new(name: impl Into<String>, role: Role) -> Self {
        ColumnConfig {
            name: name.into(),
            role,
            kind: None,
            binspec: None,
            levels: None,
            range: None,
            derive: None,
            positive: None,
            negative: None,
            drop: Vec::new(),
        }
    }

    pub fn categorical(name: impl Into<String>, levels: &[&str]) -> Self {
        ColumnConfig {
            kind: Some(ColumnType::Categorical),
            levels: Some(levels.iter().map(|l| Level::Plain(l.to_string())).collect()),
            ..Self::new(name, Role::Feature)
        }
    }

    pub fn continuous(name: impl Into<String>, spec: BinSpec) -> Self {
        ColumnConfig { kind: Some(ColumnType::Continuous), binspec: Some(spec), ..Self::new(name, Role::Feature) }
    }

    pub fn target(name: impl Into<String>, negative: &str, positive: &str, drop: &[&str]) -> Self {
        ColumnConfig {
            positive: Some(positive.into()),
            negative: Some(negative.into()),
            drop: drop.iter().map(|s| s.to_string()).collect(),
            ..Self::new(name, Role::Target)
        }
    }
}
