use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use confboost_core::analysis::{kappa_ln_inv_095, AnalysisConfig, KAPPA_PRINTED};
use confboost_core::binning::{default_na_tokens, BinningConfig, ColumnConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A number or a keyword, as accepted in config files and on the command line.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum NumOrWord {
    Int(u64),
    Float(f64),
    Word(String),
}

/// Minimum joint count for `A ∪ {target}`: an absolute count or a fraction
/// of the retained rows (rounded up to a count).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumOrWord", into = "NumOrWord")]
pub enum MinSupport {
    Count(usize),
    Fraction(f64),
}

impl MinSupport {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            MinSupport::Count(0) => Err(CliError::Input("min support count must be at least 1".into())),
            MinSupport::Count(c) => Ok(c),
            MinSupport::Fraction(f) if f > 0.0 && f <= 1.0 => {
                // 10/1673 * 1673 lands a hair above 10; snap before taking the ceiling.
                let x = f * n as f64;
                let near = x.round();
                let c = if (x - near).abs() <= 1e-9 * x.max(1.0) { near } else { x.ceil() };
                Ok((c as usize).max(1))
            }
            MinSupport::Fraction(f) => Err(CliError::Input(format!("min support fraction {f} must lie in (0, 1]"))),
        }
    }
}

impl FromStr for MinSupport {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(c) = s.parse::<usize>() {
            return Ok(MinSupport::Count(c));
        }
        if let Some((a, b)) = s.split_once('/') {
            if let (Ok(a), Ok(b)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                return Ok(MinSupport::Fraction(a / b));
            }
        }
        s.parse::<f64>().map(MinSupport::Fraction).map_err(|_| {
            CliError::Input(format!("min support {s:?}: expected a count, a fraction or a ratio like 10/1673"))
        })
    }
}

impl TryFrom<NumOrWord> for MinSupport {
    type Error = CliError;

    fn try_from(v: NumOrWord) -> Result<Self> {
        match v {
            NumOrWord::Int(c) => Ok(MinSupport::Count(c as usize)),
            NumOrWord::Float(f) => Ok(MinSupport::Fraction(f)),
            NumOrWord::Word(w) => w.parse(),
        }
    }
}

impl From<MinSupport> for NumOrWord {
    fn from(m: MinSupport) -> Self {
        match m {
            MinSupport::Count(c) => NumOrWord::Int(c as u64),
            MinSupport::Fraction(f) => NumOrWord::Float(f),
        }
    }
}

/// Minimum rule confidence, or `beta-squared`: the squared prevalence of the
/// positive class in the retained rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumOrWord", into = "NumOrWord")]
pub enum MinConfidence {
    #[default]
    BetaSquared,
    Value(f64),
}

impl FromStr for MinConfidence {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "beta-squared" => Ok(MinConfidence::BetaSquared),
            t => t.parse::<f64>().ok().filter(|g| (0.0..=1.0).contains(g)).map(MinConfidence::Value).ok_or_else(|| {
                CliError::Input(format!("min confidence {t:?}: expected a value in [0, 1] or \"beta-squared\""))
            }),
        }
    }
}

impl TryFrom<NumOrWord> for MinConfidence {
    type Error = CliError;

    fn try_from(v: NumOrWord) -> Result<Self> {
        match v {
            NumOrWord::Int(c) => format!("{c}").parse(),
            NumOrWord::Float(f) => format!("{f}").parse(),
            NumOrWord::Word(w) => w.parse(),
        }
    }
}

impl From<MinConfidence> for NumOrWord {
    fn from(m: MinConfidence) -> Self {
        match m {
            MinConfidence::BetaSquared => NumOrWord::Word("beta-squared".into()),
            MinConfidence::Value(g) => NumOrWord::Float(g),
        }
    }
}

/// κ, given as a number or a named preset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumOrWord", into = "NumOrWord")]
pub enum Kappa {
    /// 0.223
    #[default]
    Printed,
    /// ln(1/0.95) ≈ 0.0513
    LnInv095,
    Value(f64),
}

impl Kappa {
    pub fn value(self) -> f64 {
        match self {
            Kappa::Printed => KAPPA_PRINTED,
            Kappa::LnInv095 => kappa_ln_inv_095(),
            Kappa::Value(k) => k,
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Printed => f.write_str("printed"),
            Kappa::LnInv095 => f.write_str("ln-inv-0.95"),
            Kappa::Value(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Kappa {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "printed" => Ok(Kappa::Printed),
            "ln-inv-0.95" => Ok(Kappa::LnInv095),
            t => t.parse::<f64>().ok().filter(|k| *k >= 0.0 && k.is_finite()).map(Kappa::Value).ok_or_else(|| {
                CliError::Input(format!("kappa {t:?}: expected a non-negative number, \"printed\" or \"ln-inv-0.95\""))
            }),
        }
    }
}

impl TryFrom<NumOrWord> for Kappa {
    type Error = CliError;

    fn try_from(v: NumOrWord) -> Result<Self> {
        match v {
            NumOrWord::Int(c) => Ok(Kappa::Value(c as f64)),
            NumOrWord::Float(f) => format!("{f}").parse(),
            NumOrWord::Word(w) => w.parse(),
        }
    }
}

impl From<Kappa> for NumOrWord {
    fn from(k: Kappa) -> Self {
        match k {
            Kappa::Value(v) => NumOrWord::Float(v),
            named => NumOrWord::Word(named.to_string()),
        }
    }
}

fn default_min_support() -> MinSupport {
    MinSupport::Count(10)
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinerSettings {
    #[serde(default = "default_min_support")]
    pub min_support: MinSupport,
    #[serde(default)]
    pub min_confidence: MinConfidence,
    #[serde(default)]
    pub max_k: Option<usize>,
    /// Emit the empty-antecedent rule `∅ → target`.
    #[serde(default = "yes")]
    pub include_baseline: bool,
}

impl Default for MinerSettings {
    fn default() -> Self {
        MinerSettings {
            min_support: default_min_support(),
            min_confidence: MinConfidence::BetaSquared,
            max_k: None,
            include_baseline: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSettings {
    #[serde(default)]
    pub kappa: Kappa,
    #[serde(default = "default_pic")]
    pub pic_threshold: f64,
    #[serde(default = "default_acb")]
    pub acb_threshold: f64,
    #[serde(default = "default_swarm_cap")]
    pub swarm_cap: usize,
}

fn default_pic() -> f64 {
    AnalysisConfig::default().pic_threshold
}

fn default_acb() -> f64 {
    AnalysisConfig::default().acb_threshold
}

fn default_swarm_cap() -> usize {
    AnalysisConfig::default().swarm_cap
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            kappa: Kappa::Printed,
            pic_threshold: default_pic(),
            acb_threshold: default_acb(),
            swarm_cap: default_swarm_cap(),
        }
    }
}

impl AnalysisSettings {
    pub fn to_config(&self, seed: u64) -> AnalysisConfig {
        AnalysisConfig {
            kappa: self.kappa.value(),
            pic_threshold: self.pic_threshold,
            acb_threshold: self.acb_threshold,
            swarm_cap: self.swarm_cap,
            seed,
        }
    }
}

/// Everything a run needs. Input paths are kept as written; relative ones
/// resolve against `base_dir` (the config file's directory).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub cases: Option<PathBuf>,
    #[serde(default)]
    pub tsh: Option<PathBuf>,
    #[serde(default = "default_na_tokens")]
    pub na_tokens: Vec<String>,
    #[serde(default)]
    pub columns: Vec<ColumnConfig>,
    #[serde(default)]
    pub miner: MinerSettings,
    #[serde(default)]
    pub analysis: AnalysisSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            cases: None,
            tsh: None,
            na_tokens: default_na_tokens(),
            columns: Vec::new(),
            miner: MinerSettings::default(),
            analysis: AnalysisSettings::default(),
            seed: 0,
            base_dir: PathBuf::from("."),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text).map_err(|e| CliError::file(path, e))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn from_binning(binning: BinningConfig) -> Self {
        PipelineConfig { na_tokens: binning.na_tokens, columns: binning.columns, ..Default::default() }
    }

    pub fn binning(&self) -> BinningConfig {
        BinningConfig { na_tokens: self.na_tokens.clone(), columns: self.columns.clone() }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn cases_path(&self) -> Result<PathBuf> {
        self.cases
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| CliError::Input("no cases CSV given (set \"cases\" in the config or pass --cases)".into()))
    }

    pub fn tsh_path(&self) -> Option<PathBuf> {
        self.tsh.as_deref().map(|p| self.resolve(p))
    }
}
