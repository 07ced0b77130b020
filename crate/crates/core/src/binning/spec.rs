//! Declarative bin rules and the per-column binning operations.
//!
//! All bounded bins are left-closed, right-open; an open upper bin is closed
//! below (`v >= end`).

use serde::{Deserialize, Serialize};

use super::kmeans::kmeans_1d;
use super::transform::{log_offset, minmax_normalize};
use super::BinningError;
use crate::numfmt;

/// Label of every column's missing-value bin.
pub const NA_LABEL: &str = "N/A";

/// Result of binning one column: ordered bin labels and, per value, the index
/// of its bin (`None` for the N/A bin).
#[derive(Clone, Debug, PartialEq)]
pub struct Binning {
    pub labels: Vec<String>,
    pub assignment: Vec<Option<usize>>,
}

impl Binning {
    pub fn label_of(&self, i: usize) -> &str {
        match self.assignment[i] {
            Some(b) => &self.labels[b],
            None => NA_LABEL,
        }
    }

    pub fn labels_per_value(&self) -> Vec<&str> {
        (0..self.assignment.len()).map(|i| self.label_of(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedWidth {
    pub start: f64,
    pub width: f64,
    pub n_interior: usize,
    #[serde(default = "yes")]
    pub open_below: bool,
    #[serde(default = "yes")]
    pub open_above: bool,
    /// Suffix appended to labels, e.g. `"cm"`.
    #[serde(default)]
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutpoints {
    pub boundaries: Vec<f64>,
    pub labels: Vec<String>,
}

/// Equal-width grid resolved against the data, labelled `"[a,b)"`. Without an
/// explicit anchor it starts at the data minimum rounded down to a multiple
/// of 5.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width: f64,
    #[serde(default)]
    pub anchor: Option<f64>,
}

/// Unsupervised 1-D k-means bins, labelled by the raw member range `"[min,max]"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansBins {
    pub k: usize,
    /// When set, cluster on `ln(x + log_offset)`.
    #[serde(default)]
    pub log_offset: Option<f64>,
    /// Rescale (transformed) values to [-1, 1] before clustering.
    #[serde(default = "yes")]
    pub normalize: bool,
    /// Overrides the seed derived from the run seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinSpec {
    FixedWidth(FixedWidth),
    Cutpoints(Cutpoints),
    Grid(Grid),
    Kmeans(KMeansBins),
}

impl BinSpec {
    pub fn validate(&self) -> Result<(), BinningError> {
        let bad = |m: &str| Err(BinningError::InvalidSpec(m.to_string()));
        match self {
            BinSpec::FixedWidth(f) => {
                if !f.start.is_finite() || !(f.width.is_finite() && f.width > 0.0) {
                    return bad("fixed_width needs finite start and positive width");
                }
                if f.n_interior == 0 && !f.open_below && !f.open_above {
                    return bad("fixed_width has no bins");
                }
            }
            BinSpec::Cutpoints(c) => {
                if c.boundaries.iter().any(|b| !b.is_finite()) {
                    return bad("cutpoint boundaries must be finite");
                }
                if c.boundaries.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("cutpoint boundaries must be strictly ascending");
                }
                if c.labels.len() != c.boundaries.len() + 1 {
                    return bad("cutpoints need exactly one more label than boundaries");
                }
            }
            BinSpec::Grid(g) => {
                if !(g.width.is_finite() && g.width > 0.0) || g.anchor.is_some_and(|a| !a.is_finite()) {
                    return bad("grid needs a positive width and finite anchor");
                }
            }
            BinSpec::Kmeans(k) => {
                if k.k == 0 {
                    return bad("kmeans k must be at least 1");
                }
                if k.log_offset.is_some_and(|o| !o.is_finite()) {
                    return bad("kmeans log_offset must be finite");
                }
            }
        }
        Ok(())
    }

    /// Bins `values` (`None` = N/A). `seed` is used by k-means unless the spec
    /// carries its own.
    pub fn apply(&self, values: &[Option<f64>], seed: u64) -> Result<Binning, BinningError> {
        self.validate()?;
        match self {
            BinSpec::FixedWidth(f) => bin_fixed_width(values, f),
            BinSpec::Cutpoints(c) => bin_cutpoints(values, c),
            BinSpec::Grid(g) => bin_grid(values, g),
            BinSpec::Kmeans(k) => bin_kmeans(values, k, k.seed.unwrap_or(seed)),
        }
    }
}

fn check_finite(values: &[Option<f64>]) -> Result<(), BinningError> {
    match values.iter().position(|v| v.is_some_and(|x| !x.is_finite())) {
        Some(index) => Err(BinningError::NonFinite { index }),
        None => Ok(()),
    }
}

fn num(x: f64) -> String {
    numfmt::compact(x, 12)
}

impl FixedWidth {
    fn end(&self) -> f64 {
        self.start + self.n_interior as f64 * self.width
    }

    fn edge(&self, j: usize) -> f64 {
        self.start + j as f64 * self.width
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.open_below {
            out.push(format!("<{}{}", num(self.start), self.unit));
        }
        for j in 0..self.n_interior {
            out.push(format!("{}-{}{}", num(self.edge(j)), num(self.edge(j + 1)), self.unit));
        }
        if self.open_above {
            out.push(format!("≥{}{}", num(self.end()), self.unit));
        }
        out
    }

    fn bin(&self, v: f64) -> Result<usize, BinningError> {
        let below = usize::from(self.open_below);
        if v < self.start {
            return if self.open_below { Ok(0) } else { Err(BinningError::OutOfRange { value: v }) };
        }
        if v >= self.end() {
            return if self.open_above {
                Ok(below + self.n_interior)
            } else {
                Err(BinningError::OutOfRange { value: v })
            };
        }
        // Floor division, then nudged against the exact edges so that values
        // sitting on a boundary land in the bin it opens.
        let mut j = (((v - self.start) / self.width).floor() as usize).min(self.n_interior - 1);
        while j + 1 < self.n_interior && v >= self.edge(j + 1) {
            j += 1;
        }
        while j > 0 && v < self.edge(j) {
            j -= 1;
        }
        Ok(below + j)
    }
}

pub fn bin_fixed_width(values: &[Option<f64>], spec: &FixedWidth) -> Result<Binning, BinningError> {
    BinSpec::FixedWidth(spec.clone()).validate()?;
    check_finite(values)?;
    let assignment = values.iter().map(|v| v.map(|x| spec.bin(x)).transpose()).collect::<Result<_, _>>()?;
    Ok(Binning { labels: spec.labels(), assignment })
}

pub fn bin_cutpoints(values: &[Option<f64>], spec: &Cutpoints) -> Result<Binning, BinningError> {
    BinSpec::Cutpoints(spec.clone()).validate()?;
    check_finite(values)?;
    let assignment = values.iter().map(|v| v.map(|x| spec.boundaries.partition_point(|&b| b <= x))).collect();
    Ok(Binning { labels: spec.labels.clone(), assignment })
}

/// Resolves a [`Grid`] against the observed values into explicit cutpoints.
pub fn resolve_grid(values: &[Option<f64>], spec: &Grid) -> Result<Cutpoints, BinningError> {
    check_finite(values)?;
    let present = values.iter().flatten().copied();
    let (lo, hi) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo > hi {
        return Ok(Cutpoints { boundaries: Vec::new(), labels: Vec::new() });
    }
    let anchor = spec.anchor.unwrap_or((lo / 5.0).floor() * 5.0);
    if lo < anchor {
        return Err(BinningError::OutOfRange { value: lo });
    }
    let n = ((hi - anchor) / spec.width).floor() as usize + 1;
    let edge = |j: usize| anchor + j as f64 * spec.width;
    let labels = (0..n).map(|j| format!("[{},{})", num(edge(j)), num(edge(j + 1)))).collect();
    // Interior edges only; the first bin starts at the anchor.
    let boundaries = (1..n).map(edge).collect();
    Ok(Cutpoints { boundaries, labels })
}

pub fn bin_grid(values: &[Option<f64>], spec: &Grid) -> Result<Binning, BinningError> {
    let cuts = resolve_grid(values, spec)?;
    if cuts.labels.is_empty() {
        return Ok(Binning { labels: Vec::new(), assignment: vec![None; values.len()] });
    }
    bin_cutpoints(values, &cuts)
}

pub fn bin_kmeans(values: &[Option<f64>], spec: &KMeansBins, seed: u64) -> Result<Binning, BinningError> {
    check_finite(values)?;
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let mut transformed = match spec.log_offset {
        Some(offset) => log_offset(&present, offset)?,
        None => present.clone(),
    };
    if spec.normalize {
        transformed = minmax_normalize(&transformed)?;
    }
    let km = kmeans_1d(&transformed, spec.k, seed)?;
    // Report each cluster by the range of its raw member values.
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); spec.k];
    for (&raw, &c) in present.iter().zip(&km.labels) {
        ranges[c].0 = ranges[c].0.min(raw);
        ranges[c].1 = ranges[c].1.max(raw);
    }
    let labels =
        ranges.iter().map(|&(lo, hi)| format!("[{},{}]", numfmt::compact(lo, 6), numfmt::compact(hi, 6))).collect();
    let mut cluster = km.labels.into_iter();
    let assignment = values.iter().map(|v| v.map(|_| cluster.next().expect("one label per value"))).collect();
    Ok(Binning { labels, assignment })
}
