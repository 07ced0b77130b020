//! Time-series features over a case's logTSH history.
//!
//! Times are real-valued days. Changing the unit rescales tRMSSD by a
//! constant factor and leaves the mean score unchanged.

use super::BinningError;

/// A case's logTSH values in strictly increasing time order.
#[derive(Clone, Debug, PartialEq)]
pub struct TshSeries {
    points: Vec<(f64, f64)>,
}

impl TshSeries {
    /// From `(time, tsh)` records; takes natural logs of positive TSH values.
    pub fn from_raw(mut records: Vec<(f64, f64)>) -> Result<Self, BinningError> {
        for r in &mut records {
            if !(r.1.is_finite() && r.1 > 0.0) {
                return Err(BinningError::NonPositiveTsh { value: r.1 });
            }
            r.1 = r.1.ln();
        }
        Self::from_log(records)
    }

    /// From `(time, logTSH)` points in any order.
    pub fn from_log(mut points: Vec<(f64, f64)>) -> Result<Self, BinningError> {
        if points.is_empty() {
            return Err(BinningError::EmptySeries);
        }
        if let Some(index) = points.iter().position(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(BinningError::NonFinite { index });
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(BinningError::ZeroInterval { time: w[0].0 });
        }
        Ok(TshSeries { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Time-weighted mean of logTSH: each interval contributes the average of its
/// two endpoints weighted by its length. A single record returns its own value.
pub fn mean_tsh_score(series: &TshSeries) -> f64 {
    let p = series.points();
    if p.len() == 1 {
        return p[0].1;
    }
    let (num, den) = p.windows(2).fold((0.0, 0.0), |(num, den), w| {
        let dt = w[1].0 - w[0].0;
        (num + (w[0].1 + w[1].1) / 2.0 * dt, den + dt)
    });
    num / den
}

/// Root mean square of the per-interval slopes of logTSH. `None` for a
/// single record, which has no interval.
pub fn tsh_trmssd(series: &TshSeries) -> Option<f64> {
    let p = series.points();
    if p.len() < 2 {
        return None;
    }
    let sum_sq: f64 = p
        .windows(2)
        .map(|w| {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            slope * slope
        })
        .sum();
    Some((sum_sq / (p.len() - 1) as f64).sqrt())
}
