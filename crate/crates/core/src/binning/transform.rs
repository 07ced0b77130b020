use super::BinningError;

/// Offset added before taking logs of heavily right-skewed, near-zero features.
pub const LOG_OFFSET: f64 = 1e-5;

/// `ln(x + 1e-5)` elementwise.
pub fn log_offset_transform(values: &[f64]) -> Result<Vec<f64>, BinningError> {
    log_offset(values, LOG_OFFSET)
}

pub(crate) fn log_offset(values: &[f64], offset: f64) -> Result<Vec<f64>, BinningError> {
    values
        .iter()
        .map(|&x| {
            let shifted = x + offset;
            if !x.is_finite() || shifted <= 0.0 {
                Err(BinningError::Domain { value: x })
            } else {
                Ok(shifted.ln())
            }
        })
        .collect()
}

/// Affine rescale to [-1, 1]: `2 (x - min) / (max - min) - 1`.
pub fn minmax_normalize(values: &[f64]) -> Result<Vec<f64>, BinningError> {
    if let Some(index) = values.iter().position(|x| !x.is_finite()) {
        return Err(BinningError::NonFinite { index });
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 || lo >= hi {
        return Err(BinningError::DegenerateRange);
    }
    let span = hi - lo;
    Ok(values.iter().map(|&x| (2.0 * (x - lo) / span - 1.0).clamp(-1.0, 1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_offset_values() {
        let y = log_offset_transform(&[0.0, 1.0 - 1e-5, std::f64::consts::E - 1e-5]).unwrap();
        assert!((y[0] - 1e-5f64.ln()).abs() <= 1e-12 * y[0].abs());
        assert!((y[0] + 11.512925).abs() < 1e-6);
        assert!(y[1].abs() < 1e-15);
        assert!((y[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_offset_domain() {
        assert!(matches!(log_offset_transform(&[-1.0]), Err(BinningError::Domain { .. })));
        assert!(matches!(log_offset_transform(&[-1e-5]), Err(BinningError::Domain { .. })));
        assert!(log_offset_transform(&[-5e-6]).is_ok());
    }

    #[test]
    fn normalize_endpoints() {
        let y = minmax_normalize(&[3.0, 7.0, 5.0]).unwrap();
        assert_eq!(y, vec![-1.0, 1.0, 0.0]);
        assert_eq!(minmax_normalize(&[2.0, 2.0]), Err(BinningError::DegenerateRange));
        assert_eq!(minmax_normalize(&[2.0]), Err(BinningError::DegenerateRange));
    }
}
