//! Decimal formatting with a fixed number of significant digits.

/// Formats `x` with exactly `digits` significant digits, positional when the
/// decimal exponent is in `[-5, digits)` and scientific otherwise.
///
/// With `digits = 17` every finite `f64` round-trips through `str::parse`.
pub fn significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits_str: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < -5 || exp >= digits as i32 {
        return sci;
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits_str.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}.0")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits_str}")
    }
}

/// Like [`significant`] but with trailing fractional zeros removed, for labels.
pub fn compact(x: f64, digits: usize) -> String {
    let s = significant(x, digits);
    if s.contains('e') || !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(significant(0.75, 17), "0.75000000000000000");
        assert_eq!(significant(1.25, 17), "1.2500000000000000");
        assert_eq!(significant(-11.512925464970229, 17), "-11.512925464970229");
        assert_eq!(significant(0.0, 17), "0.0000000000000000");
        assert_eq!(significant(1e-9, 17), "1.0000000000000001e-9");
        assert_eq!(significant(2.5e-9, 17), "2.5000000000000001e-9");
        assert_eq!(significant(259.0 / 1673.0, 17).len(), 19);
    }

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 6.02e23, -5.063e-7, 259.0 / 1673.0, f64::MIN_POSITIVE] {
            assert_eq!(significant(x, 17).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn compact_labels() {
        assert_eq!(compact(-5.063, 6), "-5.063");
        assert_eq!(compact(10.18564, 6), "10.1856");
        assert_eq!(compact(0.188412, 5), "0.18841");
        assert_eq!(compact(4.0, 6), "4");
        assert_eq!(compact(-0.0, 6), "0");
    }
}
