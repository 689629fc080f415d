//! Number and list formatting.
//!
//! Rounding works on the shortest decimal representation of a value, so
//! 0.345 formats as 35% even though its binary value is slightly below.

use super::template::RealizeError;

/// Whole percentage, half away from zero. `p` must lie in [0, 1].
pub fn format_percentage(p: f64) -> Result<String, RealizeError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(RealizeError::OutOfRange(p));
    }
    Ok(format!("{}%", round_decimal(p, 2, 0)))
}

/// Integer if `v` is integral, otherwise one decimal place.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 {
        return round_decimal(v, 0, 0);
    }
    let s = round_decimal(v, 0, 1);
    match s.strip_suffix(".0") {
        Some("-0") => "0".to_string(),
        Some(whole) => whole.to_string(),
        None => s,
    }
}

/// Year formatting: integer, halves rounded down.
pub fn format_year(v: f64) -> String {
    round_decimal((v - 0.5).ceil(), 0, 0)
}

/// "A", "A and B", "A, B and C".
pub fn aggregate_list(items: &[String], conjunction: &str) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} {conjunction} {last}", init.join(", ")),
    }
}

/// Multiplies `v` by 10^`shift` and rounds to `places` decimals, half away
/// from zero, on the decimal digits of `v`.
pub fn round_decimal(v: f64, shift: usize, places: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let repr = v.abs().to_string();
    let (int, frac) = repr.split_once('.').unwrap_or((&repr, ""));
    let mut frac: Vec<u8> = frac.bytes().collect();
    let mut digits: Vec<u8> = int.bytes().collect();
    for _ in 0..shift {
        digits.push(if frac.is_empty() { b'0' } else { frac.remove(0) });
    }
    for i in 0..places {
        digits.push(*frac.get(i).unwrap_or(&b'0'));
    }
    if frac.get(places).is_some_and(|d| *d >= b'5') {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let int_len = digits.len() - places;
    let int_part = String::from_utf8_lossy(&digits[..int_len]).trim_start_matches('0').to_string();
    let int_part = if int_part.is_empty() { "0".to_string() } else { int_part };
    let frac_part = String::from_utf8_lossy(&digits[int_len..]).to_string();
    let zero = digits.iter().all(|d| *d == b'0');
    let sign = if v < 0.0 && !zero { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages() {
        assert_eq!(format_percentage(0.345).unwrap(), "35%");
        assert_eq!(format_percentage(0.55).unwrap(), "55%");
        assert_eq!(format_percentage(0.005).unwrap(), "1%");
        assert_eq!(format_percentage(0.004999).unwrap(), "0%");
        assert_eq!(format_percentage(0.995).unwrap(), "100%");
        assert_eq!(format_percentage(1.0).unwrap(), "100%");
        assert_eq!(format_percentage(0.0).unwrap(), "0%");
        assert_eq!(format_percentage(1.0 / 3.0).unwrap(), "33%");
        assert!(format_percentage(1.01).is_err());
        assert!(format_percentage(-0.1).is_err());
        assert!(format_percentage(f64::NAN).is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(format_number(475.0), "475");
        assert_eq!(format_number(462.5), "462.5");
        assert_eq!(format_number(2.25), "2.3");
        assert_eq!(format_number(2.96), "3");
        assert_eq!(format_number(-1.25), "-1.3");
        assert_eq!(format_number(-0.04), "0");
        assert_eq!(format_number(99.95), "100");
    }

    #[test]
    fn years() {
        assert_eq!(format_year(2010.5), "2010");
        assert_eq!(format_year(2010.0), "2010");
        assert_eq!(format_year(2011.5), "2011");
    }

    #[test]
    fn lists() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(aggregate_list(&s(&[]), "and"), "");
        assert_eq!(aggregate_list(&s(&["A"]), "and"), "A");
        assert_eq!(aggregate_list(&s(&["A", "B"]), "and"), "A and B");
        assert_eq!(aggregate_list(&s(&["A", "B", "C"]), "and"), "A, B and C");
    }
}
