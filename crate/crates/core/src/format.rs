//! Decimal formatting shared by the text and CSV exports.

/// Significant digits used by every exported number.
pub const SIG_DIGITS: usize = 12;

/// Formats like C's `%.{sig}g`: shortest of fixed or scientific notation,
/// trailing zeros removed, `.` as decimal separator.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

/// Shorthand for [`format_sig`] at [`SIG_DIGITS`].
pub fn fmt12(x: f64) -> String {
    format_sig(x, SIG_DIGITS)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(-2.5), "-2.5");
        assert_eq!(fmt12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt12(1e-7), "1e-07");
        assert_eq!(fmt12(123456789012.0), "123456789012");
        assert_eq!(fmt12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt12(0.0001), "0.0001");
        assert_eq!(fmt12(999999999999.9), "1e+12");
        assert_eq!(format_sig(2.0 / 3.0, 6), "0.666667");
    }

    #[test]
    fn round_trips_through_parse_within_precision() {
        for &x in &[1.0 / 3.0, 6364.357804719848, -1e-9, 2.5e17] {
            let back: f64 = fmt12(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }
}
