//! Decimal formatting helpers shared by the text formats.

/// Formats `x` with at most `digits` significant digits, trailing zeros
/// trimmed. Switches to exponent notation outside `[1e-5, 10^digits)`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        return format!("{}e{}", trim_zeros(mantissa), e);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // rounding may have bumped the exponent (e.g. 9.9999 -> 10.000); one more
    // digit of precision is harmless after trimming
    trim_zeros(&s).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds `x` to `digits` significant digits through its decimal form, so a
/// value written with [`sig`] parses back to itself.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    sig(x, digits).parse().unwrap_or(x)
}
