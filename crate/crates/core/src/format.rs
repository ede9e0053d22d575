//! Fixed-precision number formatting shared by the CSV writers.

/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// trailing zeros are dropped and scientific notation is used for very
/// large or very small magnitudes.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

/// Lengths are written at nine significant digits.
pub fn length(x: f64) -> String {
    sig(x, 9)
}

/// Probabilities are written at seven decimals.
pub fn probability(p: f64) -> String {
    format!("{p:.7}")
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
