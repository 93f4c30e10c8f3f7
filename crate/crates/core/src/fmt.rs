//! Float formatting shared by every text export.

use alloc::format;
use alloc::string::String;

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-4 <= |x| < 1e17`. The output
/// always parses back to the same `f64`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    if !(-4..17).contains(&exp) {
        let mut m = String::from(&digits[..1]);
        let frac = digits[1..].trim_end_matches('0');
        if !frac.is_empty() {
            m.push('.');
            m.push_str(frac);
        }
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{m}e{esign}{:02}", exp.unsigned_abs());
    }

    let (int_part, frac_part) = if exp >= 0 {
        let split = (exp + 1) as usize;
        (String::from(&digits[..split]), String::from(&digits[split..]))
    } else {
        let mut frac = String::new();
        for _ in 0..(-exp - 1) {
            frac.push('0');
        }
        frac.push_str(&digits);
        (String::from("0"), frac)
    };
    let frac = frac_part.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}
