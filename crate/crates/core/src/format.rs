//! Locale-independent float formatting for emitted tables.

/// Shortest decimal string that round-trips to the same `f64`.
///
/// Plain notation in `[1e-5, 1e16)`, exponent notation outside it.
/// Negative zero prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if x.is_finite() && (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for &x in &[0.1, -2.5, 1.0 / 3.0, 6.02e23, 1.6e-19, 940.123456789, 1e-5, 9.99e15] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn zero_and_exponents() {
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(2.5e-7), "2.5e-7");
        assert_eq!(fmt_f64(0.385), "0.385");
    }
}
