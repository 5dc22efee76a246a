//! Deterministic CSV number formatting: six significant digits, rendered in
//! the shortest plain decimal form so reruns are byte-identical across
//! platforms.

/// Formats `x` to at most six significant digits.  Round-trips through a
/// scientific-notation string so the rounding is decimal (what a reader
/// expects), then lets the standard shortest-representation printer produce
/// the final text.  Infinities come out as `inf`/`-inf`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("rounded float reparses");
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(2.0 / 3.0), "0.666667");
        assert_eq!(sig6(-1.8204784532536746), "-1.82048");
        assert_eq!(sig6(1234567.0), "1234570");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(f64::INFINITY), "inf");
        assert_eq!(sig6(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn deterministic_for_many_values() {
        // The formatter must be a pure function of the bits.
        for i in 0..1000 {
            let x = (i as f64 * 0.377).sin() * 10f64.powi(i % 7 - 3);
            assert_eq!(sig6(x), sig6(x));
            let reparsed: f64 = sig6(x).parse().unwrap();
            let rel = if x == 0.0 {
                0.0
            } else {
                ((reparsed - x) / x).abs()
            };
            assert!(rel < 1e-5, "{x} -> {} (rel {rel})", sig6(x));
        }
    }
}
