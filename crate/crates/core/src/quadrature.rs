//! Composite Simpson rules.

/// Composite Simpson sum over equally spaced samples `values` (odd length,
/// at least 3) with spacing `h`.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(
        n >= 3 && n % 2 == 1,
        "simpson needs an odd number (>= 3) of samples"
    );
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Composite Simpson integral of `f` over `[a, b]` with `intervals`
/// subintervals (rounded up to even).
pub fn simpson_fn<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| f(a + h * i as f64)).collect();
    simpson(&values, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let v = simpson_fn(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn converges_on_sine() {
        let v = simpson_fn(f64::sin, 0.0, std::f64::consts::PI, 512);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
