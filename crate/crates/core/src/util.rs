//! Small shared numerics.

/// sinc(x) = sin(x)/x with sinc(0) = 1 (unnormalized convention).
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Binomial coefficient C(n, k) in f64.
pub fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(20, 0), 1.0);
        assert_eq!(binomial(20, 20), 1.0);
        assert_eq!(binomial(10, 3), 120.0);
    }

    #[test]
    fn sinc_near_zero() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-15);
        assert!((sinc(std::f64::consts::PI)).abs() < 1e-15);
    }
}
