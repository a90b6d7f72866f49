//! Spherical Bessel functions and Legendre polynomials.

use crate::util::sinc;

/// j_0 .. j_nmax at `x`, via the stable downward (Miller) recurrence
/// normalized against j_0 = sin(x)/x; a power series takes over near x = 0.
pub fn spherical_jn_all(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    if ax < 1e-3 {
        return (0..=nmax).map(|n| jn_series(n, x)).collect();
    }
    if nmax == 0 {
        return vec![sinc(x)];
    }
    // Upward recurrence is stable while n < x; downward elsewhere.
    if (nmax as f64) < ax {
        let mut out = Vec::with_capacity(nmax + 1);
        let j0 = x.sin() / x;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        out.push(j0);
        out.push(j1);
        for n in 1..nmax {
            let next = (2.0 * n as f64 + 1.0) / x * out[n] - out[n - 1];
            out.push(next);
        }
        return out;
    }
    // Start the downward recurrence high enough that the unwanted solution
    // has decayed away by the time n reaches nmax.
    let start = nmax + 16 + (2.0 * ax) as usize;
    let mut jp1 = 0.0f64;
    let mut j = 1e-30f64;
    let mut out = vec![0.0; nmax + 1];
    for n in (0..start).rev() {
        let jm1 = (2.0 * n as f64 + 3.0) / x * j - jp1;
        jp1 = j;
        j = jm1;
        if n <= nmax {
            out[n] = j;
        }
        // Rescale to dodge overflow during the unnormalized sweep.
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    let scale = (x.sin() / x) / out[0];
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

pub fn spherical_jn(n: usize, x: f64) -> f64 {
    spherical_jn_all(n, x)[n]
}

/// Leading terms of j_n(x) = x^n/(2n+1)!! · (1 - x²/(2(2n+3)) + ...).
fn jn_series(n: usize, x: f64) -> f64 {
    let mut double_fact = 1.0;
    for k in 0..=n {
        double_fact *= (2 * k + 1) as f64;
    }
    let x2 = x * x;
    let leading = if n == 0 { 1.0 } else { x.powi(n as i32) };
    let c1 = x2 / (2.0 * (2.0 * n as f64 + 3.0));
    let c2 = x2 * x2 / (8.0 * (2.0 * n as f64 + 3.0) * (2.0 * n as f64 + 5.0));
    leading / double_fact * (1.0 - c1 + c2)
}

/// P_0 .. P_nmax at `x` by the three-term recurrence.
pub fn legendre_pn_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax >= 1 {
        out.push(x);
    }
    for n in 1..nmax {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed forms built from derivatives of the sinc function, n <= 4.
    fn jn_closed(n: usize, x: f64) -> f64 {
        let (s, c) = (x.sin(), x.cos());
        match n {
            0 => s / x,
            1 => s / (x * x) - c / x,
            2 => (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 * c / (x * x),
            3 => {
                (15.0 / x.powi(4) - 6.0 / (x * x)) * s - (15.0 / x.powi(3) - 1.0 / x) * c
            }
            4 => {
                (105.0 / x.powi(5) - 45.0 / x.powi(3) + 1.0 / x) * s
                    - (105.0 / x.powi(4) - 10.0 / (x * x)) * c
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn values_at_zero() {
        let j = spherical_jn_all(6, 0.0);
        assert_eq!(j[0], 1.0);
        for &v in &j[1..] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn matches_sinc_derivative_closed_forms() {
        // Small x excluded: the closed forms cancel catastrophically there
        // (the series path is checked separately).
        for &x in &[0.3, 0.5, 1.0, 2.5, 7.0, 20.0, 55.5] {
            let j = spherical_jn_all(4, x);
            for n in 0..=4 {
                let want = jn_closed(n, x);
                assert!(
                    (j[n] - want).abs() < 1e-10 * want.abs().max(1.0),
                    "j_{n}({x}) = {} vs {}",
                    j[n],
                    want
                );
            }
        }
    }

    #[test]
    fn high_order_small_argument_is_tiny_but_finite() {
        let j = spherical_jn_all(100, 0.5);
        assert!(j[100].abs() < 1e-100);
        assert!(j[100].is_finite());
        // j_10(1) reference value (Abramowitz & Stegun scale).
        let j10 = spherical_jn(10, 1.0);
        assert!((j10 - 7.11655e-11).abs() < 1e-15, "j10 = {j10:e}");
    }

    #[test]
    fn legendre_recurrence_known_values() {
        let p = legendre_pn_all(4, 0.5);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[1], 0.5);
        assert!((p[2] - (-0.125)).abs() < 1e-15);
        assert!((p[3] - (-0.4375)).abs() < 1e-15);
        assert!((p[4] - (-0.2890625)).abs() < 1e-15);
    }

    #[test]
    fn legendre_orthogonality_by_quadrature() {
        use crate::optimize::quad::integrate_real;
        for n in 0..=10usize {
            for m in 0..=10usize {
                let v = integrate_real(
                    |k| {
                        let p = legendre_pn_all(n.max(m), k);
                        p[n] * p[m]
                    },
                    -1.0,
                    1.0,
                    1e-12,
                )
                .unwrap();
                let want = if n == m { 2.0 / (2.0 * n as f64 + 1.0) } else { 0.0 };
                assert!((v - want).abs() < 1e-10, "({n},{m}): {v} vs {want}");
            }
        }
    }
}
