//! Closed-form superoscillation constructors: the product function, forced
//! zeros, canvas functions, and Vandermonde Taylor matching.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BandDescriptor, SampledField};
use crate::grid::{Grid1D, Grid2D};
use crate::spectrum::{inverse_transform, Spectrum};
use crate::util::{binomial, sinc};

/// Magnitudes above this switch the product constructor to a rescaled
/// representation recorded in `SampledField::scale_log`.
const OVERFLOW_LOG: f64 = 690.0; // ln(1e300) ≈ 690.8

/// Parameters of f(x) = [cos(x/N) + i·a·sin(x/N)]^N.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProductFunctionParams {
    pub n: u32,
    pub a: f64,
}

impl ProductFunctionParams {
    pub fn new(n: u32, a: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        if !a.is_finite() {
            return Err(Error::InvalidArgument("a must be finite".into()));
        }
        Ok(ProductFunctionParams { n, a })
    }
}

/// Sample f(x) = [cos(x/N) + i·a·sin(x/N)]^N on a grid.
///
/// Evaluated as exp(N·ln z); exact for integer exponents on any log branch.
/// When the magnitude would overflow f64 the common factor is moved into
/// `scale_log`.
pub fn product_function(params: ProductFunctionParams, grid: Grid1D) -> Result<SampledField> {
    let n = params.n as f64;
    let logs: Vec<Complex64> = grid
        .coordinates()
        .map(|x| {
            let z = Complex64::new((x / n).cos(), params.a * (x / n).sin());
            z.ln() * n
        })
        .collect();
    let max_log = logs.iter().map(|w| w.re).fold(f64::NEG_INFINITY, f64::max);
    let shift = if max_log > OVERFLOW_LOG {
        max_log - 600.0
    } else {
        0.0
    };
    let values: Vec<Complex64> = logs
        .iter()
        .map(|w| (w - Complex64::new(shift, 0.0)).exp())
        .collect();
    let mut field = SampledField::new(grid, values)?;
    field.scale_log = shift;
    Ok(field.with_band(BandDescriptor::rectangular(1.0)?))
}

/// Closed-form Fourier data of the product function:
/// k_n = 1 - 2n/N, c_n = C(N,n)·((1+a)/2)^{N-n}·((1-a)/2)^n.
///
/// Follows from cos(u) + i·a·sin(u) = ((1+a)/2)e^{iu} + ((1-a)/2)e^{-iu};
/// the coefficients are real for real `a`.
pub fn product_fourier_coeffs(params: ProductFunctionParams) -> Vec<(f64, Complex64)> {
    let nn = params.n;
    let p = Complex64::new((1.0 + params.a) / 2.0, 0.0);
    let q = Complex64::new((1.0 - params.a) / 2.0, 0.0);
    (0..=nn)
        .map(|j| {
            let k = 1.0 - 2.0 * j as f64 / nn as f64;
            let c = binomial(nn, j) * p.powi((nn - j) as i32) * q.powi(j as i32);
            (k, c)
        })
        .collect()
}

/// Forced-zeros design: a cosine-power spectrum on
/// [-Ω/2, Ω/2]² transformed to real space, then multiplied by zero lines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForcedZeroDesign {
    pub omega: f64,
    pub n: u32,
    pub m: u32,
    /// (x_j, y_j) pairs; each contributes a factor (x - x_j)(y - y_j).
    pub zeros: Vec<(f64, f64)>,
}

impl ForcedZeroDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::InvalidArgument("omega must be positive".into()));
        }
        Ok(())
    }
}

/// Build g(x,y) = f(x,y)·Π_j (x - x_j)(y - y_j) with f the transform of the
/// cosine-power spectrum. The zero factors do not change the band limit.
pub fn forced_zero_field(design: &ForcedZeroDesign, grid: Grid2D) -> Result<SampledField> {
    design.validate()?;
    let half_band = design.omega / 2.0;
    // Nyquist for Ω plus headroom for the polynomial growth (4x oversampling).
    let k_nyq = std::f64::consts::PI / grid.dx.max(grid.dy);
    if k_nyq < 4.0 * half_band {
        return Err(Error::InvalidGrid(format!(
            "grid Nyquist {k_nyq:.3} under-resolves band {half_band:.3} (need >= 4x oversampling)"
        )));
    }
    let (x_lo, x_hi) = (grid.x(0), grid.x(grid.nx - 1));
    let (y_lo, y_hi) = (grid.y(0), grid.y(grid.ny - 1));
    for &(xj, yj) in &design.zeros {
        if !(x_lo..=x_hi).contains(&xj) || !(y_lo..=y_hi).contains(&yj) {
            return Err(Error::InvalidArgument(format!(
                "zero ({xj}, {yj}) lies outside the grid"
            )));
        }
    }

    // Sample the spectrum on the spectral grid, then inverse-transform.
    let mut spec = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
    for jy in 0..grid.ny {
        let ky = grid.ky(jy);
        for jx in 0..grid.nx {
            let kx = grid.kx(jx);
            if kx.abs() <= half_band && ky.abs() <= half_band {
                let cx = (std::f64::consts::PI * kx / design.omega).cos();
                let cy = (std::f64::consts::PI * ky / design.omega).cos();
                spec[jy * grid.nx + jx] =
                    Complex64::new(cx.powi(design.n as i32) * cy.powi(design.m as i32), 0.0);
            }
        }
    }
    let f = inverse_transform(&Spectrum {
        grid: grid.into(),
        values: spec,
    })?;

    let mut values = f.values;
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            let mut p = 1.0;
            for &(xj, yj) in &design.zeros {
                p *= (x - xj) * (y - yj);
            }
            values[grid.index(ix, iy)] *= p;
        }
    }
    Ok(SampledField::new(grid, values)?
        .with_band(BandDescriptor::rectangular(half_band)?))
}

/// Canvas-function design: g(x) = (Σ a_k x^k) · sinc(Ωx/m)^m.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanvasDesign {
    pub omega: f64,
    pub m: u32,
    /// Polynomial coefficients a_0 .. a_{n-1}, constant term first.
    pub poly_coeffs: Vec<(f64, f64)>,
    /// Allow m <= n+1 (result is not square-integrable).
    #[serde(default)]
    pub square_integrability_waiver: bool,
}

/// The m-th order canvas envelope sinc(Ωx/m)^m.
pub fn canvas_envelope(omega: f64, m: u32, x: f64) -> f64 {
    sinc(omega * x / m as f64).powi(m as i32)
}

pub fn canvas_function(design: &CanvasDesign, grid: Grid1D) -> Result<SampledField> {
    if !(design.omega > 0.0) {
        return Err(Error::InvalidArgument("omega must be positive".into()));
    }
    if design.m < 1 {
        return Err(Error::InvalidArgument("canvas order m must be >= 1".into()));
    }
    let n = design.poly_coeffs.len() as u32;
    if design.m <= n + 1 && !design.square_integrability_waiver {
        return Err(Error::InvalidArgument(format!(
            "m = {} with polynomial degree {} does not give a square-integrable function; \
             need m > n+1 or the waiver",
            design.m,
            n.saturating_sub(1)
        )));
    }
    let coeffs: Vec<Complex64> = design
        .poly_coeffs
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    let field = SampledField::from_fn_1d(grid, |x| {
        let mut poly = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            poly = poly * x + c;
        }
        poly * canvas_envelope(design.omega, design.m, x)
    })?;
    Ok(field.with_band(BandDescriptor::rectangular(design.omega)?))
}

/// Fit polynomial coefficients to a target on an interval by least squares
/// (the fitting rule when a target function rather than coefficients is
/// supplied).
pub fn fit_canvas_polynomial(
    target: impl Fn(f64) -> Complex64,
    interval: (f64, f64),
    degree: usize,
    omega: f64,
    m: u32,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    use crate::optimize::pinv::lstsq_complex;
    if interval.0 >= interval.1 {
        return Err(Error::InvalidArgument("empty fit interval".into()));
    }
    let n_samples = n_samples.max(degree + 2);
    let step = (interval.1 - interval.0) / (n_samples - 1) as f64;
    let mut rows = Vec::with_capacity(n_samples);
    let mut rhs = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let x = interval.0 + i as f64 * step;
        let env = canvas_envelope(omega, m, x);
        let mut row = Vec::with_capacity(degree + 1);
        let mut xp = 1.0;
        for _ in 0..=degree {
            row.push(Complex64::new(env * xp, 0.0));
            xp *= x;
        }
        rows.push(row);
        rhs.push(target(x));
    }
    let coeffs = lstsq_complex(&rows, &rhs, 1e-12)?;
    Ok(coeffs.iter().map(|c| (c.re, c.im)).collect())
}

/// Taylor-matching design: f_N(x) = Σ_j X_j e^{i k_j x} with
/// k_j = 1 - 2j/N matching the derivatives of e^{iax} at 0 through order N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaylorMatchDesign {
    pub n: u32,
    pub a: f64,
    /// N+1 coefficients X_0 .. X_N (real for this wavenumber family).
    pub coefficients: Vec<f64>,
}

impl TaylorMatchDesign {
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|j| 1.0 - 2.0 * j as f64 / self.n as f64)
            .collect()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.wavenumbers()
            .iter()
            .zip(&self.coefficients)
            .map(|(&k, &c)| Complex64::from_polar(1.0, k * x) * c)
            .sum()
    }

    pub fn sample(&self, grid: Grid1D) -> Result<SampledField> {
        let f = SampledField::from_fn_1d(grid, |x| self.eval(x))?;
        Ok(f.with_band(BandDescriptor::rectangular(1.0)?))
    }
}

/// Coefficients via the Lagrange/Vandermonde product formula
/// X_j = Π_{i≠j} (k_i - a)/(k_i - k_j).
///
/// The product form stays usable well past where a direct Vandermonde solve
/// loses all digits; in practice it is reliable up to N ≈ 40 for moderate
/// `a`, with the matrix solve retained only as a test oracle.
pub fn taylor_match_coeffs(n: u32, a: f64) -> Result<TaylorMatchDesign> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("a must be finite".into()));
    }
    let ks: Vec<f64> = (0..=n).map(|j| 1.0 - 2.0 * j as f64 / n as f64).collect();
    let coefficients: Vec<f64> = (0..=n as usize)
        .map(|j| {
            let mut prod = 1.0;
            for i in 0..=n as usize {
                if i != j {
                    prod *= (ks[i] - a) / (ks[i] - ks[j]);
                }
            }
            prod
        })
        .collect();
    Ok(TaylorMatchDesign { n, a, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{local_map, AnalysisOptions, DerivativeScheme};
    use crate::grid::Grid1D;
    use crate::spectrum::forward_transform;

    /// Grid whose length is one period πN of the product function (even N),
    /// putting every comb wavenumber exactly on a spectral bin.
    fn product_grid(n_big: u32, samples: usize) -> Grid1D {
        Grid1D::centered(samples, std::f64::consts::PI * n_big as f64).unwrap()
    }

    #[test]
    fn product_function_is_one_at_origin() {
        for &(n, a) in &[(1u32, 0.5), (5, 2.0), (20, 6.0)] {
            let p = ProductFunctionParams::new(n, a).unwrap();
            let grid = Grid1D::centered(64, 4.0 * std::f64::consts::PI * n as f64).unwrap();
            let f = product_function(p, grid).unwrap();
            let i0 = grid.nearest_index(0.0);
            assert!((grid.coordinate(i0)).abs() < 1e-12);
            assert!((f.values[i0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn product_wavenumber_at_origin_is_a() {
        // Differentiate on a short window around the origin: over a full
        // period |f| spans a^(2N) in magnitude, which poisons the spectral
        // derivative at the small-|f| samples.
        let p = ProductFunctionParams::new(20, 6.0).unwrap();
        let grid = Grid1D::centered(2048, 1.0).unwrap();
        let f = product_function(p, grid).unwrap();
        let opts = AnalysisOptions {
            scheme: DerivativeScheme::CentralDiff4,
            ..Default::default()
        };
        let map = local_map(&f, opts).unwrap();
        let i0 = grid.nearest_index(0.0);
        assert!(map.valid[i0]);
        assert!((map.k_local[i0] - 6.0).abs() < 1e-6, "k(0) = {}", map.k_local[i0]);
        assert!(map.kappa_local[i0].abs() < 1e-6, "kappa(0) = {}", map.kappa_local[i0]);
    }

    #[test]
    fn fourier_coeffs_sum_to_one_and_match_cosine() {
        // N=1, a=0 is cos(x): c = 1/2 at k = ±1.
        let c = product_fourier_coeffs(ProductFunctionParams::new(1, 0.0).unwrap());
        assert_eq!(c.len(), 2);
        assert!((c[0].0 - 1.0).abs() < 1e-15 && (c[0].1.re - 0.5).abs() < 1e-15);
        assert!((c[1].0 + 1.0).abs() < 1e-15 && (c[1].1.re - 0.5).abs() < 1e-15);

        // Σ c_n = f(0) = 1; the terms alternate up to ~6^20 in magnitude, so
        // the achievable accuracy is relative to Σ|c_n|, not absolute.
        let c = product_fourier_coeffs(ProductFunctionParams::new(20, 6.0).unwrap());
        let sum: Complex64 = c.iter().map(|&(_, v)| v).sum();
        let sum_abs: f64 = c.iter().map(|&(_, v)| v.norm()).sum();
        assert!((sum - Complex64::new(1.0, 0.0)).norm() < 1e-12 * sum_abs);
    }

    #[test]
    fn resummed_series_matches_direct_samples() {
        let p = ProductFunctionParams::new(12, 3.0).unwrap();
        let grid = product_grid(12, 512);
        let f = product_function(p, grid).unwrap();
        let coeffs = product_fourier_coeffs(p);
        let max_abs = f.max_abs();
        for (i, x) in grid.coordinates().enumerate() {
            let resummed: Complex64 = coeffs
                .iter()
                .map(|&(k, c)| c * Complex64::from_polar(1.0, k * x))
                .sum();
            assert!(
                (resummed - f.values[i]).norm() < 1e-10 * max_abs,
                "mismatch at x = {x}"
            );
        }
    }

    #[test]
    fn spectrum_matches_closed_form_coefficients() {
        // DFT bins against the c_n formula, bin by bin.
        for &(nn, a) in &[(4u32, 2.0), (10, 3.0), (20, 6.0)] {
            let p = ProductFunctionParams::new(nn, a).unwrap();
            let grid = product_grid(nn, 2048);
            let f = product_function(p, grid).unwrap();
            let spec = forward_transform(&f).unwrap();
            let scale = (2.0 * std::f64::consts::PI).sqrt() / grid.length();
            let coeffs = product_fourier_coeffs(p);
            let c_max = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            for &(k, c) in &coeffs {
                // k = (N-2n)/N lies on a bin: dk = 2/N.
                let j_signed = (k / grid.dk()).round() as i64;
                let j = j_signed.rem_euclid(grid.n_samples as i64) as usize;
                let got = spec.values[j] * scale;
                assert!(
                    (got - c).norm() < 1e-9 * c_max,
                    "N={nn} k={k}: got {got}, want {c}"
                );
            }
        }
    }

    #[test]
    fn product_irradiance_analytic() {
        // |f|² = [cos² + a² sin²]^N.
        let p = ProductFunctionParams::new(8, 4.0).unwrap();
        let grid = product_grid(8, 256);
        let f = product_function(p, grid).unwrap();
        for (i, x) in grid.coordinates().enumerate() {
            let c = (x / 8.0).cos();
            let s = (x / 8.0).sin();
            let expect = (c * c + 16.0 * s * s).powi(8);
            let got = f.values[i].norm_sqr();
            assert!((got / expect - 1.0).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn product_overflow_guard_sets_scale() {
        let p = ProductFunctionParams::new(400, 50.0).unwrap();
        let grid = Grid1D::centered(256, std::f64::consts::PI * 400.0).unwrap();
        let f = product_function(p, grid).unwrap();
        assert!(f.scale_log > 0.0);
        assert!(f.values.iter().all(|v| v.norm().is_finite()));
    }

    #[test]
    fn taylor_degenerate_case_is_unit_vector() {
        let n = 10u32;
        let m = 3usize;
        let a = 1.0 - 2.0 * m as f64 / n as f64;
        let d = taylor_match_coeffs(n, a).unwrap();
        for (j, &c) in d.coefficients.iter().enumerate() {
            if j == m {
                assert_eq!(c, 1.0);
            } else {
                assert_eq!(c, 0.0);
            }
        }
    }

    #[test]
    fn taylor_low_moments_match() {
        // Σ X_j = 1 and Σ X_j k_j = a are the 0th and 1st derivative matches.
        let d = taylor_match_coeffs(4, 2.0).unwrap();
        let ks = d.wavenumbers();
        let s0: f64 = d.coefficients.iter().sum();
        let s1: f64 = d.coefficients.iter().zip(&ks).map(|(c, k)| c * k).sum();
        assert!((s0 - 1.0).abs() < 1e-10, "s0 = {s0}");
        assert!((s1 - 2.0).abs() < 1e-10, "s1 = {s1}");
    }

    #[test]
    fn taylor_matches_vandermonde_solve_oracle() {
        // Independent oracle: solve the (N+1)x(N+1) Vandermonde system.
        use nalgebra::{DMatrix, DVector};
        let (n, a) = (8u32, 2.5);
        let d = taylor_match_coeffs(n, a).unwrap();
        let ks = d.wavenumbers();
        let dim = ks.len();
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        let mut b = DVector::<f64>::zeros(dim);
        for row in 0..dim {
            for (col, &k) in ks.iter().enumerate() {
                m[(row, col)] = k.powi(row as i32);
            }
            b[row] = a.powi(row as i32);
        }
        let solved = m.lu().solve(&b).expect("vandermonde solve");
        for j in 0..dim {
            assert!(
                (solved[j] - d.coefficients[j]).abs() < 1e-8 * d.coefficients[j].abs().max(1.0),
                "j = {j}: {} vs {}",
                solved[j],
                d.coefficients[j]
            );
        }
    }

    #[test]
    fn taylor_field_oscillates_at_a_near_origin() {
        let d = taylor_match_coeffs(12, 3.0).unwrap();
        let grid = Grid1D::centered(4096, 2.0).unwrap();
        let f = d.sample(grid).unwrap();
        let opts = AnalysisOptions {
            scheme: DerivativeScheme::CentralDiff4,
            ..Default::default()
        };
        let map = local_map(&f, opts).unwrap();
        let i0 = grid.nearest_index(0.0);
        assert!(
            (map.k_local[i0] - 3.0).abs() < 1e-4,
            "k(0) = {}",
            map.k_local[i0]
        );
    }

    #[test]
    fn canvas_constant_poly_is_envelope() {
        let design = CanvasDesign {
            omega: 2.0,
            m: 5,
            poly_coeffs: vec![(1.0, 0.0)],
            square_integrability_waiver: false,
        };
        let grid = Grid1D::centered(512, 40.0).unwrap();
        let g = canvas_function(&design, grid).unwrap();
        let i0 = grid.nearest_index(0.0);
        assert!((g.values[i0].re - 1.0).abs() < 1e-12);
        for (i, x) in grid.coordinates().enumerate() {
            assert!((g.values[i].re - canvas_envelope(2.0, 5, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn canvas_rejects_non_square_integrable() {
        let design = CanvasDesign {
            omega: 1.0,
            m: 3,
            poly_coeffs: vec![(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], // degree 2, n=3
            square_integrability_waiver: false,
        };
        let grid = Grid1D::centered(64, 10.0).unwrap();
        let err = canvas_function(&design, grid).unwrap_err();
        assert!(err.to_string().contains("square-integrable"));
    }

    #[test]
    fn forced_zero_lines_vanish() {
        let omega = 2.0;
        let grid = Grid2D::centered_square(128, 64.0).unwrap();
        // Put zeros on grid coordinates.
        let x1 = grid.x(64);
        let x2 = grid.x(70);
        let design = ForcedZeroDesign {
            omega,
            n: 6,
            m: 6,
            zeros: vec![(x1, x1), (x2, x2)],
        };
        let g = forced_zero_field(&design, grid).unwrap();
        let max = g.max_abs();
        for iy in 0..grid.ny {
            assert!(g.values[grid.index(64, iy)].norm() < 1e-12 * max);
            assert!(g.values[grid.index(70, iy)].norm() < 1e-12 * max);
        }
        for ix in 0..grid.nx {
            assert!(g.values[grid.index(ix, 64)].norm() < 1e-12 * max);
        }
    }

    #[test]
    fn forced_zero_rejects_outside_grid() {
        let grid = Grid2D::centered_square(64, 16.0).unwrap();
        let design = ForcedZeroDesign {
            omega: 2.0,
            n: 4,
            m: 4,
            zeros: vec![(100.0, 0.0)],
        };
        assert!(forced_zero_field(&design, grid).is_err());
    }

    #[test]
    fn forced_zero_empty_list_is_pure_transform() {
        let grid = Grid2D::centered_square(64, 32.0).unwrap();
        let design = ForcedZeroDesign {
            omega: 2.0,
            n: 4,
            m: 4,
            zeros: vec![],
        };
        let g = forced_zero_field(&design, grid).unwrap();
        // Pure transform of a real symmetric spectrum: real, peaked at center.
        let i0 = grid.index(32, 32);
        assert!(g.values[i0].re > 0.0);
        assert!(g.values[i0].norm() >= g.max_abs() * (1.0 - 1e-9));
    }
}
