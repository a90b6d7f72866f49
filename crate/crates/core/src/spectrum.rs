//! Forward/inverse spectral transforms and band-limit measurement.
//!
//! The transform pair is normalized like the continuous unitary Fourier
//! transform: Σ|spectrum|²·dk = Σ|field|²·dx exactly (Parseval with measure
//! weights), and bin `j` sits at the angular wavenumber `2π·j/(n·dx)` with the
//! usual signed FFT ordering. Physical origins are folded in as a per-bin
//! phase so that a pure tone on a bin lands in exactly that bin regardless of
//! where the grid starts.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::Grid;

/// Discrete spectrum of a sampled field.
///
/// Keeps the originating real-space grid; wavenumbers are derived from it.
/// Bins are stored in natural FFT order (DC first, then positive, then
/// negative wavenumbers).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    /// Signed wavenumber of 1D bin `j`.
    pub fn wavenumber(&self, j: usize) -> Result<f64> {
        Ok(self.grid.as_1d()?.wavenumber(j))
    }

    /// Radial wavenumber magnitude of flat bin index `j`.
    pub fn wavenumber_mag(&self, j: usize) -> f64 {
        match &self.grid {
            Grid::One(g) => g.wavenumber(j).abs(),
            Grid::Two(g) => {
                let kx = g.kx(j % g.nx);
                let ky = g.ky(j / g.nx);
                kx.hypot(ky)
            }
        }
    }

    /// Total spectral power Σ|S|²·dV_k.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dvol_k()
    }
}

fn fft_in_place(values: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(values.len())
    } else {
        planner.plan_fft_forward(values.len())
    };
    fft.process(values);
}

/// Unnormalized FFT along both axes of a row-major 2D array.
fn fft2_in_place(values: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft_x = if inverse {
        planner.plan_fft_inverse(nx)
    } else {
        planner.plan_fft_forward(nx)
    };
    for row in values.chunks_exact_mut(nx) {
        fft_x.process(row);
    }
    let fft_y = if inverse {
        planner.plan_fft_inverse(ny)
    } else {
        planner.plan_fft_forward(ny)
    };
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            col[iy] = values[iy * nx + ix];
        }
        fft_y.process(&mut col);
        for iy in 0..ny {
            values[iy * nx + ix] = col[iy];
        }
    }
}

/// Forward transform of a sampled field.
pub fn forward_transform(field: &SampledField) -> Result<Spectrum> {
    if field.is_empty() {
        return Err(Error::InvalidArgument("empty field".into()));
    }
    let mut values = field.values.clone();
    match &field.grid {
        Grid::One(g) => {
            fft_in_place(&mut values, false);
            let scale = g.spacing / (2.0 * std::f64::consts::PI).sqrt();
            for (j, v) in values.iter_mut().enumerate() {
                let phase = Complex64::from_polar(scale, -g.wavenumber(j) * g.origin);
                *v *= phase;
            }
        }
        Grid::Two(g) => {
            fft2_in_place(&mut values, g.nx, g.ny, false);
            let scale = g.dx * g.dy / (2.0 * std::f64::consts::PI);
            for jy in 0..g.ny {
                let ky = g.ky(jy);
                for jx in 0..g.nx {
                    let k_dot_o = g.kx(jx) * g.origin_x + ky * g.origin_y;
                    values[jy * g.nx + jx] *= Complex64::from_polar(scale, -k_dot_o);
                }
            }
        }
    }
    Ok(Spectrum {
        grid: field.grid,
        values,
    })
}

/// Inverse transform; exact inverse of [`forward_transform`] on the same grid.
pub fn inverse_transform(spec: &Spectrum) -> Result<SampledField> {
    if spec.values.len() != spec.grid.n_samples() {
        return Err(Error::ShapeMismatch(format!(
            "spectrum has {} bins for a {}-sample grid",
            spec.values.len(),
            spec.grid.n_samples()
        )));
    }
    if let Some(i) = spec
        .values
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::NonFinite(format!("spectrum bin {i}")));
    }
    let mut values = spec.values.clone();
    match &spec.grid {
        Grid::One(g) => {
            for (j, v) in values.iter_mut().enumerate() {
                *v *= Complex64::from_polar(1.0, g.wavenumber(j) * g.origin);
            }
            fft_in_place(&mut values, true);
            let scale = (2.0 * std::f64::consts::PI).sqrt() / (g.n_samples as f64 * g.spacing);
            for v in values.iter_mut() {
                *v *= scale;
            }
        }
        Grid::Two(g) => {
            for jy in 0..g.ny {
                let ky = g.ky(jy);
                for jx in 0..g.nx {
                    let k_dot_o = g.kx(jx) * g.origin_x + ky * g.origin_y;
                    values[jy * g.nx + jx] *= Complex64::from_polar(1.0, k_dot_o);
                }
            }
            fft2_in_place(&mut values, g.nx, g.ny, true);
            let scale = 2.0 * std::f64::consts::PI
                / (g.nx as f64 * g.dx * g.ny as f64 * g.dy);
            for v in values.iter_mut() {
                *v *= scale;
            }
        }
    }
    SampledField::new(spec.grid, values)
}

/// Smallest K such that spectral power outside |k| <= K stays below
/// `floor` times the total power.
pub fn measured_bandlimit(field: &SampledField, floor: f64) -> Result<f64> {
    if !(0.0 < floor && floor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "floor must lie in (0, 1), got {floor}"
        )));
    }
    let spec = forward_transform(field)?;
    let mut bins: Vec<(f64, f64)> = spec
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| (spec.wavenumber_mag(j), v.norm_sqr()))
        .collect();
    bandlimit_from_bins(&mut bins, floor)
}

/// Per-axis band limit of a 2D field: power is marginalized over the other
/// axis and the 1D rule applied to |k_axis|. Axis 0 is x.
pub fn measured_bandlimit_axis(field: &SampledField, axis: usize, floor: f64) -> Result<f64> {
    if !(0.0 < floor && floor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "floor must lie in (0, 1), got {floor}"
        )));
    }
    let g = *field.grid.as_2d()?;
    let spec = forward_transform(field)?;
    let n = if axis == 0 { g.nx } else { g.ny };
    let mut marginal = vec![0.0; n];
    for jy in 0..g.ny {
        for jx in 0..g.nx {
            let p = spec.values[jy * g.nx + jx].norm_sqr();
            marginal[if axis == 0 { jx } else { jy }] += p;
        }
    }
    let mut bins: Vec<(f64, f64)> = marginal
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let k = if axis == 0 { g.kx(j) } else { g.ky(j) };
            (k.abs(), p)
        })
        .collect();
    bandlimit_from_bins(&mut bins, floor)
}

fn bandlimit_from_bins(bins: &mut [(f64, f64)], floor: f64) -> Result<f64> {
    let total: f64 = bins.iter().map(|&(_, p)| p).sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "field has zero spectral power".into(),
        ));
    }
    bins.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Suffix sums: out_power[i] = power strictly above bins[i].0 (ties share a radius).
    let mut i = 0;
    let mut inside = 0.0;
    while i < bins.len() {
        let k = bins[i].0;
        let mut j = i;
        while j < bins.len() && bins[j].0 == k {
            inside += bins[j].1;
            j += 1;
        }
        if total - inside < floor * total {
            return Ok(k);
        }
        i = j;
    }
    Ok(bins.last().unwrap().0)
}

/// Spectral derivative along `axis` (0 = x, 1 = y; 1D fields use axis 0).
///
/// Multiplies the spectrum by i·k. The Nyquist bin is zeroed for even sizes,
/// the standard choice for odd-order spectral derivatives.
pub fn spectral_derivative(field: &SampledField, axis: usize) -> Result<SampledField> {
    let spec = forward_transform(field)?;
    let mut values = spec.values;
    match &field.grid {
        Grid::One(g) => {
            if axis != 0 {
                return Err(Error::InvalidArgument(
                    "1D field has only axis 0".into(),
                ));
            }
            let n = g.n_samples;
            for (j, v) in values.iter_mut().enumerate() {
                let k = if n % 2 == 0 && j == n / 2 {
                    0.0
                } else {
                    g.wavenumber(j)
                };
                *v *= Complex64::new(0.0, k);
            }
        }
        Grid::Two(g) => {
            for jy in 0..g.ny {
                for jx in 0..g.nx {
                    let k = match axis {
                        0 => {
                            if g.nx % 2 == 0 && jx == g.nx / 2 {
                                0.0
                            } else {
                                g.kx(jx)
                            }
                        }
                        1 => {
                            if g.ny % 2 == 0 && jy == g.ny / 2 {
                                0.0
                            } else {
                                g.ky(jy)
                            }
                        }
                        _ => {
                            return Err(Error::InvalidArgument(
                                "axis must be 0 or 1".into(),
                            ))
                        }
                    };
                    values[jy * g.nx + jx] *= Complex64::new(0.0, k);
                }
            }
        }
    }
    let mut out = inverse_transform(&Spectrum {
        grid: field.grid,
        values,
    })?;
    out.band = field.band;
    out.scale_log = field.scale_log;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Grid2D};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dc_field_concentrates_at_zero() {
        let g = Grid1D::new(64, 0.25, -8.0).unwrap();
        let f = SampledField::from_fn_1d(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let s = forward_transform(&f).unwrap();
        let peak = s.values[0].norm();
        for (j, v) in s.values.iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-12 * peak, "bin {j} leaks: {}", v.norm());
        }
    }

    #[test]
    fn pure_tone_hits_its_bin() {
        let g = Grid1D::centered(128, 32.0).unwrap();
        let k0 = 5.0 * g.dk();
        let f = SampledField::from_fn_1d(g, |x| Complex64::from_polar(1.0, k0 * x)).unwrap();
        let s = forward_transform(&f).unwrap();
        let peak_bin = (0..128)
            .max_by(|&a, &b| s.values[a].norm().total_cmp(&s.values[b].norm()))
            .unwrap();
        assert_eq!(peak_bin, 5);
        for (j, v) in s.values.iter().enumerate() {
            if j != 5 {
                assert!(v.norm() < 1e-10 * s.values[5].norm());
            }
        }
    }

    #[test]
    fn parseval_on_random_field() {
        // Oracle: direct summation on both sides of the identity.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Grid1D::new(100, 0.173, 1.3).unwrap();
        let f = SampledField::from_fn_1d(g, |_| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
        .unwrap();
        let s = forward_transform(&f).unwrap();
        let lhs: f64 = s.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dk();
        let rhs: f64 = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.spacing;
        assert!((lhs / rhs - 1.0).abs() < 1e-10, "ratio {}", lhs / rhs);
    }

    #[test]
    fn round_trip_identity_1d_and_2d() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Grid1D::new(97, 0.1, -3.0).unwrap();
        let f = SampledField::from_fn_1d(g, |_| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
        .unwrap();
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let max_err = f
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-10 * f.max_abs());

        let g2 = Grid2D::new(24, 17, 0.3, 0.21, -1.0, 0.5).unwrap();
        let f2 = SampledField::from_fn_2d(g2, |x, y| Complex64::new((x * y).sin(), x - y)).unwrap();
        let back2 = inverse_transform(&forward_transform(&f2).unwrap()).unwrap();
        let max_err2 = f2
            .values
            .iter()
            .zip(&back2.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err2 < 1e-10 * f2.max_abs());
    }

    #[test]
    fn zero_spectrum_gives_zero_field_and_delta_gives_tone() {
        let g = Grid1D::centered(32, 16.0).unwrap();
        let spec = Spectrum {
            grid: g.into(),
            values: vec![Complex64::new(0.0, 0.0); 32],
        };
        let f = inverse_transform(&spec).unwrap();
        assert!(f.max_abs() == 0.0);

        let mut vals = vec![Complex64::new(0.0, 0.0); 32];
        vals[3] = Complex64::new(1.0, 0.0);
        let spec = Spectrum {
            grid: g.into(),
            values: vals,
        };
        let f = inverse_transform(&spec).unwrap();
        let k3 = g.wavenumber(3);
        // Complex exponential over the grid, uniform magnitude.
        let mags: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
        for m in &mags {
            assert!((m - mags[0]).abs() < 1e-12 * mags[0]);
        }
        let phase_step = (f.values[1] / f.values[0]).arg();
        assert!((phase_step - k3 * g.spacing).abs() < 1e-10);
    }

    #[test]
    fn measured_bandlimit_of_single_tone() {
        let g = Grid1D::centered(256, 16.0 * std::f64::consts::PI).unwrap();
        // k = 1 is on a bin: dk = 2π/(16π) = 1/8.
        let f = SampledField::from_fn_1d(g, |x| Complex64::from_polar(1.0, x)).unwrap();
        let k = measured_bandlimit(&f, 1e-9).unwrap();
        assert!((k - 1.0).abs() <= g.dk() + 1e-12, "K = {k}");
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g = Grid1D::new(8, 1.0, 0.0).unwrap();
        let spec = Spectrum {
            grid: g.into(),
            values: vec![Complex64::new(0.0, 0.0); 7],
        };
        assert!(inverse_transform(&spec).is_err());
    }

    #[test]
    fn spectral_derivative_of_tone() {
        let g = Grid1D::centered(64, 8.0 * std::f64::consts::PI).unwrap();
        let k0 = 4.0 * g.dk();
        let f = SampledField::from_fn_1d(g, |x| Complex64::from_polar(1.0, k0 * x)).unwrap();
        let df = spectral_derivative(&f, 0).unwrap();
        for (v, d) in f.values.iter().zip(&df.values) {
            let expect = Complex64::new(0.0, k0) * v;
            assert!((d - expect).norm() < 1e-10);
        }
    }
}
