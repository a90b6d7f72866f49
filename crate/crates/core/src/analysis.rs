//! Local wavenumber, local growth rate, supergrowth strength and
//! super-region extraction.
//!
//! The local wavenumber is k(x) = Im ∂ₓ ln f and the local growth rate is
//! κ(x) = Re ∂ₓ ln f, both evaluated as (f*·∂f)/|f|². 2D fields report the
//! gradient magnitudes with the signed components retained. Samples close to
//! an intensity null are masked invalid: the logarithmic derivative diverges
//! at field zeros.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::Grid;
use crate::spectrum::spectral_derivative;

/// Relative |f| threshold below which a sample is flagged invalid.
pub const DEFAULT_MASK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeScheme {
    /// Multiply the spectrum by i·k; exact for bandlimited periodic samples.
    Spectral,
    /// 4th-order central differences; degrades gracefully on noisy data.
    /// The two samples nearest each non-periodic edge are marked invalid.
    CentralDiff4,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub scheme: DerivativeScheme,
    pub mask_threshold: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            scheme: DerivativeScheme::Spectral,
            mask_threshold: DEFAULT_MASK_THRESHOLD,
        }
    }
}

/// Per-sample local analysis of a field.
#[derive(Debug, Clone)]
pub struct LocalMap {
    pub grid: Grid,
    /// Local wavenumber |Im ∂ ln f| magnitude for 2D, signed for 1D.
    pub k_local: Vec<f64>,
    /// Local growth rate, signed for 1D, gradient magnitude for 2D.
    pub kappa_local: Vec<f64>,
    /// Supergrowth strength Γ; empty unless computed by
    /// [`supergrowth_strength`].
    pub gamma: Vec<f64>,
    pub valid: Vec<bool>,
    /// Signed (x, y) components for 2D maps.
    pub k_components: Option<[Vec<f64>; 2]>,
    pub kappa_components: Option<[Vec<f64>; 2]>,
}

fn derivative(field: &SampledField, axis: usize, scheme: DerivativeScheme) -> Result<Vec<Complex64>> {
    match scheme {
        DerivativeScheme::Spectral => Ok(spectral_derivative(field, axis)?.values),
        DerivativeScheme::CentralDiff4 => central_diff4(field, axis),
    }
}

fn central_diff4(field: &SampledField, axis: usize) -> Result<Vec<Complex64>> {
    let stencil = |vals: &dyn Fn(isize) -> Complex64, h: f64| -> Complex64 {
        (vals(-2) - vals(2) + (vals(1) - vals(-1)) * 8.0) / (12.0 * h)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); field.len()];
    match &field.grid {
        Grid::One(g) => {
            if axis != 0 {
                return Err(Error::InvalidArgument("1D field has only axis 0".into()));
            }
            let n = g.n_samples as isize;
            for i in 2..n - 2 {
                let at = |o: isize| field.values[(i + o) as usize];
                out[i as usize] = stencil(&at, g.spacing);
            }
        }
        Grid::Two(g) => {
            let (n, stride, h) = match axis {
                0 => (g.nx as isize, 1isize, g.dx),
                1 => (g.ny as isize, g.nx as isize, g.dy),
                _ => return Err(Error::InvalidArgument("axis must be 0 or 1".into())),
            };
            let (other_n, other_stride) = if axis == 0 {
                (g.ny as isize, g.nx as isize)
            } else {
                (g.nx as isize, 1isize)
            };
            for q in 0..other_n {
                for i in 2..n - 2 {
                    let base = q * other_stride + i * stride;
                    let at = |o: isize| field.values[(base + o * stride) as usize];
                    out[base as usize] = stencil(&at, h);
                }
            }
        }
    }
    Ok(out)
}

fn edge_invalid_mask(grid: &Grid, scheme: DerivativeScheme) -> Vec<bool> {
    let mut valid = vec![true; grid.n_samples()];
    if scheme == DerivativeScheme::CentralDiff4 {
        match grid {
            Grid::One(g) => {
                for i in 0..g.n_samples {
                    if i < 2 || i + 2 >= g.n_samples {
                        valid[i] = false;
                    }
                }
            }
            Grid::Two(g) => {
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        if ix < 2 || ix + 2 >= g.nx || iy < 2 || iy + 2 >= g.ny {
                            valid[g.index(ix, iy)] = false;
                        }
                    }
                }
            }
        }
    }
    valid
}

/// Compute k and κ together (they come from the same logarithmic derivative).
pub fn local_map(field: &SampledField, opts: AnalysisOptions) -> Result<LocalMap> {
    let max_abs = field.max_abs();
    let mut valid = edge_invalid_mask(&field.grid, opts.scheme);
    if max_abs == 0.0 {
        // All-zero field: nothing to claim anywhere.
        return Ok(LocalMap {
            grid: field.grid,
            k_local: vec![0.0; field.len()],
            kappa_local: vec![0.0; field.len()],
            gamma: Vec::new(),
            valid: vec![false; field.len()],
            k_components: None,
            kappa_components: None,
        });
    }
    let cutoff = opts.mask_threshold * max_abs;

    let axes: &[usize] = match field.grid {
        Grid::One(_) => &[0],
        Grid::Two(_) => &[0, 1],
    };
    let mut log_deriv: Vec<Vec<Complex64>> = Vec::new();
    for &axis in axes {
        let d = derivative(field, axis, opts.scheme)?;
        let ld: Vec<Complex64> = field
            .values
            .iter()
            .zip(&d)
            .map(|(f, df)| {
                if f.norm() < cutoff {
                    Complex64::new(0.0, 0.0)
                } else {
                    df / f
                }
            })
            .collect();
        log_deriv.push(ld);
    }
    for (i, f) in field.values.iter().enumerate() {
        if f.norm() < cutoff {
            valid[i] = false;
        }
    }

    let (k_local, kappa_local, k_components, kappa_components) = if log_deriv.len() == 1 {
        let k: Vec<f64> = log_deriv[0].iter().map(|z| z.im).collect();
        let kap: Vec<f64> = log_deriv[0].iter().map(|z| z.re).collect();
        (k, kap, None, None)
    } else {
        let kx: Vec<f64> = log_deriv[0].iter().map(|z| z.im).collect();
        let ky: Vec<f64> = log_deriv[1].iter().map(|z| z.im).collect();
        let cx: Vec<f64> = log_deriv[0].iter().map(|z| z.re).collect();
        let cy: Vec<f64> = log_deriv[1].iter().map(|z| z.re).collect();
        let k: Vec<f64> = kx.iter().zip(&ky).map(|(a, b)| a.hypot(*b)).collect();
        let kap: Vec<f64> = cx.iter().zip(&cy).map(|(a, b)| a.hypot(*b)).collect();
        (k, kap, Some([kx, ky]), Some([cx, cy]))
    };

    Ok(LocalMap {
        grid: field.grid,
        k_local,
        kappa_local,
        gamma: Vec::new(),
        valid,
        k_components,
        kappa_components,
    })
}

/// Local wavenumber k(x) = Im ∂ₓ ln f (gradient magnitude |∇χ| in 2D).
pub fn local_wavenumber(field: &SampledField) -> Result<LocalMap> {
    local_map(field, AnalysisOptions::default())
}

/// Local growth rate κ(x) = Re ∂ₓ ln f.
pub fn local_growth(field: &SampledField) -> Result<LocalMap> {
    local_map(field, AnalysisOptions::default())
}

/// Supergrowth strength Γ = |∂ ln I| / (2·k_max^s).
///
/// Accepts either an irradiance (real, nonnegative values) or a complex
/// field, in which case the irradiance |f|² is formed internally and the
/// exact identity ∂ln I = 2·Re(f*·∂f)/|f|² is used.
pub fn supergrowth_strength(
    field: &SampledField,
    irradiance_bandlimit: f64,
    opts: AnalysisOptions,
) -> Result<LocalMap> {
    if !(irradiance_bandlimit > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "irradiance bandlimit must be positive, got {irradiance_bandlimit}"
        )));
    }
    let is_real = field.values.iter().all(|v| v.im == 0.0);
    if is_real {
        if let Some(i) = field.values.iter().position(|v| v.re < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "negative irradiance sample at flat index {i}"
            )));
        }
    }

    let mut map;
    let kappa_irr: Vec<f64>;
    if is_real {
        // Treat the values as an irradiance; Γ needs ∂ ln I directly.
        let max_i = field.max_abs();
        let cutoff = opts.mask_threshold * max_i;
        let mut valid = edge_invalid_mask(&field.grid, opts.scheme);
        let axes: &[usize] = match field.grid {
            Grid::One(_) => &[0],
            Grid::Two(_) => &[0, 1],
        };
        let mut comps: Vec<Vec<f64>> = Vec::new();
        for &axis in axes {
            let d = derivative(field, axis, opts.scheme)?;
            comps.push(
                field
                    .values
                    .iter()
                    .zip(&d)
                    .map(|(f, df)| if f.re < cutoff { 0.0 } else { df.re / f.re })
                    .collect(),
            );
        }
        for (i, f) in field.values.iter().enumerate() {
            if f.re < cutoff {
                valid[i] = false;
            }
        }
        kappa_irr = if comps.len() == 1 {
            comps[0].clone()
        } else {
            comps[0]
                .iter()
                .zip(&comps[1])
                .map(|(a, b)| a.hypot(*b))
                .collect()
        };
        map = LocalMap {
            grid: field.grid,
            k_local: vec![0.0; field.len()],
            kappa_local: kappa_irr.clone(),
            gamma: Vec::new(),
            valid,
            k_components: None,
            kappa_components: None,
        };
    } else {
        map = local_map(field, opts)?;
        // ∂ ln I = 2 Re ∂ ln f, with 2D components combined in magnitude.
        kappa_irr = map.kappa_local.iter().map(|k| 2.0 * k).collect();
    }
    map.gamma = kappa_irr
        .iter()
        .map(|k| k.abs() / irradiance_bandlimit)
        .collect();
    Ok(map)
}

/// One contiguous super-region.
#[derive(Debug, Clone, Serialize)]
pub struct SuperRegion {
    pub kind: SuperKind,
    /// (x_min, x_max) for 1D; ((x_min, y_min), (x_max, y_max)) bounding box for 2D.
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperKind {
    Superoscillation,
    Supergrowth,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperRegionReport {
    pub superoscillating_fraction: f64,
    pub supergrowing_fraction: f64,
    pub regions: Vec<SuperRegion>,
    pub reference_bandlimit: f64,
    pub valid_samples: usize,
}

/// Fractions and connected regions where the field behaves super-anything.
///
/// Superoscillation: |k| strictly above `bandlimit`. Supergrowth: Γ > 1 when
/// a strength map is present, otherwise |κ| strictly above `bandlimit`.
pub fn super_regions(map: &LocalMap, bandlimit: f64) -> Result<SuperRegionReport> {
    if !(bandlimit > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bandlimit must be positive, got {bandlimit}"
        )));
    }
    let n_valid = map.valid.iter().filter(|v| **v).count();
    if n_valid == 0 {
        return Err(Error::InvalidArgument(
            "local map has no valid samples".into(),
        ));
    }
    // Strictly above the limit, with a roundoff-scale guard so a tone sitting
    // exactly at the band edge does not flicker across the threshold.
    let limit = bandlimit * (1.0 + 1e-9);
    let so_flag: Vec<bool> = map
        .k_local
        .iter()
        .zip(&map.valid)
        .map(|(k, &v)| v && k.abs() > limit)
        .collect();
    let sg_flag: Vec<bool> = if map.gamma.is_empty() {
        map.kappa_local
            .iter()
            .zip(&map.valid)
            .map(|(k, &v)| v && k.abs() > limit)
            .collect()
    } else {
        map.gamma
            .iter()
            .zip(&map.valid)
            .map(|(g, &v)| v && *g > 1.0)
            .collect()
    };
    let so_count = so_flag.iter().filter(|f| **f).count();
    let sg_count = sg_flag.iter().filter(|f| **f).count();

    let mut regions = Vec::new();
    regions.extend(connected_regions(&map.grid, &so_flag, SuperKind::Superoscillation));
    regions.extend(connected_regions(&map.grid, &sg_flag, SuperKind::Supergrowth));

    Ok(SuperRegionReport {
        superoscillating_fraction: so_count as f64 / n_valid as f64,
        supergrowing_fraction: sg_count as f64 / n_valid as f64,
        regions,
        reference_bandlimit: bandlimit,
        valid_samples: n_valid,
    })
}

fn connected_regions(grid: &Grid, flags: &[bool], kind: SuperKind) -> Vec<SuperRegion> {
    match grid {
        Grid::One(g) => {
            let mut out = Vec::new();
            let mut start: Option<usize> = None;
            for i in 0..=g.n_samples {
                let on = i < g.n_samples && flags[i];
                match (start, on) {
                    (None, true) => start = Some(i),
                    (Some(s), false) => {
                        out.push(SuperRegion {
                            kind,
                            x_min: g.coordinate(s),
                            x_max: g.coordinate(i - 1),
                            y_min: None,
                            y_max: None,
                            sample_count: i - s,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            out
        }
        Grid::Two(g) => {
            // 4-connected labeling via flood fill; regions carry bounding boxes.
            let mut seen = vec![false; flags.len()];
            let mut out = Vec::new();
            let mut stack = Vec::new();
            for i0 in 0..flags.len() {
                if !flags[i0] || seen[i0] {
                    continue;
                }
                let mut count = 0usize;
                let (mut xmin, mut xmax) = (usize::MAX, 0usize);
                let (mut ymin, mut ymax) = (usize::MAX, 0usize);
                stack.push(i0);
                seen[i0] = true;
                while let Some(i) = stack.pop() {
                    count += 1;
                    let (ix, iy) = (i % g.nx, i / g.nx);
                    xmin = xmin.min(ix);
                    xmax = xmax.max(ix);
                    ymin = ymin.min(iy);
                    ymax = ymax.max(iy);
                    let mut push = |j: usize| {
                        if flags[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    };
                    if ix > 0 {
                        push(i - 1);
                    }
                    if ix + 1 < g.nx {
                        push(i + 1);
                    }
                    if iy > 0 {
                        push(i - g.nx);
                    }
                    if iy + 1 < g.ny {
                        push(i + g.nx);
                    }
                }
                out.push(SuperRegion {
                    kind,
                    x_min: g.x(xmin),
                    x_max: g.x(xmax),
                    y_min: Some(g.y(ymin)),
                    y_max: Some(g.y(ymax)),
                    sample_count: count,
                });
            }
            out
        }
    }
}
