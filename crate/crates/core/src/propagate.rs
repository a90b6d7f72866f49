//! Scalar angular-spectrum propagation and quasiperiodic hole-array
//! apertures for photonic-carpet hot-spot studies.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::{Grid, Grid2D};
use crate::spectrum::{forward_transform, inverse_transform};

/// Spectral power fraction beyond this share of the Nyquist radius counts as
/// aliasing-prone.
const NYQUIST_GUARD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagationKernel {
    /// exp(−i z (k_x²+k_y²)/(2k)); the Fresnel regime.
    Paraxial,
    /// exp(i z (√(k²−k⊥²) − k)) with evanescent decay beyond the light cone.
    Helmholtz,
}

#[derive(Debug, Clone)]
pub struct PropagationSetup {
    pub wavelength: f64,
    pub distance: f64,
    pub field: SampledField,
    pub kernel: PropagationKernel,
    /// Zero-pad 2x per axis before transforming and crop afterwards.
    /// Suppresses wraparound at the cost of exact unitarity on the cropped
    /// window, so it is off by default.
    pub pad: bool,
}

impl PropagationSetup {
    pub fn paraxial(wavelength: f64, distance: f64, field: SampledField) -> Self {
        PropagationSetup {
            wavelength,
            distance,
            field,
            kernel: PropagationKernel::Paraxial,
            pad: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub field: SampledField,
    /// Spectral power fraction within 10% of the grid Nyquist.
    pub nyquist_energy_fraction: f64,
    /// Set when that fraction exceeds 1%.
    pub aliasing_warning: bool,
}

fn grid_2d(field: &SampledField) -> Result<Grid2D> {
    match &field.grid {
        Grid::Two(g) => Ok(*g),
        Grid::One(_) => Err(Error::InvalidArgument(
            "propagation expects a 2D field".into(),
        )),
    }
}

/// Propagate by the angular-spectrum method: transform, multiply by the
/// transfer phase, transform back. The carrier e^{ikz} is removed from both
/// kernels so z only advances the transverse structure.
pub fn propagate_field(setup: &PropagationSetup) -> Result<PropagationResult> {
    if !(setup.wavelength > 0.0) {
        return Err(Error::InvalidArgument("wavelength must be positive".into()));
    }
    if !setup.distance.is_finite() {
        return Err(Error::InvalidArgument("distance must be finite".into()));
    }
    let grid = grid_2d(&setup.field)?;

    let (work_field, work_grid) = if setup.pad {
        let padded = Grid2D::new(
            2 * grid.nx,
            2 * grid.ny,
            grid.dx,
            grid.dy,
            grid.origin_x - grid.nx as f64 * grid.dx / 2.0,
            grid.origin_y - grid.ny as f64 * grid.dy / 2.0,
        )?;
        let mut values = vec![Complex64::new(0.0, 0.0); padded.n_samples()];
        let (ox, oy) = (grid.nx / 2, grid.ny / 2);
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                values[padded.index(ix + ox, iy + oy)] = setup.field.values[grid.index(ix, iy)];
            }
        }
        (SampledField::new(padded, values)?, padded)
    } else {
        (setup.field.clone(), grid)
    };

    let mut spec = forward_transform(&work_field)?;
    let k = 2.0 * std::f64::consts::PI / setup.wavelength;
    let z = setup.distance;
    let nyq = std::f64::consts::PI / work_grid.dx.min(work_grid.dy);
    let mut total_power = 0.0;
    let mut edge_power = 0.0;
    for jy in 0..work_grid.ny {
        let ky = work_grid.ky(jy);
        for jx in 0..work_grid.nx {
            let kx = work_grid.kx(jx);
            let idx = jy * work_grid.nx + jx;
            let p = spec.values[idx].norm_sqr();
            total_power += p;
            if kx.hypot(ky) > NYQUIST_GUARD * nyq {
                edge_power += p;
            }
            let k_perp2 = kx * kx + ky * ky;
            let transfer = match setup.kernel {
                PropagationKernel::Paraxial => {
                    Complex64::from_polar(1.0, -z * k_perp2 / (2.0 * k))
                }
                PropagationKernel::Helmholtz => {
                    if k_perp2 <= k * k {
                        Complex64::from_polar(1.0, z * ((k * k - k_perp2).sqrt() - k))
                    } else {
                        Complex64::new((-(k_perp2 - k * k).sqrt() * z).exp(), 0.0)
                    }
                }
            };
            spec.values[idx] *= transfer;
        }
    }
    let out = inverse_transform(&spec)?;

    let mut field = if setup.pad {
        let (ox, oy) = (grid.nx / 2, grid.ny / 2);
        let mut values = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                values[grid.index(ix, iy)] = out.values[work_grid.index(ix + ox, iy + oy)];
            }
        }
        SampledField::new(grid, values)?
    } else {
        out
    };
    if let Some(band) = setup.field.band {
        field = field.with_band(band);
    }
    field.scale_log = setup.field.scale_log;

    let frac = if total_power > 0.0 {
        edge_power / total_power
    } else {
        0.0
    };
    Ok(PropagationResult {
        field,
        nyquist_energy_fraction: frac,
        aliasing_warning: frac > 0.01,
    })
}

/// A quasiperiodic array of circular holes in an opaque screen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoleArraySpec {
    /// Rotational symmetry order of the point set (10 for a Penrose-like
    /// pentagrid).
    pub symmetry: u32,
    pub hole_diameter: f64,
    pub min_separation: f64,
    pub aperture_diameter: f64,
    pub hole_count: usize,
    pub seed: u64,
}

impl HoleArraySpec {
    pub fn validate(&self) -> Result<()> {
        if self.symmetry < 4 {
            return Err(Error::InvalidArgument("symmetry order must be >= 4".into()));
        }
        if !(self.hole_diameter > 0.0) || self.hole_diameter >= self.min_separation {
            return Err(Error::InvalidArgument(
                "hole diameter must be positive and below the minimum separation".into(),
            ));
        }
        if !(self.aperture_diameter > self.min_separation) {
            return Err(Error::InvalidArgument(
                "aperture must exceed the minimum separation".into(),
            ));
        }
        if self.hole_count == 0 {
            return Err(Error::InvalidArgument("need at least one hole".into()));
        }
        Ok(())
    }
}

/// Vertices of the de Bruijn multigrid dual within `radius` of the origin,
/// in units where the grid period is 1. `m` grid families at angles πj/m
/// give a 2m-fold symmetric point set.
fn pentagrid_points(m: usize, offsets: &[f64], radius: f64) -> Vec<(f64, f64)> {
    let dirs: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let th = std::f64::consts::PI * j as f64 / m as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let range = radius.ceil() as i64 + 2;
    let mut pts = Vec::new();
    for j in 0..m {
        for l in j + 1..m {
            let (ex, ey) = dirs[j];
            let (fx, fy) = dirs[l];
            let det = ex * fy - ey * fx;
            if det.abs() < 1e-9 {
                continue;
            }
            for a in -range..=range {
                for b in -range..=range {
                    // Intersection of e_j·x = a + γ_j with e_l·x = b + γ_l.
                    let ra = a as f64 + offsets[j];
                    let rb = b as f64 + offsets[l];
                    let x = (ra * fy - rb * ey) / det;
                    let y = (rb * ex - ra * fx) / det;
                    if x.hypot(y) > radius {
                        continue;
                    }
                    // Dual vertex: sum of the rounded-up grid indices.
                    let (mut vx, mut vy) = (0.0, 0.0);
                    for (q, &(gx, gy)) in dirs.iter().enumerate() {
                        let kq = if q == j {
                            a as f64
                        } else if q == l {
                            b as f64
                        } else {
                            (gx * x + gy * y - offsets[q]).ceil()
                        };
                        vx += kq * gx;
                        vy += kq * gy;
                    }
                    pts.push((vx, vy));
                }
            }
        }
    }
    pts
}

/// Rasterize a quasiperiodic hole array as a binary transmission mask.
pub fn quasiperiodic_mask(spec: &HoleArraySpec, grid: Grid2D) -> Result<SampledField> {
    spec.validate()?;
    let samples_per_hole = spec.hole_diameter / grid.dx.max(grid.dy);
    if samples_per_hole < 6.0 {
        return Err(Error::InvalidGrid(format!(
            "grid resolves a hole with only {samples_per_hole:.1} samples; need >= 6"
        )));
    }
    let accepted = hole_centers(spec)?;

    let mut values = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
    let r = spec.hole_diameter / 2.0;
    for &(cx, cy) in &accepted {
        let ix_lo = ((cx - r - grid.origin_x) / grid.dx).floor().max(0.0) as usize;
        let ix_hi = (((cx + r - grid.origin_x) / grid.dx).ceil() as usize).min(grid.nx - 1);
        let iy_lo = ((cy - r - grid.origin_y) / grid.dy).floor().max(0.0) as usize;
        let iy_hi = (((cy + r - grid.origin_y) / grid.dy).ceil() as usize).min(grid.ny - 1);
        for iy in iy_lo..=iy_hi {
            for ix in ix_lo..=ix_hi {
                if (grid.x(ix) - cx).hypot(grid.y(iy) - cy) <= r {
                    values[grid.index(ix, iy)] = Complex64::new(1.0, 0.0);
                }
            }
        }
    }
    SampledField::new(grid, values)
}

/// The thinned quasiperiodic hole centers for `spec`, deterministic in the
/// seed.
pub fn hole_centers(spec: &HoleArraySpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let m = (spec.symmetry as usize).div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let offsets: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();

    // Lattice unit equal to the separation gives a candidate set several
    // times denser than the target packing; the thinning pass below selects
    // a subset that honors the separation exactly.
    let unit = spec.min_separation;
    let radius_units = spec.aperture_diameter / 2.0 / unit;
    let mut pts = pentagrid_points(m, &offsets, radius_units + 2.0);
    for p in pts.iter_mut() {
        *p = (p.0 * unit, p.1 * unit);
    }
    pts.retain(|&(x, y)| x.hypot(y) <= spec.aperture_diameter / 2.0);
    pts.sort_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)).then(a.0.total_cmp(&b.0)));
    pts.dedup_by(|a, b| (a.0 - b.0).hypot(a.1 - b.1) < 1e-9 * unit);
    pts.shuffle(&mut rng);

    // Greedy thinning on a spatial hash at the separation scale.
    let cell = spec.min_separation;
    let mut accepted: Vec<(f64, f64)> = Vec::new();
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    'cand: for &(x, y) in &pts {
        let (bx, by) = key(x, y);
        for nx in bx - 1..=bx + 1 {
            for ny in by - 1..=by + 1 {
                if let Some(ids) = buckets.get(&(nx, ny)) {
                    for &i in ids {
                        let (ax, ay) = accepted[i];
                        if (x - ax).hypot(y - ay) < spec.min_separation {
                            continue 'cand;
                        }
                    }
                }
            }
        }
        buckets.entry((bx, by)).or_default().push(accepted.len());
        accepted.push((x, y));
        if accepted.len() == spec.hole_count {
            break;
        }
    }
    if accepted.len() < spec.hole_count {
        return Err(Error::InvalidArgument(format!(
            "packing infeasible: placed {} of {} holes",
            accepted.len(),
            spec.hole_count
        )));
    }
    Ok(accepted)
}

#[derive(Debug, Clone, Serialize)]
pub struct Hotspot {
    pub x: f64,
    pub y: f64,
    pub peak: f64,
    pub fwhm: f64,
    pub sub_diffraction: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HotspotReport {
    pub spots: Vec<Hotspot>,
    /// λ/(2·NA).
    pub diffraction_limit: f64,
}

/// Locate local irradiance maxima above `threshold`·max and measure their
/// full width at half maximum from the four axis-aligned half-max crossings.
pub fn find_hotspots(
    grid: Grid2D,
    irradiance: &[f64],
    threshold: f64,
    wavelength: f64,
    numerical_aperture: f64,
) -> Result<HotspotReport> {
    if irradiance.len() != grid.n_samples() {
        return Err(Error::ShapeMismatch(format!(
            "{} samples on a {}x{} grid",
            irradiance.len(),
            grid.nx,
            grid.ny
        )));
    }
    if irradiance.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "irradiance must be finite and nonnegative".into(),
        ));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument("threshold must be in [0, 1]".into()));
    }
    if !(wavelength > 0.0) || !(numerical_aperture > 0.0) {
        return Err(Error::InvalidArgument(
            "wavelength and NA must be positive".into(),
        ));
    }
    let limit = wavelength / (2.0 * numerical_aperture);
    let max = irradiance.iter().cloned().fold(0.0, f64::max);
    let min = irradiance.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || max - min < 1e-12 * max {
        return Ok(HotspotReport {
            spots: Vec::new(),
            diffraction_limit: limit,
        });
    }
    let cut = threshold * max;
    let at = |ix: usize, iy: usize| irradiance[grid.index(ix, iy)];

    let mut spots = Vec::new();
    for iy in 1..grid.ny - 1 {
        for ix in 1..grid.nx - 1 {
            let v = at(ix, iy);
            if v < cut {
                continue;
            }
            let mut is_peak = true;
            'nb: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let w = at((ix as i64 + dx) as usize, (iy as i64 + dy) as usize);
                    if w > v || (w == v && (dx, dy) < (0, 0)) {
                        is_peak = false;
                        break 'nb;
                    }
                }
            }
            if !is_peak {
                continue;
            }
            let half = v / 2.0;
            // Half-max crossing distance along one axis direction.
            let walk = |step: (i64, i64), h: f64| -> Option<f64> {
                let (mut px, mut py) = (ix as i64, iy as i64);
                let mut prev = v;
                for s in 1..grid.nx.max(grid.ny) as i64 {
                    px += step.0;
                    py += step.1;
                    if px < 0 || py < 0 || px >= grid.nx as i64 || py >= grid.ny as i64 {
                        return None;
                    }
                    let w = at(px as usize, py as usize);
                    if w <= half {
                        let frac = (prev - half) / (prev - w);
                        return Some(((s - 1) as f64 + frac) * h);
                    }
                    prev = w;
                }
                None
            };
            let dxp = walk((1, 0), grid.dx);
            let dxm = walk((-1, 0), grid.dx);
            let dyp = walk((0, 1), grid.dy);
            let dym = walk((0, -1), grid.dy);
            if let (Some(a), Some(b), Some(c), Some(d)) = (dxp, dxm, dyp, dym) {
                let fwhm = ((a + b) + (c + d)) / 2.0;
                spots.push(Hotspot {
                    x: grid.x(ix),
                    y: grid.y(iy),
                    peak: v,
                    fwhm,
                    sub_diffraction: fwhm < limit,
                });
            }
        }
    }
    spots.sort_by(|a, b| b.peak.total_cmp(&a.peak));
    Ok(HotspotReport {
        spots,
        diffraction_limit: limit,
    })
}
