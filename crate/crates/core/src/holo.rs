//! Phase-only hologram encoding (amplitude-phase blazed gratings), the
//! closed-form first diffraction order, grating rendering with 8-bit
//! quantization, and a far-field simulation of the first order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::{Grid, Grid2D};
use crate::spectrum::{forward_transform, inverse_transform, Spectrum};
use crate::util::sinc;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GratingKind {
    Binary,
    Sinusoidal,
    Blazed,
}

/// Normalized target A·e^{iχ} on a 2D grid.
#[derive(Debug, Clone)]
pub struct TargetField {
    pub grid: Grid2D,
    /// Amplitude in [0, 1] after normalization.
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    /// Maximum amplitude before normalization.
    pub amplitude_scale: f64,
}

impl TargetField {
    /// Split a complex field into normalized amplitude and phase.
    pub fn from_field(field: &SampledField) -> Result<Self> {
        let grid = match &field.grid {
            Grid::Two(g) => *g,
            Grid::One(_) => {
                return Err(Error::InvalidArgument("holography expects 2D fields".into()))
            }
        };
        let scale = field.max_abs();
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("target field is identically zero".into()));
        }
        let amplitude = field.values.iter().map(|v| v.norm() / scale).collect();
        let phase = field.values.iter().map(|v| v.arg()).collect();
        Ok(TargetField {
            grid,
            amplitude,
            phase,
            amplitude_scale: scale,
        })
    }

    pub fn value(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.amplitude[i], self.phase[i])
    }
}

/// Per-pixel modulation and phase plus the carrier grating.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HologramPlan {
    pub grid: Grid2D,
    /// M ∈ [0, 1].
    pub modulation: Vec<f64>,
    /// Φ, unwrapped.
    pub phase: Vec<f64>,
    /// Carrier pitch Λx.
    pub pitch: f64,
    pub kind: GratingKind,
    pub amplitude_scale: f64,
}

/// Inverse of sinc on its monotone branch [−π, 0] (where sinc runs 0 → 1),
/// by bisection to 1e-12.
pub fn inverse_sinc(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidArgument(format!(
            "sinc inverse needs a value in [0, 1], got {a}"
        )));
    }
    // Endpoints where sinc is flat to machine precision (the root is only
    // resolvable to ~sqrt(eps) by bisection there).
    if a == 1.0 {
        return Ok(0.0);
    }
    if a == 0.0 {
        return Ok(-std::f64::consts::PI);
    }
    let (mut lo, mut hi) = (-std::f64::consts::PI, 0.0);
    // sinc is increasing on [−π, 0].
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if sinc(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse-engineer the blazed amplitude-phase hologram:
/// M = 1 + sinc⁻¹(A)/π and Φ = χ − πM.
pub fn encode_hologram(target: &TargetField, pitch: f64) -> Result<HologramPlan> {
    if !(pitch > 0.0) {
        return Err(Error::InvalidArgument("pitch must be positive".into()));
    }
    let mut modulation = Vec::with_capacity(target.amplitude.len());
    let mut phase = Vec::with_capacity(target.amplitude.len());
    for (&a, &chi) in target.amplitude.iter().zip(&target.phase) {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidArgument(format!(
                "amplitude {a} outside [0, 1]; normalize the target first"
            )));
        }
        let m = 1.0 + inverse_sinc(a)? / std::f64::consts::PI;
        modulation.push(m);
        phase.push(chi - std::f64::consts::PI * m);
    }
    Ok(HologramPlan {
        grid: target.grid,
        modulation,
        phase,
        pitch,
        kind: GratingKind::Blazed,
        amplitude_scale: target.amplitude_scale,
    })
}

/// Closed-form first diffraction order of a blazed plan:
/// −sinc(πM − π)·e^{i(Φ + πM)} per pixel.
///
/// For an encoded target this evaluates to −A·e^{iχ}; the leading sign is
/// the stated convention and is global.
pub fn first_order_field(plan: &HologramPlan) -> Result<SampledField> {
    if plan.kind != GratingKind::Blazed {
        return Err(Error::InvalidArgument(
            "the first-order closed form applies to blazed gratings".into(),
        ));
    }
    let values = plan
        .modulation
        .iter()
        .zip(&plan.phase)
        .map(|(&m, &phi)| {
            let u = std::f64::consts::PI * (m - 1.0);
            -sinc(u) * Complex64::from_polar(1.0, phi + std::f64::consts::PI * m)
        })
        .collect();
    SampledField::new(plan.grid, values)
}

/// Render the plan as a real phase map on its grid.
///
/// binary: π(1 + Sign sin(Φ + 2πx/Λx)); sinusoidal: π(1 + sin(·))/2;
/// blazed: M·Mod(Φ + 2πx/Λx, 2π). Quantization rounds to 256 uniform
/// levels over [0, 2π].
pub fn render_grating(plan: &HologramPlan, quantize_8bit: bool) -> Result<Vec<f64>> {
    if plan.grid.dx > plan.pitch / 4.0 {
        return Err(Error::InvalidGrid(format!(
            "pixel pitch {:.3e} under-resolves the grating period {:.3e} (need >= 4 per period)",
            plan.grid.dx, plan.pitch
        )));
    }
    let mut map = Vec::with_capacity(plan.grid.n_samples());
    for iy in 0..plan.grid.ny {
        for ix in 0..plan.grid.nx {
            let i = plan.grid.index(ix, iy);
            let carrier = plan.phase[i] + TAU * plan.grid.x(ix) / plan.pitch;
            let v = match plan.kind {
                GratingKind::Binary => {
                    std::f64::consts::PI * (1.0 + carrier.sin().signum())
                }
                GratingKind::Sinusoidal => {
                    std::f64::consts::PI * (1.0 + carrier.sin()) / 2.0
                }
                GratingKind::Blazed => plan.modulation[i] * carrier.rem_euclid(TAU),
            };
            map.push(if quantize_8bit {
                (v / TAU * 255.0).round() / 255.0 * TAU
            } else {
                v
            });
        }
    }
    Ok(map)
}

/// Write a phase map as an 8-bit grayscale PGM (levels 0..=255 over [0, 2π]).
pub fn write_pgm(path: &std::path::Path, grid: &Grid2D, map: &[f64]) -> Result<()> {
    if map.len() != grid.n_samples() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for a {}x{} grid",
            map.len(),
            grid.nx,
            grid.ny
        )));
    }
    let mut data = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    data.extend(
        map.iter()
            .map(|v| (v / TAU * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    std::fs::write(path, data).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Illuminate the blazed grating with a uniform plane wave, select the
/// first diffraction order with a rectangular spectral window of half-width
/// π/Λx around the carrier, and re-center it at zero frequency.
///
/// A blaze sampled at the plan grid feeds aliased diffraction orders back
/// onto the carrier at O(dx/Λx), so the grating is rendered internally on an
/// x-refined grid (the smooth target is supersampled spectrally and
/// re-encoded per fine pixel) before the spectral window is applied. The
/// windowed order is bandlimited well inside the plan grid's Nyquist, so the
/// result decimates back exactly.
pub fn simulate_first_order(plan: &HologramPlan) -> Result<SampledField> {
    let grid = plan.grid;
    if grid.dx > plan.pitch / 4.0 {
        return Err(Error::InvalidGrid(format!(
            "pixel pitch {:.3e} under-resolves the grating period {:.3e} (need >= 4 per period)",
            grid.dx, plan.pitch
        )));
    }
    let carrier = TAU / plan.pitch;
    let half = std::f64::consts::PI / plan.pitch;

    // Orders separate only if the encoded first order fits in the window.
    let closed = first_order_field(plan)?;
    let target_band = crate::spectrum::measured_bandlimit_axis(&closed, 0, 1e-6)?;
    if target_band > half {
        return Err(Error::InvalidArgument(format!(
            "diffraction orders overlap: target bandwidth {target_band:.3e} needs pitch < {:.3e}",
            std::f64::consts::PI / target_band
        )));
    }

    const OVERSAMPLE: usize = 8;
    let fine = Grid2D::new(
        grid.nx * OVERSAMPLE,
        grid.ny,
        grid.dx / OVERSAMPLE as f64,
        grid.dy,
        grid.origin_x,
        grid.origin_y,
    )?;
    // Supersample the smooth complex target A·e^{iχ} = −closed by embedding
    // its spectrum in the fine grid (the per-pixel M and Φ maps wrap and do
    // not interpolate cleanly).
    let spec = forward_transform(&closed)?;
    let mut fine_vals = vec![Complex64::new(0.0, 0.0); fine.n_samples()];
    for jy in 0..grid.ny {
        for jx in 0..grid.nx {
            let jxf = if jx < grid.nx.div_ceil(2) {
                jx
            } else {
                jx + fine.nx - grid.nx
            };
            fine_vals[jy * fine.nx + jxf] = spec.values[jy * grid.nx + jx];
        }
    }
    let fine_target = inverse_transform(&Spectrum {
        grid: fine.into(),
        values: fine_vals,
    })?;

    // Re-encode and render the blaze per fine pixel; interpolation ringing
    // can push the magnitude marginally past 1, so clamp.
    let mut slm_vals = Vec::with_capacity(fine.n_samples());
    for iy in 0..fine.ny {
        for ix in 0..fine.nx {
            let t = -fine_target.values[iy * fine.nx + ix];
            let a = t.norm().min(1.0);
            let m = 1.0 + inverse_sinc(a)? / std::f64::consts::PI;
            let phi = t.arg() - std::f64::consts::PI * m;
            let v = m * (phi + TAU * fine.x(ix) / plan.pitch).rem_euclid(TAU);
            slm_vals.push(Complex64::from_polar(1.0, v));
        }
    }
    let slm = SampledField::new(fine, slm_vals)?;
    let mut spec = forward_transform(&slm)?;
    for jy in 0..fine.ny {
        for jx in 0..fine.nx {
            let kx = fine.kx(jx);
            if (kx - carrier).abs() > half {
                spec.values[jy * fine.nx + jx] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let windowed = inverse_transform(&Spectrum {
        grid: spec.grid,
        values: spec.values,
    })?;
    // Remove the carrier in real space (the carrier is rarely on a bin) and
    // decimate back to the plan grid.
    let values = (0..grid.n_samples())
        .map(|i| {
            let (ix, iy) = (i % grid.nx, i / grid.nx);
            windowed.values[iy * fine.nx + ix * OVERSAMPLE]
                * Complex64::from_polar(1.0, -carrier * grid.x(ix))
        })
        .collect();
    SampledField::new(grid, values)
}

/// Laguerre-Gaussian mode LG_p^m at the waist (test and demo target).
pub fn lg_mode(grid: Grid2D, p: u32, m: i32, waist: f64) -> Result<SampledField> {
    if !(waist > 0.0) {
        return Err(Error::InvalidArgument("waist must be positive".into()));
    }
    let am = m.unsigned_abs();
    SampledField::from_fn_2d(grid, |x, y| {
        let r2 = (x * x + y * y) / (waist * waist);
        let rho = 2.0 * r2;
        let lag = laguerre(p, am, rho);
        let radial = (2.0 * r2).sqrt().powi(am as i32) * lag * (-r2).exp();
        let phi = (y).atan2(x) * m as f64;
        Complex64::from_polar(radial.abs(), phi + if radial < 0.0 { std::f64::consts::PI } else { 0.0 })
    })
}

/// Generalized Laguerre polynomial L_p^α(x) by the three-term recurrence.
fn laguerre(p: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    let mut l0 = 1.0;
    if p == 0 {
        return l0;
    }
    let mut l1 = 1.0 + a - x;
    for k in 1..p {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * l1 - (kf + a) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = next;
    }
    l1
}
