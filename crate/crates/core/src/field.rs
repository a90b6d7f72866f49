//! Sampled complex scalar fields and their declared spectral support.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Grid1D, Grid2D};

/// Shape of the declared spectral support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandShape {
    Rectangular,
    Disk,
    Annular,
}

/// Declared spectral support of a field.
///
/// `second_moment_k2` is the normalized second moment used by the speckle
/// statistics: half the second moment of one Cartesian wavenumber component
/// over the support, chosen so the annular and disk area fractions come out
/// at 1/3 and 1/5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDescriptor {
    pub k_max: f64,
    pub shape: BandShape,
    /// Inner radius, annular shape only (zero-width ring when equal to `k_max`).
    pub k_min: f64,
}

impl BandDescriptor {
    pub fn rectangular(k_max: f64) -> Result<Self> {
        Self::new(k_max, BandShape::Rectangular, 0.0)
    }

    pub fn disk(k_max: f64) -> Result<Self> {
        Self::new(k_max, BandShape::Disk, 0.0)
    }

    pub fn annular(k_min: f64, k_max: f64) -> Result<Self> {
        Self::new(k_max, BandShape::Annular, k_min)
    }

    pub fn new(k_max: f64, shape: BandShape, k_min: f64) -> Result<Self> {
        if !(k_max > 0.0) || !k_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "band limit k_max must be positive, got {k_max}"
            )));
        }
        if shape == BandShape::Annular && !(0.0..=k_max).contains(&k_min) {
            return Err(Error::InvalidArgument(format!(
                "annular band requires 0 <= k_min <= k_max, got k_min={k_min}, k_max={k_max}"
            )));
        }
        Ok(BandDescriptor { k_max, shape, k_min })
    }

    /// Normalized second moment k2 of the support.
    pub fn second_moment_k2(&self) -> f64 {
        let km2 = self.k_max * self.k_max;
        match self.shape {
            // 1D band [-k_max, k_max]: <k^2>/2 = k_max^2/6.
            BandShape::Rectangular => km2 / 6.0,
            // Uniform-by-area disk: <|k|^2>/4 = k_max^2/8.
            BandShape::Disk => km2 / 8.0,
            // Uniform-by-area annulus: <|k|^2> = (k_max^2 + k_min^2)/2.
            BandShape::Annular => (km2 + self.k_min * self.k_min) / 8.0,
        }
    }
}

/// Uniformly sampled complex scalar field; the common currency of the toolkit.
///
/// Values are stored row-major for 2D grids. `scale_log` is a global
/// log-magnitude offset: the physical field is `values * exp(scale_log)`.
/// Constructors that would overflow f64 set it; everything that is invariant
/// under positive rescaling (local analysis, band measurement) ignores it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub band: Option<BandDescriptor>,
    pub scale_log: f64,
}

impl SampledField {
    pub fn new(grid: impl Into<Grid>, values: Vec<Complex64>) -> Result<Self> {
        let grid = grid.into();
        if values.len() != grid.n_samples() {
            return Err(Error::ShapeMismatch(format!(
                "grid has {} samples but {} values were supplied",
                grid.n_samples(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(format!("field value at flat index {i}")));
        }
        Ok(SampledField {
            grid,
            values,
            band: None,
            scale_log: 0.0,
        })
    }

    pub fn with_band(mut self, band: BandDescriptor) -> Self {
        self.band = Some(band);
        self
    }

    /// Sample a function of x on a 1D grid.
    pub fn from_fn_1d(grid: Grid1D, f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let values = grid.coordinates().map(f).collect();
        SampledField::new(grid, values)
    }

    /// Sample a function of (x, y) on a 2D grid.
    pub fn from_fn_2d(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n_samples());
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                values.push(f(grid.x(ix), y));
            }
        }
        SampledField::new(grid, values)
    }

    pub fn zeros(grid: impl Into<Grid>) -> Self {
        let grid = grid.into();
        SampledField {
            values: vec![Complex64::new(0.0, 0.0); grid.n_samples()],
            grid,
            band: None,
            scale_log: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total power Σ|f|²·dV of the stored values.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dvol()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Irradiance |f|² per sample (physical scale applied when finite).
    pub fn irradiance(&self) -> Vec<f64> {
        let s = (2.0 * self.scale_log).exp();
        self.values.iter().map(|v| v.norm_sqr() * s).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SampledField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            band: self.band,
            scale_log: self.scale_log,
        }
    }
}
