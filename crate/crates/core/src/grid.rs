//! Uniform sampling grids in one and two dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1D grid: coordinates are `origin + i * spacing` for `i in 0..n_samples`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub n_samples: usize,
    pub spacing: f64,
    pub origin: f64,
}

impl Grid1D {
    pub fn new(n_samples: usize, spacing: f64, origin: f64) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_samples must be >= 2, got {n_samples}"
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive and finite, got {spacing}"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid(format!("origin must be finite, got {origin}")));
        }
        Ok(Grid1D {
            n_samples,
            spacing,
            origin,
        })
    }

    /// Grid of `n` samples centered on zero, spanning total length `length`.
    pub fn centered(n_samples: usize, length: f64) -> Result<Self> {
        let spacing = length / n_samples as f64;
        Grid1D::new(n_samples, spacing, -0.5 * length)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_samples).map(|i| self.coordinate(i))
    }

    pub fn length(&self) -> f64 {
        self.n_samples as f64 * self.spacing
    }

    /// Spectral bin spacing 2π/(n·dx).
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length()
    }

    /// Signed wavenumber of bin `j` in natural FFT order.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n_samples;
        let jj = if j < n.div_ceil(2) {
            j as f64
        } else {
            j as f64 - n as f64
        };
        jj * self.dk()
    }

    /// Largest representable |k| on this grid (Nyquist).
    pub fn k_nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.origin) / self.spacing).round();
        (i.max(0.0) as usize).min(self.n_samples - 1)
    }
}

/// Uniform 2D grid, row-major with `y` as the slow (row) axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin_x: f64, origin_y: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "nx, ny must be >= 2, got {nx} x {ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "dx, dy must be positive and finite, got {dx}, {dy}"
            )));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Grid2D {
            nx,
            ny,
            dx,
            dy,
            origin_x,
            origin_y,
        })
    }

    /// Square grid of `n` x `n` samples centered on zero spanning `length` per side.
    pub fn centered_square(n: usize, length: f64) -> Result<Self> {
        let d = length / n as f64;
        Grid2D::new(n, n, d, d, -0.5 * length, -0.5 * length)
    }

    pub fn n_samples(&self) -> usize {
        self.nx * self.ny
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.origin_x + ix as f64 * self.dx
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.origin_y + iy as f64 * self.dy
    }

    pub fn dkx(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.nx as f64 * self.dx)
    }

    pub fn dky(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.ny as f64 * self.dy)
    }

    pub fn kx(&self, jx: usize) -> f64 {
        let jj = if jx < self.nx.div_ceil(2) {
            jx as f64
        } else {
            jx as f64 - self.nx as f64
        };
        jj * self.dkx()
    }

    pub fn ky(&self, jy: usize) -> f64 {
        let jj = if jy < self.ny.div_ceil(2) {
            jy as f64
        } else {
            jy as f64 - self.ny as f64
        };
        jj * self.dky()
    }

    /// Row-major flat index.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

/// Dimensionality tag carried by every sampled field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    One(Grid1D),
    Two(Grid2D),
}

impl Grid {
    pub fn n_samples(&self) -> usize {
        match self {
            Grid::One(g) => g.n_samples,
            Grid::Two(g) => g.n_samples(),
        }
    }

    pub fn ndim(&self) -> usize {
        match self {
            Grid::One(_) => 1,
            Grid::Two(_) => 2,
        }
    }

    /// Real-space volume element (dx, or dx·dy).
    pub fn dvol(&self) -> f64 {
        match self {
            Grid::One(g) => g.spacing,
            Grid::Two(g) => g.dx * g.dy,
        }
    }

    /// Spectral volume element (dk, or dkx·dky).
    pub fn dvol_k(&self) -> f64 {
        match self {
            Grid::One(g) => g.dk(),
            Grid::Two(g) => g.dkx() * g.dky(),
        }
    }

    pub fn as_1d(&self) -> Result<&Grid1D> {
        match self {
            Grid::One(g) => Ok(g),
            Grid::Two(_) => Err(Error::ShapeMismatch("expected a 1D grid".into())),
        }
    }

    pub fn as_2d(&self) -> Result<&Grid2D> {
        match self {
            Grid::Two(g) => Ok(g),
            Grid::One(_) => Err(Error::ShapeMismatch("expected a 2D grid".into())),
        }
    }
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::One(g)
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::Two(g)
    }
}
