//! `speckle`: Monte Carlo area fractions and gradient statistics for random
//! bandlimited waves.

use std::fmt::Write as _;

use clap::Args;
use serde::Serialize;

use superwave_core::speckle::{generate_speckle, measure_fractions, FractionOptions, SpeckleModel};
use superwave_core::{BandDescriptor, Grid2D, Result};

use super::{write_field_artifact, write_json, write_text, Ctx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumArg {
    Disk,
    Annular,
}

#[derive(Debug, Args, Serialize)]
pub struct SpeckleArgs {
    #[arg(long, value_enum, default_value_t = SpectrumArg::Disk)]
    pub spectrum: SpectrumArg,

    /// Band limit k_max.
    #[arg(long, default_value_t = 8.0)]
    pub kmax: f64,

    /// Inner radius for annular spectra; the default is the thin ring
    /// k_min = k_max.
    #[arg(long)]
    pub kmin: Option<f64>,

    /// Samples per axis of the square grid.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,

    /// Grid spacing; π/dx must exceed k_max.
    #[arg(long, default_value_t = 0.125)]
    pub dx: f64,

    #[arg(long, default_value_t = 64)]
    pub realizations: u64,

    /// Plane waves per realization.
    #[arg(long, default_value_t = 64)]
    pub waves: usize,

    /// Write the first few realization fields as .swf artifacts.
    #[arg(long, default_value_t = 0)]
    pub dump_realizations: u64,
}

pub fn run(args: &SpeckleArgs, ctx: &mut Ctx) -> Result<()> {
    let band = match args.spectrum {
        SpectrumArg::Disk => BandDescriptor::disk(args.kmax)?,
        SpectrumArg::Annular => BandDescriptor::annular(args.kmin.unwrap_or(args.kmax), args.kmax)?,
    };
    let model = SpeckleModel {
        band,
        mean_intensity: 1.0,
        n_waves: args.waves,
        seed: ctx.seed,
    };
    let grid = Grid2D::centered_square(args.grid, args.grid as f64 * args.dx)?;
    let stats = measure_fractions(&model, grid, args.realizations, FractionOptions::default())?;
    write_json(ctx, "stats.json", &stats)?;

    // Histogram CSV: one row per (gradient, intensity) cell.
    let h = &stats.histogram;
    let mut text = String::from("grad_chi,intensity_over_io,mass\n");
    for gb in 0..h.g_bins {
        let g = (gb as f64 + 0.5) / h.g_bins as f64 * h.g_max;
        for ib in 0..h.i_bins {
            let i = (ib as f64 + 0.5) / h.i_bins as f64 * h.i_max_over_io;
            let _ = writeln!(text, "{:.6e},{:.6e},{:.17e}", g, i, h.mass[gb * h.i_bins + ib]);
        }
    }
    write_text(ctx, "histogram.csv", &text)?;

    for r in 0..args.dump_realizations.min(args.realizations) {
        let real = generate_speckle(&model, grid, r)?;
        write_field_artifact(ctx, &format!("realization_{r:03}.swf"), &real)?;
    }
    Ok(())
}
