//! `propagate`: angular-spectrum propagation of a stored field or a
//! quasiperiodic hole-array mask, with hotspot detection over a z-scan.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use superwave_core::propagate::{
    find_hotspots, propagate_field, quasiperiodic_mask, HoleArraySpec, HotspotReport,
    PropagationKernel, PropagationSetup,
};
use superwave_core::{Error, Grid2D, Result, SampledField};

use super::{read_field_input, read_json_config, write_field_artifact, write_json, write_text, Ctx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelArg {
    Paraxial,
    Helmholtz,
}

impl From<KernelArg> for PropagationKernel {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Paraxial => PropagationKernel::Paraxial,
            KernelArg::Helmholtz => PropagationKernel::Helmholtz,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HoleArrayConfig {
    symmetry: u32,
    hole_diameter: f64,
    min_separation: f64,
    aperture_diameter: f64,
    hole_count: usize,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PropagateArgs {
    /// Wavelength λ.
    #[arg(long)]
    pub lambda: f64,

    /// Single propagation distance; exclusive with the z-range flags.
    #[arg(long, conflicts_with_all = ["z_start", "z_end", "z_planes"], allow_negative_numbers = true)]
    pub z: Option<f64>,

    /// Start of a z-scan (a "carpet" of planes).
    #[arg(long, requires = "z_end", requires = "z_planes", allow_negative_numbers = true)]
    pub z_start: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub z_end: Option<f64>,

    #[arg(long)]
    pub z_planes: Option<usize>,

    /// Input field file; exclusive with --mask-spec.
    #[arg(long, conflicts_with = "mask_spec")]
    pub input: Option<PathBuf>,

    /// JSON hole-array spec to rasterize as the source aperture.
    #[arg(long)]
    pub mask_spec: Option<PathBuf>,

    /// Samples per axis when rasterizing a mask.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,

    /// Side length when rasterizing a mask; the default fits the aperture
    /// with 25% margin.
    #[arg(long)]
    pub extent: Option<f64>,

    #[arg(long, value_enum, default_value_t = KernelArg::Helmholtz)]
    pub kernel: KernelArg,

    /// Zero-pad 2x per axis to suppress wraparound.
    #[arg(long, default_value_t = false)]
    pub pad: bool,

    /// Relative irradiance threshold for hotspot detection.
    #[arg(long, default_value_t = 0.5)]
    pub hotspot_threshold: f64,

    /// Numerical aperture defining the diffraction limit λ/(2NA).
    #[arg(long, default_value_t = 0.8)]
    pub na: f64,
}

/// Per-plane summary of the scan.
#[derive(Debug, Serialize)]
struct PlaneReport {
    z: f64,
    field_file: String,
    nyquist_energy_fraction: f64,
    aliasing_warning: bool,
    hotspots: HotspotReport,
}

pub fn run(args: &PropagateArgs, ctx: &mut Ctx) -> Result<()> {
    let source = source_field(args, ctx)?;
    let zs = z_planes(args)?;

    let mut planes = Vec::with_capacity(zs.len());
    let mut csv = String::from("plane,z,x,y,peak,fwhm,sub_diffraction\n");
    for (i, &z) in zs.iter().enumerate() {
        let setup = PropagationSetup {
            wavelength: args.lambda,
            distance: z,
            field: source.clone(),
            kernel: args.kernel.into(),
            pad: args.pad,
        };
        let result = propagate_field(&setup)?;
        if result.aliasing_warning {
            ctx.rec.warn(format!(
                "plane z = {z}: {:.1}% of spectral power within 10% of Nyquist",
                100.0 * result.nyquist_energy_fraction
            ));
        }
        let name = if zs.len() == 1 {
            "propagated.swf".to_string()
        } else {
            format!("plane_{i:03}.swf")
        };
        write_field_artifact(ctx, &name, &result.field)?;
        let grid = *result.field.grid.as_2d()?;
        let hotspots = find_hotspots(
            grid,
            &result.field.irradiance(),
            args.hotspot_threshold,
            args.lambda,
            args.na,
        )?;
        for s in &hotspots.spots {
            let _ = writeln!(
                csv,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                i, z, s.x, s.y, s.peak, s.fwhm, s.sub_diffraction as u8
            );
        }
        planes.push(PlaneReport {
            z,
            field_file: name,
            nyquist_energy_fraction: result.nyquist_energy_fraction,
            aliasing_warning: result.aliasing_warning,
            hotspots,
        });
    }
    write_json(ctx, "hotspots.json", &planes)?;
    write_text(ctx, "hotspots.csv", &csv)?;
    Ok(())
}

fn source_field(args: &PropagateArgs, ctx: &mut Ctx) -> Result<SampledField> {
    match (&args.input, &args.mask_spec) {
        (Some(path), None) => read_field_input(ctx, path),
        (None, Some(path)) => {
            let cfg: HoleArrayConfig = read_json_config(path)?;
            ctx.rec.add_input(path);
            let spec = HoleArraySpec {
                symmetry: cfg.symmetry,
                hole_diameter: cfg.hole_diameter,
                min_separation: cfg.min_separation,
                aperture_diameter: cfg.aperture_diameter,
                hole_count: cfg.hole_count,
                seed: cfg.seed.unwrap_or(ctx.seed),
            };
            let extent = args.extent.unwrap_or(1.25 * spec.aperture_diameter);
            let grid = Grid2D::centered_square(args.grid, extent)?;
            let mask = quasiperiodic_mask(&spec, grid)?;
            write_field_artifact(ctx, "mask.swf", &mask)?;
            Ok(mask)
        }
        _ => Err(Error::InvalidArgument(
            "exactly one of --input and --mask-spec is required".into(),
        )),
    }
}

fn z_planes(args: &PropagateArgs) -> Result<Vec<f64>> {
    match (args.z, args.z_start, args.z_end, args.z_planes) {
        (Some(z), None, None, None) => Ok(vec![z]),
        (None, Some(z0), Some(z1), Some(n)) => {
            if n < 2 {
                return Err(Error::InvalidArgument("a z-scan needs >= 2 planes".into()));
            }
            if !(z1 > z0) {
                return Err(Error::InvalidArgument("need z_end > z_start".into()));
            }
            Ok((0..n)
                .map(|i| z0 + (z1 - z0) * i as f64 / (n - 1) as f64)
                .collect())
        }
        _ => Err(Error::InvalidArgument(
            "give either --z or all of --z-start, --z-end, --z-planes".into(),
        )),
    }
}
