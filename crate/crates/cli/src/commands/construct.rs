//! `construct`: closed-form superoscillatory field designs.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use superwave_core::analysis::{supergrowth_strength, AnalysisOptions, DerivativeScheme};
use superwave_core::construct::{
    canvas_function, forced_zero_field, product_function, taylor_match_coeffs, CanvasDesign,
    ForcedZeroDesign, ProductFunctionParams,
};
use superwave_core::{Grid1D, Grid2D, Result};

use super::analyze::write_analysis_csv;
use super::{read_json_config, write_field_artifact, write_json, Ctx};

#[derive(Debug, Args, Serialize)]
pub struct ProductArgs {
    /// Exponent N in [cos(x/N) + i a sin(x/N)]^N.
    #[arg(long, default_value_t = 20)]
    pub n: u32,

    /// Superoscillation strength a (local wavenumber at x = 0).
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub a: f64,

    #[arg(long, default_value_t = 4096)]
    pub samples: usize,

    /// Grid length, centered on the superoscillation at x = 0. Over a full
    /// period |f| spans a^2N in magnitude, so the default is a short window
    /// where the local map stays well conditioned.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,

    /// Output field file name (.swf for binary, anything else CSV).
    #[arg(long, default_value = "field.swf")]
    pub field_out: String,
}

pub fn product(args: &ProductArgs, ctx: &mut Ctx) -> Result<()> {
    let params = ProductFunctionParams::new(args.n, args.a)?;
    let grid = Grid1D::centered(args.samples, args.length)?;
    let field = product_function(params, grid)?;
    write_field_artifact(ctx, &args.field_out, &field)?;
    // The spectrum lives on k_n = 1 - 2n/N, so the band limit is 1 and the
    // irradiance band limit is 2. Central differences because the window is
    // not a full period.
    let opts = AnalysisOptions {
        scheme: DerivativeScheme::CentralDiff4,
        ..AnalysisOptions::default()
    };
    let map = supergrowth_strength(&field, 2.0, opts)?;
    write_analysis_csv(ctx, "analysis.csv", &field, &map)?;
    Ok(())
}

/// Mirror of the core design with unknown-key rejection at the CLI boundary.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForcedZeroConfig {
    omega: f64,
    n: u32,
    m: u32,
    zeros: Vec<(f64, f64)>,
}

#[derive(Debug, Args, Serialize)]
pub struct ForcedZerosArgs {
    /// JSON design: {"omega", "n", "m", "zeros": [[x, y], ...]}.
    #[arg(long)]
    pub config: PathBuf,

    /// Samples per axis.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,

    /// Square grid side length.
    #[arg(long, default_value_t = 16.0)]
    pub length: f64,

    #[arg(long, default_value = "field.swf")]
    pub field_out: String,
}

pub fn forced_zeros(args: &ForcedZerosArgs, ctx: &mut Ctx) -> Result<()> {
    let cfg: ForcedZeroConfig = read_json_config(&args.config)?;
    ctx.rec.add_input(&args.config);
    let design = ForcedZeroDesign {
        omega: cfg.omega,
        n: cfg.n,
        m: cfg.m,
        zeros: cfg.zeros,
    };
    let grid = Grid2D::centered_square(args.samples, args.length)?;
    let field = forced_zero_field(&design, grid)?;
    write_field_artifact(ctx, &args.field_out, &field)?;
    write_json(ctx, "design.json", &design)?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanvasConfig {
    omega: f64,
    m: u32,
    poly_coeffs: Vec<(f64, f64)>,
    #[serde(default)]
    square_integrability_waiver: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CanvasArgs {
    /// JSON design: {"omega", "m", "poly_coeffs": [[re, im], ...]}.
    #[arg(long)]
    pub config: PathBuf,

    #[arg(long, default_value_t = 4096)]
    pub samples: usize,

    #[arg(long, default_value_t = 64.0)]
    pub length: f64,

    #[arg(long, default_value = "field.swf")]
    pub field_out: String,
}

pub fn canvas(args: &CanvasArgs, ctx: &mut Ctx) -> Result<()> {
    let cfg: CanvasConfig = read_json_config(&args.config)?;
    ctx.rec.add_input(&args.config);
    let design = CanvasDesign {
        omega: cfg.omega,
        m: cfg.m,
        poly_coeffs: cfg.poly_coeffs,
        square_integrability_waiver: cfg.square_integrability_waiver,
    };
    let grid = Grid1D::centered(args.samples, args.length)?;
    let field = canvas_function(&design, grid)?;
    write_field_artifact(ctx, &args.field_out, &field)?;
    write_json(ctx, "design.json", &design)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct TaylorArgs {
    /// Matching order N (band k_j = 1 - 2j/N).
    #[arg(long, default_value_t = 12)]
    pub n: u32,

    /// Target local wavenumber a of e^{iax}.
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub a: f64,

    #[arg(long, default_value_t = 4096)]
    pub samples: usize,

    #[arg(long)]
    pub length: Option<f64>,

    #[arg(long, default_value = "field.swf")]
    pub field_out: String,
}

pub fn taylor(args: &TaylorArgs, ctx: &mut Ctx) -> Result<()> {
    let design = taylor_match_coeffs(args.n, args.a)?;
    let length = args
        .length
        .unwrap_or(2.0 * std::f64::consts::PI * args.n as f64);
    let grid = Grid1D::centered(args.samples, length)?;
    let field = design.sample(grid)?;
    write_field_artifact(ctx, &args.field_out, &field)?;
    write_json(ctx, "design.json", &design)?;
    Ok(())
}
