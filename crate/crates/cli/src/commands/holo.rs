//! `holo`: phase-only hologram encoding, device-ready rendering, and
//! first-order simulation.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use superwave_core::holo::{
    encode_hologram, first_order_field, render_grating, simulate_first_order, write_pgm,
    HologramPlan, TargetField,
};
use superwave_core::Result;

use super::{read_field_input, read_json_config, write_field_artifact, write_json, write_text, Ctx};

#[derive(Debug, Args, Serialize)]
pub struct EncodeArgs {
    /// Target field file (2D).
    #[arg(long)]
    pub input: PathBuf,

    /// Carrier grating pitch Λx.
    #[arg(long)]
    pub pitch: f64,
}

pub fn encode(args: &EncodeArgs, ctx: &mut Ctx) -> Result<()> {
    let field = read_field_input(ctx, &args.input)?;
    let target = TargetField::from_field(&field)?;
    let plan = encode_hologram(&target, args.pitch)?;
    write_json(ctx, "plan.json", &plan)?;
    let first = first_order_field(&plan)?;
    write_field_artifact(ctx, "first_order.swf", &first)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    /// Hologram plan from `holo encode`.
    #[arg(long)]
    pub plan: PathBuf,

    /// Skip 8-bit quantization and keep the full-precision phase map.
    #[arg(long, default_value_t = false)]
    pub no_quantize: bool,
}

pub fn render(args: &RenderArgs, ctx: &mut Ctx) -> Result<()> {
    let plan: HologramPlan = read_json_config(&args.plan)?;
    ctx.rec.add_input(&args.plan);
    let map = render_grating(&plan, !args.no_quantize)?;
    let pgm = ctx.out.join("grating.pgm");
    write_pgm(&pgm, &plan.grid, &map)?;
    ctx.rec.add_output(&pgm);

    // Full-precision phase map as CSV rows y-major, columns x.
    let mut text = String::new();
    for iy in 0..plan.grid.ny {
        for ix in 0..plan.grid.nx {
            if ix > 0 {
                text.push(',');
            }
            let _ = write!(text, "{:.17e}", map[plan.grid.index(ix, iy)]);
        }
        text.push('\n');
    }
    write_text(ctx, "grating.csv", &text)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Hologram plan from `holo encode`.
    #[arg(long)]
    pub plan: PathBuf,
}

/// RMS agreement between the simulated and closed-form first orders.
#[derive(Debug, Serialize)]
struct SimulationReport {
    rms_error: f64,
    pixels_per_pitch: f64,
}

pub fn simulate(args: &SimulateArgs, ctx: &mut Ctx) -> Result<()> {
    let plan: HologramPlan = read_json_config(&args.plan)?;
    ctx.rec.add_input(&args.plan);
    let simulated = simulate_first_order(&plan)?;
    write_field_artifact(ctx, "simulated.swf", &simulated)?;

    let closed = first_order_field(&plan)?;
    let n = closed.values.len() as f64;
    let rms = (closed
        .values
        .iter()
        .zip(&simulated.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / n)
        .sqrt();
    write_json(
        ctx,
        "report.json",
        &SimulationReport {
            rms_error: rms,
            pixels_per_pitch: plan.pitch / plan.grid.dx,
        },
    )?;
    Ok(())
}
