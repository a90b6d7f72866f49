//! Subcommand handlers. Each handler validates its inputs, runs the core
//! pipeline, writes artifacts under the output directory, and records them
//! in the run manifest.

pub mod analyze;
pub mod construct;
pub mod fit;
pub mod holo;
pub mod plotdata;
pub mod propagate;
pub mod recover;
pub mod speckle;

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use superwave_core::io::FieldFormat;
use superwave_core::{Error, Result, SampledField};

use crate::manifest::{RunManifest, RunRecorder};
use crate::{Cli, Command, ConstructCmd, FitCmd, HoloCmd, PlotdataCmd};

/// Per-run context shared by every handler.
pub struct Ctx<'a> {
    pub out: &'a Path,
    pub seed: u64,
    pub rec: &'a mut RunRecorder,
}

pub fn dispatch(cli: &Cli) -> Result<RunManifest> {
    let name = command_name(&cli.command);
    let config = serde_json::to_value(&cli.command)
        .map_err(|e| Error::Numeric(format!("config serialization: {e}")))?;
    let mut rec = RunRecorder::new(name, config, &cli.out)?;
    let mut ctx = Ctx {
        out: &cli.out,
        seed: cli.seed,
        rec: &mut rec,
    };
    match &cli.command {
        Command::Construct(c) => match c {
            ConstructCmd::Product(a) => construct::product(a, &mut ctx)?,
            ConstructCmd::ForcedZeros(a) => construct::forced_zeros(a, &mut ctx)?,
            ConstructCmd::Canvas(a) => construct::canvas(a, &mut ctx)?,
            ConstructCmd::Taylor(a) => construct::taylor(a, &mut ctx)?,
        },
        Command::Fit(c) => match c {
            FitCmd::Interval(a) => fit::interval(a, &mut ctx)?,
            FitCmd::Bessel(a) => fit::bessel(a, &mut ctx)?,
            FitCmd::Comb(a) => fit::comb(a, &mut ctx)?,
            FitCmd::Phases(a) => fit::phases(a, &mut ctx)?,
        },
        Command::Analyze(a) => analyze::run(a, &mut ctx)?,
        Command::Speckle(a) => speckle::run(a, &mut ctx)?,
        Command::Propagate(a) => propagate::run(a, &mut ctx)?,
        Command::Holo(c) => match c {
            HoloCmd::Encode(a) => holo::encode(a, &mut ctx)?,
            HoloCmd::Render(a) => holo::render(a, &mut ctx)?,
            HoloCmd::Simulate(a) => holo::simulate(a, &mut ctx)?,
        },
        Command::Recover(a) => recover::run(a, &mut ctx)?,
        Command::Plotdata(c) => match c {
            PlotdataCmd::Fig1(a) => plotdata::fig1(a, &mut ctx)?,
            PlotdataCmd::Interval(a) => plotdata::interval(a, &mut ctx)?,
            PlotdataCmd::Carpet(a) => plotdata::carpet(a, &mut ctx)?,
        },
    }
    rec.finish(&cli.out)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Construct(ConstructCmd::Product(_)) => "construct product",
        Command::Construct(ConstructCmd::ForcedZeros(_)) => "construct forced-zeros",
        Command::Construct(ConstructCmd::Canvas(_)) => "construct canvas",
        Command::Construct(ConstructCmd::Taylor(_)) => "construct taylor",
        Command::Fit(FitCmd::Interval(_)) => "fit interval",
        Command::Fit(FitCmd::Bessel(_)) => "fit bessel",
        Command::Fit(FitCmd::Comb(_)) => "fit comb",
        Command::Fit(FitCmd::Phases(_)) => "fit phases",
        Command::Analyze(_) => "analyze",
        Command::Speckle(_) => "speckle",
        Command::Propagate(_) => "propagate",
        Command::Holo(HoloCmd::Encode(_)) => "holo encode",
        Command::Holo(HoloCmd::Render(_)) => "holo render",
        Command::Holo(HoloCmd::Simulate(_)) => "holo simulate",
        Command::Recover(_) => "recover",
        Command::Plotdata(PlotdataCmd::Fig1(_)) => "plotdata fig1",
        Command::Plotdata(PlotdataCmd::Interval(_)) => "plotdata interval",
        Command::Plotdata(PlotdataCmd::Carpet(_)) => "plotdata carpet",
    }
}

/// `.swf` means the binary field format, anything else CSV.
pub fn infer_format(path: &Path) -> FieldFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("swf") => FieldFormat::Binary,
        _ => FieldFormat::Csv,
    }
}

/// Parse a JSON config file; unknown keys surface as a parse error naming
/// the key (schema violation, exit 2).
pub fn read_json_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

pub fn write_json(ctx: &mut Ctx, name: &str, value: &impl Serialize) -> Result<PathBuf> {
    let path = ctx.out.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numeric(format!("{name} serialization: {e}")))?;
    std::fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
    ctx.rec.add_output(&path);
    Ok(path)
}

pub fn write_text(ctx: &mut Ctx, name: &str, text: &str) -> Result<PathBuf> {
    let path = ctx.out.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
    ctx.rec.add_output(&path);
    Ok(path)
}

pub fn write_field_artifact(ctx: &mut Ctx, name: &str, field: &SampledField) -> Result<PathBuf> {
    let path = ctx.out.join(name);
    superwave_core::io::write_field(&path, field, infer_format(&path))?;
    ctx.rec.add_output(&path);
    Ok(path)
}

pub fn read_field_input(ctx: &mut Ctx, path: &Path) -> Result<SampledField> {
    let field = superwave_core::io::read_field(path, infer_format(path))?;
    ctx.rec.add_input(path);
    Ok(field)
}
