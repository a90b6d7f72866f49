//! Command-line front end for the superwave toolkit: field construction,
//! analysis, fitting, speckle statistics, propagation, holography, and noisy
//! comb recovery, with a reproducibility manifest for every run.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use superwave_core::Error;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "superwave",
    version,
    about = "Bandlimited-waveform engineering: superoscillatory and supergrowing fields"
)]
pub struct Cli {
    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Seed for every stochastic stage; fixed default keeps runs reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (1 guarantees byte-identical outputs). Falls back to
    /// the SUPERWAVE_THREADS environment variable, then to 1.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Build superoscillatory fields from closed-form designs.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Fit bandlimited approximations to targets.
    #[command(subcommand)]
    Fit(FitCmd),
    /// Local wavenumber/growth analysis of a stored field.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Monte Carlo speckle ensemble statistics.
    Speckle(commands::speckle::SpeckleArgs),
    /// Scalar angular-spectrum propagation, hole-array masks, hotspot scans.
    Propagate(commands::propagate::PropagateArgs),
    /// Phase-only hologram encoding, rendering and simulation.
    #[command(subcommand)]
    Holo(HoloCmd),
    /// Noise injection and comb-based spectral-filter recovery.
    Recover(commands::recover::RecoverArgs),
    /// Tidy CSV bundles from prior run outputs.
    #[command(subcommand)]
    Plotdata(PlotdataCmd),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum ConstructCmd {
    /// Product function [cos(x/N) + i a sin(x/N)]^N.
    Product(commands::construct::ProductArgs),
    /// Bandlimited 2D field with forced zero lines.
    ForcedZeros(commands::construct::ForcedZerosArgs),
    /// Polynomial on a sinc-power canvas envelope.
    Canvas(commands::construct::CanvasArgs),
    /// Taylor-matched superoscillation Σ X_j e^{i k_j x}.
    Taylor(commands::construct::TaylorArgs),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum FitCmd {
    /// Finite-interval pseudo-inverse approximation of a cosine target.
    Interval(commands::fit::IntervalArgs),
    /// Whole-line spherical-Bessel expansion of a cosine target.
    Bessel(commands::fit::BesselArgs),
    /// Least-squares comb amplitudes through target samples.
    Comb(commands::fit::CombArgs),
    /// Interference-minimizing phase delays for equal-amplitude tones.
    Phases(commands::fit::PhasesArgs),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum HoloCmd {
    /// Target field -> per-pixel modulation and phase plan.
    Encode(commands::holo::EncodeArgs),
    /// Plan -> device phase map (PGM and CSV).
    Render(commands::holo::RenderArgs),
    /// Plan -> simulated first diffraction order.
    Simulate(commands::holo::SimulateArgs),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum PlotdataCmd {
    /// x, k, kappa, band_upper, band_lower from an analysis CSV.
    Fig1(commands::plotdata::Fig1Args),
    /// t, target, approx, inside_interval from an interval-fit design.
    Interval(commands::plotdata::IntervalArgs),
    /// One irradiance CSV per z-plane from a propagated mask.
    Carpet(commands::plotdata::CarpetArgs),
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidGrid(_)
        | Error::InvalidArgument(_)
        | Error::ShapeMismatch(_)
        | Error::Parse { .. } => 2,
        Error::NonFinite(_) | Error::Numeric(_) => 3,
        Error::Io { .. } => 4,
    }
}

fn kind_for(err: &Error) -> &'static str {
    match err {
        Error::InvalidGrid(_) => "invalid_grid",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::Parse { .. } => "parse",
        Error::NonFinite(_) => "non_finite",
        Error::Numeric(_) => "numeric",
        Error::Io { .. } => "io",
    }
}

fn resolve_threads(cli: &Cli) -> usize {
    cli.threads
        .or_else(|| {
            std::env::var("SUPERWAVE_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = resolve_threads(&cli);
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("{{\"error\":\"thread pool: {e}\",\"kind\":\"numeric\",\"exit_code\":3}}");
        return ExitCode::from(3);
    }
    match commands::dispatch(&cli) {
        Ok(manifest) => {
            for w in &manifest.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}",
                serde_json::json!({
                    "status": "ok",
                    "manifest": cli.out.join(manifest::MANIFEST_NAME),
                    "outputs": manifest.outputs.iter().map(|o| &o.path).collect::<Vec<_>>(),
                })
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code_for(&e);
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": e.to_string(),
                    "kind": kind_for(&e),
                    "exit_code": code,
                })
            );
            ExitCode::from(code)
        }
    }
}
