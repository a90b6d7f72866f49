//! `fit`: bandlimited least-squares approximations and phase optimization.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use superwave_core::optimize::{
    bessel_line_approx, comb_fit, interval_approx, phase_descent, PhaseDescentConfig,
};
use superwave_core::util::sinc;
use superwave_core::{Error, Result};

use super::{read_json_config, write_json, write_text, Ctx};

#[derive(Debug, Args, Serialize)]
pub struct IntervalArgs {
    /// Target cos(ω t).
    #[arg(long, default_value_t = 10.0)]
    pub omega: f64,

    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub x1: f64,

    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub x2: f64,

    /// Expansion order N (N+1 tones on the band 2π).
    #[arg(long, default_value_t = 9)]
    pub n: u32,

    /// Also dump a sampled target/approximation CSV with this many points.
    #[arg(long)]
    pub dump_samples: Option<usize>,
}

pub fn interval(args: &IntervalArgs, ctx: &mut Ctx) -> Result<()> {
    let omega = args.omega;
    let design = interval_approx(
        |x| Complex64::new((omega * x).cos(), 0.0),
        (args.x1, args.x2),
        args.n,
    )?;
    write_json(ctx, "design.json", &design)?;
    if let Some(n) = args.dump_samples {
        if n < 2 {
            return Err(Error::InvalidArgument("need at least 2 dump samples".into()));
        }
        // Sample 3x the interval so the out-of-interval blowup is visible.
        let half = 1.5 * (args.x2 - args.x1);
        let mid = 0.5 * (args.x1 + args.x2);
        let mut text = String::from("t,target,approx_re,approx_im,inside_interval\n");
        for i in 0..n {
            let t = mid - half + 2.0 * half * i as f64 / (n - 1) as f64;
            let a = design.eval(t);
            let inside = (args.x1..=args.x2).contains(&t);
            let _ = writeln!(
                text,
                "{:.17e},{:.17e},{:.17e},{:.17e},{}",
                t,
                (omega * t).cos(),
                a.re,
                a.im,
                inside as u8
            );
        }
        write_text(ctx, "samples.csv", &text)?;
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct BesselArgs {
    /// Target cos(ω x).
    #[arg(long, default_value_t = 10.0)]
    pub omega: f64,

    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub x1: f64,

    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub x2: f64,

    /// Number of spherical-Bessel terms.
    #[arg(long, default_value_t = 10)]
    pub terms: u32,
}

pub fn bessel(args: &BesselArgs, ctx: &mut Ctx) -> Result<()> {
    let omega = args.omega;
    let design = bessel_line_approx(
        |x| Complex64::new((omega * x).cos(), 0.0),
        (args.x1, args.x2),
        args.terms,
    )?;
    write_json(ctx, "design.json", &design)?;
    Ok(())
}

/// Sample-set target for the comb fit.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TargetSpec {
    /// sinc(scale · x).
    Sinc { scale: f64 },
    /// cos(ω x).
    Cos { omega: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CombFitConfig {
    teeth: usize,
    omega_min: f64,
    omega_span: f64,
    /// Fit window (x1, x2) sampled uniformly.
    window: (f64, f64),
    points: usize,
    target: TargetSpec,
}

#[derive(Debug, Args, Serialize)]
pub struct CombArgs {
    /// JSON config: {"teeth", "omega_min", "omega_span", "window": [x1, x2],
    /// "points", "target": {"kind": "sinc"|"cos", ...}}.
    #[arg(long)]
    pub config: PathBuf,
}

pub fn comb(args: &CombArgs, ctx: &mut Ctx) -> Result<()> {
    let cfg: CombFitConfig = read_json_config(&args.config)?;
    ctx.rec.add_input(&args.config);
    if cfg.points < 2 {
        return Err(Error::InvalidArgument("need at least 2 fit points".into()));
    }
    let (x1, x2) = cfg.window;
    if !(x1 < x2) {
        return Err(Error::InvalidArgument("window must satisfy x1 < x2".into()));
    }
    let xs: Vec<f64> = (0..cfg.points)
        .map(|i| x1 + (x2 - x1) * i as f64 / (cfg.points - 1) as f64)
        .collect();
    let fs: Vec<Complex64> = xs
        .iter()
        .map(|&x| {
            let v = match cfg.target {
                TargetSpec::Sinc { scale } => sinc(scale * x),
                TargetSpec::Cos { omega } => (omega * x).cos(),
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    let fit = comb_fit(&xs, &fs, cfg.teeth, cfg.omega_min, cfg.omega_span)?;
    write_json(ctx, "fit.json", &fit)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct PhasesArgs {
    /// Tone frequencies ω_i.
    #[arg(long, value_delimiter = ',', required = true)]
    pub omegas: Vec<f64>,

    /// Common tone amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    /// Half-width of the minimization window [-T_SO, T_SO].
    #[arg(long, default_value_t = 1.0)]
    pub t_so: f64,

    #[arg(long, default_value_t = 1e-2)]
    pub step_size: f64,

    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,

    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
}

pub fn phases(args: &PhasesArgs, ctx: &mut Ctx) -> Result<()> {
    let config = PhaseDescentConfig {
        t_so: args.t_so,
        step_size: args.step_size,
        max_iters: args.max_iters,
        restarts: args.restarts,
        seed: ctx.seed,
        ..PhaseDescentConfig::default()
    };
    let result = phase_descent(args.amplitude, &args.omegas, &config)?;
    write_json(ctx, "result.json", &result)?;
    Ok(())
}
