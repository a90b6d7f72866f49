//! `plotdata`: tidy CSV bundles derived from prior run outputs.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use superwave_core::optimize::IntervalApproxDesign;
use superwave_core::{Error, Grid, Result};

use super::{read_field_input, read_json_config, write_text, Ctx};

#[derive(Debug, Args, Serialize)]
pub struct Fig1Args {
    /// analysis.csv from a 1D `analyze` or `construct product` run.
    #[arg(long)]
    pub analysis: PathBuf,

    /// Band limit drawn as the horizontal guide lines.
    #[arg(long, default_value_t = 1.0)]
    pub bandlimit: f64,
}

/// Columns: x, k, kappa, band_upper, band_lower.
pub fn fig1(args: &Fig1Args, ctx: &mut Ctx) -> Result<()> {
    let text = std::fs::read_to_string(&args.analysis)
        .map_err(|e| Error::io(args.analysis.display().to_string(), e))?;
    ctx.rec.add_input(&args.analysis);
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(args.analysis.display().to_string(), "empty file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    let find = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or_else(|| {
            Error::parse(
                args.analysis.display().to_string(),
                format!("missing column {name}"),
            )
        })
    };
    if cols.contains(&"y") {
        return Err(Error::InvalidArgument(
            "fig1 bundles are for 1D analyses".into(),
        ));
    }
    let (ix, ik, ikap) = (find("x")?, find("k_local")?, find("kappa_local")?);

    let mut out = String::from("x,k,kappa,band_upper,band_lower\n");
    for (ln, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            f.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    Error::parse(
                        format!("{}:{}", args.analysis.display(), ln + 2),
                        "bad numeric field",
                    )
                })
        };
        let _ = writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            get(ix)?,
            get(ik)?,
            get(ikap)?,
            args.bandlimit,
            -args.bandlimit
        );
    }
    write_text(ctx, "fig1.csv", &out)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct IntervalArgs {
    /// design.json from a `fit interval` run.
    #[arg(long)]
    pub design: PathBuf,

    /// Target frequency of the original cos(ω t) fit.
    #[arg(long, default_value_t = 10.0)]
    pub omega: f64,

    #[arg(long, default_value_t = 1024)]
    pub samples: usize,

    /// Plotted half-range as a multiple of the interval half-width.
    #[arg(long, default_value_t = 3.0)]
    pub range: f64,
}

/// Columns: t, target, approx, inside_interval.
pub fn interval(args: &IntervalArgs, ctx: &mut Ctx) -> Result<()> {
    let design: IntervalApproxDesign = read_json_config(&args.design)?;
    ctx.rec.add_input(&args.design);
    if args.samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let (x1, x2) = design.interval;
    let mid = 0.5 * (x1 + x2);
    let half = 0.5 * (x2 - x1) * args.range;
    let mut out = String::from("t,target,approx,inside_interval\n");
    for i in 0..args.samples {
        let t = mid - half + 2.0 * half * i as f64 / (args.samples - 1) as f64;
        let a = design.eval(t);
        let _ = writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{}",
            t,
            (args.omega * t).cos(),
            a.re,
            (x1..=x2).contains(&t) as u8
        );
    }
    write_text(ctx, "interval.csv", &out)?;
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct CarpetArgs {
    /// Propagated plane fields from a `propagate` z-scan, in plane order.
    #[arg(long, num_args = 1.., required = true)]
    pub fields: Vec<PathBuf>,
}

/// One irradiance CSV per z-plane, rows y-major.
pub fn carpet(args: &CarpetArgs, ctx: &mut Ctx) -> Result<()> {
    for (i, path) in args.fields.iter().enumerate() {
        let field = read_field_input(ctx, path)?;
        let grid = match &field.grid {
            Grid::Two(g) => *g,
            Grid::One(_) => {
                return Err(Error::InvalidArgument(format!(
                    "{} is 1D; carpet planes are 2D",
                    path.display()
                )))
            }
        };
        let irr = field.irradiance();
        let mut out = String::new();
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                if ix > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:.17e}", irr[grid.index(ix, iy)]);
            }
            out.push('\n');
        }
        write_text(ctx, &format!("carpet_{i:03}.csv"), &out)?;
    }
    Ok(())
}
