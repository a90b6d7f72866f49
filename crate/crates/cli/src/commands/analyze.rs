//! `analyze`: local wavenumber/growth maps and super-region reports for a
//! stored field.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use superwave_core::analysis::{
    local_map, super_regions, supergrowth_strength, AnalysisOptions, DerivativeScheme, LocalMap,
};
use superwave_core::{Grid, Result, SampledField};

use super::{read_field_input, write_json, write_text, Ctx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Spectral,
    Central4,
}

impl From<SchemeArg> for DerivativeScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Spectral => DerivativeScheme::Spectral,
            SchemeArg::Central4 => DerivativeScheme::CentralDiff4,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Field file (.swf binary or CSV).
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = SchemeArg::Spectral)]
    pub scheme: SchemeArg,

    /// Relative |f| threshold below which samples are masked invalid.
    #[arg(long, default_value_t = 1e-6)]
    pub mask_threshold: f64,

    /// Field band limit; enables the strength map Γ (irradiance limit 2x
    /// this) and the super-region report.
    #[arg(long)]
    pub bandlimit: Option<f64>,
}

pub fn run(args: &AnalyzeArgs, ctx: &mut Ctx) -> Result<()> {
    let field = read_field_input(ctx, &args.input)?;
    let opts = AnalysisOptions {
        scheme: args.scheme.into(),
        mask_threshold: args.mask_threshold,
    };
    let map = match args.bandlimit {
        Some(b) => supergrowth_strength(&field, 2.0 * b, opts)?,
        None => local_map(&field, opts)?,
    };
    write_analysis_csv(ctx, "analysis.csv", &field, &map)?;
    if let Some(b) = args.bandlimit {
        let report = super_regions(&map, b)?;
        write_json(ctx, "regions.json", &report)?;
    }
    Ok(())
}

/// Columns: x[, y], re, im, k_local, kappa_local, gamma, valid.
pub fn write_analysis_csv(
    ctx: &mut Ctx,
    name: &str,
    field: &SampledField,
    map: &LocalMap,
) -> Result<()> {
    let mut text = String::new();
    let gamma = |i: usize| map.gamma.get(i).copied().unwrap_or(f64::NAN);
    match &field.grid {
        Grid::One(g) => {
            text.push_str("x,re,im,k_local,kappa_local,gamma,valid\n");
            for i in 0..g.n_samples {
                let v = field.values[i];
                let _ = writeln!(
                    text,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                    g.coordinate(i),
                    v.re,
                    v.im,
                    map.k_local[i],
                    map.kappa_local[i],
                    gamma(i),
                    map.valid[i] as u8
                );
            }
        }
        Grid::Two(g) => {
            text.push_str("x,y,re,im,k_local,kappa_local,gamma,valid\n");
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    let i = g.index(ix, iy);
                    let v = field.values[i];
                    let _ = writeln!(
                        text,
                        "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                        g.x(ix),
                        g.y(iy),
                        v.re,
                        v.im,
                        map.k_local[i],
                        map.kappa_local[i],
                        gamma(i),
                        map.valid[i] as u8
                    );
                }
            }
        }
    }
    write_text(ctx, name, &text)?;
    Ok(())
}
