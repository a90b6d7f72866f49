//! `recover`: noisy comb records, spectral-filter projection, and MSE
//! statistics over repeated trials.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use superwave_core::optimize::CombSpec;
use superwave_core::recover::{
    add_noise, spectral_filter_recover, AverageMode, NoiseLevel, NoiseModel, RecoveryOptions,
};
use superwave_core::{Error, Grid1D, Result, SampledField};

use super::{read_json_config, write_json, write_text, Ctx};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CombConfig {
    omega_min: f64,
    omega_span: f64,
    /// Complex tooth amplitudes as [re, im] pairs.
    amplitudes: Vec<(f64, f64)>,
    #[serde(default)]
    delays: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Coherent,
    SpectralAmplitude,
}

#[derive(Debug, Args, Serialize)]
pub struct RecoverArgs {
    /// JSON comb: {"omega_min", "omega_span", "amplitudes": [[re, im], ...]}.
    #[arg(long)]
    pub comb: PathBuf,

    /// Noise amplitude in dB relative to the peak signal amplitude inside
    /// the scoring window (positive means noise above signal).
    #[arg(long, default_value_t = 17.0)]
    pub noise_db: f64,

    /// Records averaged coherently per trial.
    #[arg(long, default_value_t = 10)]
    pub averages: usize,

    /// Independent trials (fresh noise each).
    #[arg(long, default_value_t = 1)]
    pub trials: usize,

    /// Record length; one fundamental period 2π by default.
    #[arg(long, default_value_t = 6.283185307179586)]
    pub length: f64,

    #[arg(long, default_value_t = 16384)]
    pub samples: usize,

    /// MSE scoring window (x_lo, x_hi).
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = ModeArg::Coherent)]
    pub mode: ModeArg,
}

#[derive(Debug, Serialize)]
struct RecoverReportJson {
    mse_per_trial: Vec<f64>,
    median_mse: f64,
    averages: usize,
    trials: usize,
    sigma: f64,
    leakage: f64,
    /// Recovered tooth amplitudes of the first trial, as [re, im] pairs.
    amplitudes: Vec<(f64, f64)>,
}

pub fn run(args: &RecoverArgs, ctx: &mut Ctx) -> Result<()> {
    let cfg: CombConfig = read_json_config(&args.comb)?;
    ctx.rec.add_input(&args.comb);
    let comb = CombSpec {
        omega_min: cfg.omega_min,
        omega_span: cfg.omega_span,
        amplitudes: cfg
            .amplitudes
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect(),
        delays: cfg.delays,
    };
    if args.averages == 0 || args.trials == 0 {
        return Err(Error::InvalidArgument(
            "averages and trials must be >= 1".into(),
        ));
    }
    let window = match args.window.as_deref() {
        Some([lo, hi]) if lo < hi => Some((*lo, *hi)),
        Some(_) => {
            return Err(Error::InvalidArgument(
                "window needs two values with lo < hi".into(),
            ))
        }
        None => None,
    };

    let grid = Grid1D::new(args.samples, args.length / args.samples as f64, -args.length / 2.0)?;
    let truth = SampledField::from_fn_1d(grid, |x| comb.eval(x))?;

    // Noise is referenced to the peak signal amplitude inside the window,
    // where the superoscillatory lobe is the feature being buried.
    let reference = match window {
        Some((lo, hi)) => truth
            .values
            .iter()
            .zip(grid.coordinates())
            .filter(|&(_, x)| (lo..=hi).contains(&x))
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max),
        None => truth.max_abs(),
    };
    if !(reference > 0.0) {
        return Err(Error::InvalidArgument(
            "signal vanishes on the scoring window".into(),
        ));
    }
    let noise = NoiseModel {
        level: NoiseLevel::DbRelative {
            db: args.noise_db,
            reference_amplitude: reference,
        },
        seed: ctx.seed,
    };
    let options = RecoveryOptions {
        mode: match args.mode {
            ModeArg::Coherent => AverageMode::Coherent,
            ModeArg::SpectralAmplitude => AverageMode::SpectralAmplitude,
        },
        window,
    };

    let mut mses = Vec::with_capacity(args.trials);
    let mut first_trial = None;
    let mut leakage = 0.0;
    let mut amplitudes = Vec::new();
    for trial in 0..args.trials {
        let records: Vec<SampledField> = (0..args.averages)
            .map(|j| add_noise(&truth, &noise, (trial * args.averages + j) as u64))
            .collect::<Result<_>>()?;
        let report = spectral_filter_recover(&records, &comb, Some(&truth), &options)?;
        mses.push(report.mse.unwrap_or(f64::NAN));
        if trial == 0 {
            leakage = report.leakage;
            amplitudes = report.amplitudes.iter().map(|a| (a.re, a.im)).collect();
            first_trial = Some(report.reconstructed);
        }
    }
    let mut sorted = mses.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };

    write_json(
        ctx,
        "report.json",
        &RecoverReportJson {
            mse_per_trial: mses,
            median_mse: median,
            averages: args.averages,
            trials: args.trials,
            sigma: noise.sigma()?,
            leakage,
            amplitudes,
        },
    )?;

    let rec = first_trial.expect("at least one trial");
    let mut csv = String::from("x,truth_re,truth_im,recovered_re,recovered_im\n");
    for (i, x) in grid.coordinates().enumerate() {
        let t = truth.values[i];
        let r = rec.values[i];
        let _ = writeln!(
            csv,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            x, t.re, t.im, r.re, r.im
        );
    }
    write_text(ctx, "reconstructed.csv", &csv)?;
    Ok(())
}
