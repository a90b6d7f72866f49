//! Noise injection and comb-based spectral filtering: bury a superoscillatory
//! comb signal in white noise, then recover it by projecting the record onto
//! the known comb teeth and discarding everything else.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::Grid;
use crate::optimize::pinv::lstsq_complex_full;
use crate::optimize::CombSpec;

/// Noise amplitude, either directly or relative to a signal feature.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum NoiseLevel {
    StdDev(f64),
    /// σ = reference_amplitude · 10^(db/20); "x dB larger" is an amplitude
    /// ratio.
    DbRelative { db: f64, reference_amplitude: f64 },
}

/// Additive white Gaussian noise, independent per sample and per quadrature.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseModel {
    pub level: NoiseLevel,
    pub seed: u64,
}

impl NoiseModel {
    /// Per-quadrature standard deviation implied by the level.
    pub fn sigma(&self) -> Result<f64> {
        let s = match self.level {
            NoiseLevel::StdDev(s) => s,
            NoiseLevel::DbRelative {
                db,
                reference_amplitude,
            } => {
                if !(reference_amplitude >= 0.0) {
                    return Err(Error::InvalidArgument(
                        "reference amplitude must be nonnegative".into(),
                    ));
                }
                reference_amplitude * 10f64.powf(db / 20.0)
            }
        };
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise amplitude must be nonnegative and finite, got {s}"
            )));
        }
        Ok(s)
    }
}

/// Add white Gaussian noise to each sample (real and imaginary parts
/// independently). Deterministic in `(model.seed, realization)`.
pub fn add_noise(
    signal: &SampledField,
    model: &NoiseModel,
    realization: u64,
) -> Result<SampledField> {
    let sigma = model.sigma()?;
    if sigma == 0.0 {
        return Ok(signal.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(realization);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("bad noise amplitude: {e}")))?;
    let values = signal
        .values
        .iter()
        .map(|v| v + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    SampledField::new(signal.grid, values)
}

/// How multiple noisy records are combined before reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AverageMode {
    /// Average the complex records sample by sample, then project.
    Coherent,
    /// Project each record, then average tooth magnitudes (phases come from
    /// the coherent mean).
    SpectralAmplitude,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RecoveryOptions {
    pub mode: AverageMode,
    /// Window (x_lo, x_hi) over which the MSE is scored; `None` scores the
    /// whole record.
    pub window: Option<(f64, f64)>,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            mode: AverageMode::Coherent,
            window: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub reconstructed: SampledField,
    /// Recovered complex amplitude per comb tooth.
    pub amplitudes: Vec<Complex64>,
    /// Mean squared error vs ground truth over the window, normalized by the
    /// truth power there; `None` when no truth was supplied.
    pub mse: Option<f64>,
    pub averages: usize,
    /// Largest off-diagonal Gram magnitude between teeth on this record; 0
    /// means the teeth are exactly orthogonal (commensurate record), larger
    /// values quantify spectral leakage absorbed by the projection.
    pub leakage: f64,
}

/// Project noisy records onto the known comb teeth and reconstruct.
///
/// The projection solves the tooth Gram system, so it is the exact orthogonal
/// projection onto span{e^{iω_k x}} even when the record length is not
/// commensurate with the teeth; the residual non-orthogonality is reported as
/// `leakage` rather than treated as an error.
pub fn spectral_filter_recover(
    records: &[SampledField],
    comb: &CombSpec,
    truth: Option<&SampledField>,
    options: &RecoveryOptions,
) -> Result<RecoveryReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to recover from".into()));
    }
    let grid = *records[0].grid.as_1d()?;
    if records.iter().any(|r| r.grid != Grid::One(grid)) {
        return Err(Error::ShapeMismatch(
            "records must share a common grid".into(),
        ));
    }
    if let Some(t) = truth {
        if t.grid != Grid::One(grid) {
            return Err(Error::ShapeMismatch(
                "truth must live on the record grid".into(),
            ));
        }
    }
    let n = grid.n_samples as f64;
    let omegas = comb.omegas();
    let k = omegas.len();

    // Tooth Gram matrix and its worst off-diagonal entry.
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    let mut leakage = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in grid.coordinates() {
                acc += Complex64::from_polar(1.0, (omegas[b] - omegas[a]) * x);
            }
            acc /= n;
            gram[a][b] = acc;
            if a != b {
                leakage = leakage.max(acc.norm());
            }
        }
    }

    let project = |values: &[Complex64]| -> Result<Vec<Complex64>> {
        let rhs: Vec<Complex64> = omegas
            .iter()
            .map(|&w| {
                grid.coordinates()
                    .zip(values)
                    .map(|(x, v)| v * Complex64::from_polar(1.0, -w * x))
                    .sum::<Complex64>()
                    / n
            })
            .collect();
        lstsq_complex_full(&gram, &rhs, 1e-12).map(|s| s.solution)
    };

    let mut mean = vec![Complex64::new(0.0, 0.0); grid.n_samples];
    for r in records {
        for (m, v) in mean.iter_mut().zip(&r.values) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= records.len() as f64;
    }
    let coherent = project(&mean)?;

    let amplitudes = match options.mode {
        AverageMode::Coherent => coherent,
        AverageMode::SpectralAmplitude => {
            let mut mags = vec![0.0f64; k];
            for r in records {
                for (m, a) in mags.iter_mut().zip(project(&r.values)?) {
                    *m += a.norm();
                }
            }
            coherent
                .iter()
                .zip(&mags)
                .map(|(c, &m)| Complex64::from_polar(m / records.len() as f64, c.arg()))
                .collect()
        }
    };

    let values: Vec<Complex64> = grid
        .coordinates()
        .map(|x| {
            omegas
                .iter()
                .zip(&amplitudes)
                .map(|(&w, a)| a * Complex64::from_polar(1.0, w * x))
                .sum()
        })
        .collect();
    let reconstructed = SampledField::new(grid, values)?;

    let mse = match truth {
        None => None,
        Some(t) => {
            let (lo, hi) = options
                .window
                .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, x) in grid.coordinates().enumerate() {
                if x >= lo && x <= hi {
                    num += (reconstructed.values[i] - t.values[i]).norm_sqr();
                    den += t.values[i].norm_sqr();
                }
            }
            if den == 0.0 {
                return Err(Error::InvalidArgument(
                    "truth has zero power over the MSE window".into(),
                ));
            }
            Some(num / den)
        }
    };

    Ok(RecoveryReport {
        reconstructed,
        amplitudes,
        mse,
        averages: records.len(),
        leakage,
    })
}

/// Pass a record through a linear stationary medium that multiplies tooth k
/// by `transfer[k]` and leaves all out-of-comb content untouched.
pub fn apply_tooth_transfer(
    record: &SampledField,
    comb: &CombSpec,
    transfer: &[Complex64],
) -> Result<SampledField> {
    let omegas = comb.omegas();
    if transfer.len() != omegas.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} transfer entries for {} teeth",
            transfer.len(),
            omegas.len()
        )));
    }
    let report = spectral_filter_recover(
        std::slice::from_ref(record),
        comb,
        None,
        &RecoveryOptions::default(),
    )?;
    let grid = *record.grid.as_1d()?;
    let values = grid
        .coordinates()
        .zip(&record.values)
        .map(|(x, v)| {
            let shift: Complex64 = omegas
                .iter()
                .zip(&report.amplitudes)
                .zip(transfer)
                .map(|((&w, a), h)| (h - 1.0) * a * Complex64::from_polar(1.0, w * x))
                .sum();
            v + shift
        })
        .collect();
    SampledField::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::optimize::comb_fit;
    use crate::util::sinc;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    /// Comb fit of a sinc target whose local bandwidth is four times the
    /// comb's top frequency: teeth at integer harmonics 8..=16 so a 2π record
    /// is exactly one period.
    fn superoscillatory_comb() -> (CombSpec, f64) {
        let (teeth, omega_min, span) = (9, 8.0, 8.0);
        let b = 4.0 * (omega_min + span);
        let w = 0.08;
        let xs: Vec<f64> = (0..33).map(|i| -w + 2.0 * w * i as f64 / 32.0).collect();
        let fv: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new(sinc(b * x), 0.0))
            .collect();
        let fit = comb_fit(&xs, &fv, teeth, omega_min, span).unwrap();
        (fit.comb, w)
    }

    fn period_grid(n: usize) -> Grid1D {
        Grid1D::new(n, TAU / n as f64, -std::f64::consts::PI).unwrap()
    }

    fn comb_field(comb: &CombSpec, grid: Grid1D) -> SampledField {
        SampledField::from_fn_1d(grid, |x| comb.eval(x)).unwrap()
    }

    #[test]
    fn zero_amplitude_noise_is_identity() {
        let grid = period_grid(64);
        let f = SampledField::from_fn_1d(grid, |x| Complex64::new(x.cos(), x.sin())).unwrap();
        let model = NoiseModel {
            level: NoiseLevel::StdDev(0.0),
            seed: 1,
        };
        let noisy = add_noise(&f, &model, 0).unwrap();
        assert_eq!(noisy.values, f.values);
    }

    #[test]
    fn unit_sigma_sample_variance() {
        let grid = Grid1D::new(1_000_000, 1.0, 0.0).unwrap();
        let zero = SampledField::new(grid, vec![Complex64::new(0.0, 0.0); 1_000_000]).unwrap();
        let model = NoiseModel {
            level: NoiseLevel::StdDev(1.0),
            seed: 9,
        };
        let noisy = add_noise(&zero, &model, 0).unwrap();
        let var_re: f64 =
            noisy.values.iter().map(|v| v.re * v.re).sum::<f64>() / 1_000_000.0;
        let var_im: f64 =
            noisy.values.iter().map(|v| v.im * v.im).sum::<f64>() / 1_000_000.0;
        assert!((var_re - 1.0).abs() < 0.005, "var re = {var_re}");
        assert!((var_im - 1.0).abs() < 0.005, "var im = {var_im}");
    }

    #[test]
    fn db_level_matches_amplitude_ratio() {
        let a_so = 0.37;
        let model = NoiseModel {
            level: NoiseLevel::DbRelative {
                db: 17.0,
                reference_amplitude: a_so,
            },
            seed: 0,
        };
        assert!((model.sigma().unwrap() - a_so * 10f64.powf(0.85)).abs() < 1e-15);
        let bad = NoiseModel {
            level: NoiseLevel::StdDev(-1.0),
            seed: 0,
        };
        assert!(bad.sigma().is_err());
    }

    #[test]
    fn noise_is_deterministic_per_seed_and_realization() {
        let grid = period_grid(128);
        let zero = SampledField::new(grid, vec![Complex64::new(0.0, 0.0); 128]).unwrap();
        let model = NoiseModel {
            level: NoiseLevel::StdDev(1.0),
            seed: 5,
        };
        let a = add_noise(&zero, &model, 3).unwrap();
        let b = add_noise(&zero, &model, 3).unwrap();
        let c = add_noise(&zero, &model, 4).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn noiseless_recovery_is_exact() {
        let (comb, _) = superoscillatory_comb();
        let grid = period_grid(2048);
        let truth = comb_field(&comb, grid);
        let report = spectral_filter_recover(
            std::slice::from_ref(&truth),
            &comb,
            Some(&truth),
            &RecoveryOptions::default(),
        )
        .unwrap();
        let max_err = report
            .reconstructed
            .values
            .iter()
            .zip(&truth.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-10 * truth.max_abs(), "err = {max_err:e}");
        assert!(report.mse.unwrap() < 1e-20);
        assert!(report.leakage < 1e-12);
    }

    #[test]
    fn seventeen_db_ten_averages_mse_near_one_percent() {
        let (comb, w) = superoscillatory_comb();
        let grid = period_grid(16384);
        let truth = comb_field(&comb, grid);
        let mut a_so = 0.0f64;
        for (i, x) in grid.coordinates().enumerate() {
            if x.abs() <= w {
                a_so = a_so.max(truth.values[i].norm());
            }
        }
        let model = NoiseModel {
            level: NoiseLevel::DbRelative {
                db: 17.0,
                reference_amplitude: a_so,
            },
            seed: 42,
        };
        let opts = RecoveryOptions {
            mode: AverageMode::Coherent,
            window: Some((-w, w)),
        };
        let mut mses: Vec<f64> = (0..15u64)
            .map(|trial| {
                let records: Vec<SampledField> = (0..10)
                    .map(|j| add_noise(&truth, &model, trial * 1000 + j).unwrap())
                    .collect();
                spectral_filter_recover(&records, &comb, Some(&truth), &opts)
                    .unwrap()
                    .mse
                    .unwrap()
            })
            .collect();
        mses.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = mses[mses.len() / 2];
        assert!((0.002..=0.05).contains(&median), "median MSE = {median}");
    }

    #[test]
    fn recovery_is_idempotent() {
        let (comb, _) = superoscillatory_comb();
        let grid = period_grid(4096);
        let truth = comb_field(&comb, grid);
        let model = NoiseModel {
            level: NoiseLevel::StdDev(2.0),
            seed: 7,
        };
        let noisy = add_noise(&truth, &model, 0).unwrap();
        let opts = RecoveryOptions::default();
        let once = spectral_filter_recover(std::slice::from_ref(&noisy), &comb, None, &opts)
            .unwrap();
        let twice = spectral_filter_recover(
            std::slice::from_ref(&once.reconstructed),
            &comb,
            None,
            &opts,
        )
        .unwrap();
        let scale = once.reconstructed.max_abs();
        for (a, b) in once
            .reconstructed
            .values
            .iter()
            .zip(&twice.reconstructed.values)
        {
            assert!((a - b).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn mse_scales_inversely_with_averages() {
        let (comb, w) = superoscillatory_comb();
        let grid = period_grid(2048);
        let truth = comb_field(&comb, grid);
        let model = NoiseModel {
            level: NoiseLevel::StdDev(1.5),
            seed: 11,
        };
        let opts = RecoveryOptions {
            mode: AverageMode::Coherent,
            window: Some((-w, w)),
        };
        let ns = [1usize, 2, 4, 8, 16, 32, 64];
        let trials = 30u64;
        let mut mean_mse = Vec::new();
        let mut stream = 0u64;
        for &n in &ns {
            let mut acc = 0.0;
            for _ in 0..trials {
                let records: Vec<SampledField> = (0..n)
                    .map(|_| {
                        stream += 1;
                        add_noise(&truth, &model, stream).unwrap()
                    })
                    .collect();
                acc += spectral_filter_recover(&records, &comb, Some(&truth), &opts)
                    .unwrap()
                    .mse
                    .unwrap();
            }
            mean_mse.push(acc / trials as f64);
        }
        // Log-log least-squares slope.
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = mean_mse.iter().map(|m| m.ln()).collect();
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let ym = ys.iter().sum::<f64>() / ys.len() as f64;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xm) * (y - ym))
            .sum::<f64>()
            / xs.iter().map(|x| (x - xm).powi(2)).sum::<f64>();
        assert!((slope + 1.0).abs() < 0.15, "slope = {slope}");
    }

    #[test]
    fn record_length_halves_tooth_variance() {
        let (comb, _) = superoscillatory_comb();
        let model = NoiseModel {
            level: NoiseLevel::StdDev(1.0),
            seed: 13,
        };
        let opts = RecoveryOptions::default();
        let mut vars = Vec::new();
        for &n in &[2048usize, 4096] {
            let grid = period_grid(n);
            let zero = SampledField::new(grid, vec![Complex64::new(0.0, 0.0); n]).unwrap();
            let mut acc = 0.0;
            for trial in 0..200u64 {
                let noisy = add_noise(&zero, &model, 10_000 + trial).unwrap();
                let report =
                    spectral_filter_recover(std::slice::from_ref(&noisy), &comb, None, &opts)
                        .unwrap();
                acc += report.amplitudes[0].norm_sqr();
            }
            vars.push(acc / 200.0);
        }
        let ratio = vars[0] / vars[1];
        assert!((ratio - 2.0).abs() < 0.4, "ratio = {ratio}");
    }

    #[test]
    fn tooth_transfer_commutes_with_recovery() {
        let (comb, _) = superoscillatory_comb();
        let grid = period_grid(2048);
        let truth = comb_field(&comb, grid);
        let model = NoiseModel {
            level: NoiseLevel::StdDev(0.8),
            seed: 17,
        };
        let noisy = add_noise(&truth, &model, 0).unwrap();
        let opts = RecoveryOptions::default();
        let base = spectral_filter_recover(std::slice::from_ref(&noisy), &comb, None, &opts)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let transfer: Vec<Complex64> = (0..comb.teeth())
                .map(|_| {
                    Complex64::from_polar(0.2 + rng.gen::<f64>(), rng.gen::<f64>() * TAU)
                })
                .collect();
            let passed = apply_tooth_transfer(&noisy, &comb, &transfer).unwrap();
            let after = spectral_filter_recover(
                std::slice::from_ref(&passed),
                &comb,
                None,
                &opts,
            )
            .unwrap();
            for ((a, b), h) in after.amplitudes.iter().zip(&base.amplitudes).zip(&transfer) {
                let want = b * h;
                assert!((a - want).norm() < 1e-10 * want.norm().max(1.0), "{a} vs {want}");
            }
        }
    }

    #[test]
    fn incommensurate_record_reports_leakage_but_recovers_in_span() {
        let (comb, _) = superoscillatory_comb();
        // Record length 5.0 is not a comb period.
        let grid = Grid1D::new(2000, 5.0 / 2000.0, -2.5).unwrap();
        let truth = comb_field(&comb, grid);
        let report = spectral_filter_recover(
            std::slice::from_ref(&truth),
            &comb,
            Some(&truth),
            &RecoveryOptions::default(),
        )
        .unwrap();
        assert!(report.leakage > 1e-3, "leakage = {}", report.leakage);
        // The Gram solve is still the exact projection, and the signal is in
        // span, so recovery stays exact.
        let max_err = report
            .reconstructed
            .values
            .iter()
            .zip(&truth.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-8 * truth.max_abs(), "err = {max_err:e}");
    }

    #[test]
    fn spectral_amplitude_mode_recovers_magnitudes() {
        let (comb, _) = superoscillatory_comb();
        let grid = period_grid(4096);
        let truth = comb_field(&comb, grid);
        let model = NoiseModel {
            level: NoiseLevel::StdDev(0.05),
            seed: 31,
        };
        let records: Vec<SampledField> = (0..8)
            .map(|j| add_noise(&truth, &model, j).unwrap())
            .collect();
        let opts = RecoveryOptions {
            mode: AverageMode::SpectralAmplitude,
            window: None,
        };
        let report = spectral_filter_recover(&records, &comb, None, &opts).unwrap();
        for (a, t) in report.amplitudes.iter().zip(&comb.amplitudes) {
            assert!((a.norm() - t.norm()).abs() < 0.01, "{} vs {}", a.norm(), t.norm());
        }
    }
}
