//! Randomized property tests: transform identities, propagation band
//! preservation, and least-squares optimality of the fitting routines.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use superwave_core::optimize::quad::integrate_real;
use superwave_core::optimize::{comb_fit, interval_approx};
use superwave_core::propagate::{propagate_field, PropagationSetup};
use superwave_core::{
    forward_transform, inverse_transform, measured_bandlimit, Grid1D, Grid2D, SampledField,
    Spectrum,
};

// proptest's prelude carries its own Rng trait, so draw uniforms through a
// fully qualified call on the concrete generator.
fn unif(rng: &mut ChaCha8Rng) -> f64 {
    rand::Rng::gen::<f64>(rng) - 0.5
}

fn random_field_1d(n: usize, dx: f64, seed: u64) -> SampledField {
    let grid = Grid1D::new(n, dx, -0.5 * n as f64 * dx).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n)
        .map(|_| Complex64::new(unif(&mut rng), unif(&mut rng)))
        .collect();
    SampledField::new(grid, values).unwrap()
}

/// Random field whose spectrum occupies bins strictly inside `k_frac` of
/// Nyquist; the outermost occupied bin pins measured_bandlimit exactly.
fn random_bandlimited_2d(n: usize, length: f64, seed: u64, k_frac: f64) -> SampledField {
    let grid = Grid2D::centered_square(n, length).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nyq = std::f64::consts::PI * n as f64 / length;
    let mut spec = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
    for jy in 0..n {
        for jx in 0..n {
            if grid.kx(jx).hypot(grid.ky(jy)) < k_frac * nyq {
                spec[jy * n + jx] = Complex64::new(unif(&mut rng), unif(&mut rng));
            }
        }
    }
    inverse_transform(&Spectrum {
        grid: grid.into(),
        values: spec,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip_and_parseval_1d(n in 8usize..=512, seed in 0u64..1024) {
        let f = random_field_1d(n, 0.17, seed);
        let spec = forward_transform(&f).unwrap();
        let back = inverse_transform(&spec).unwrap();
        let max = f.max_abs();
        for (a, b) in f.values.iter().zip(&back.values) {
            prop_assert!((a - b).norm() < 1e-10 * max);
        }
        // Parseval with the grid measure: sum |f|^2 dx = sum |F|^2 dk.
        let g = *f.grid.as_1d().unwrap();
        let p_x: f64 = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.spacing;
        let p_k: f64 = spec.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dk();
        prop_assert!((p_x - p_k).abs() < 1e-10 * p_x);
    }

    #[test]
    fn transform_round_trip_2d(n in 8usize..=48, seed in 0u64..1024) {
        let grid = Grid2D::centered_square(n, 3.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Complex64> = (0..grid.n_samples())
            .map(|_| Complex64::new(unif(&mut rng), unif(&mut rng)))
            .collect();
        let f = SampledField::new(grid, values).unwrap();
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let max = f.max_abs();
        for (a, b) in f.values.iter().zip(&back.values) {
            prop_assert!((a - b).norm() < 1e-10 * max);
        }
    }

    #[test]
    fn propagation_preserves_the_measured_band(seed in 0u64..1024, z in 0.1f64..5.0) {
        let f = random_bandlimited_2d(48, 9.0, seed, 0.5);
        let before = measured_bandlimit(&f, 1e-9).unwrap();
        let out = propagate_field(&PropagationSetup::paraxial(0.7, z, f)).unwrap();
        let after = measured_bandlimit(&out.field, 1e-9).unwrap();
        prop_assert!((before - after).abs() < 1e-12, "{before} vs {after}");
    }

    #[test]
    fn interval_solution_is_a_least_squares_minimum(
        omega in 2.0f64..12.0,
        seed in 0u64..1024,
    ) {
        let target = move |x: f64| Complex64::new((omega * x).cos(), 0.0);
        let design = interval_approx(target, (-0.5, 0.5), 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale: f64 = design.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for _ in 0..20 {
            let mut perturbed = design.clone();
            for c in perturbed.coefficients.iter_mut() {
                *c += Complex64::new(
                    1e-4 * scale * unif(&mut rng),
                    1e-4 * scale * unif(&mut rng),
                );
            }
            let r = integrate_real(
                |x| (target(x) - perturbed.eval(x)).norm_sqr(),
                -0.5,
                0.5,
                1e-10,
            )
            .unwrap();
            prop_assert!(
                r >= design.residual - 1e-8 * (1.0 + design.residual),
                "perturbed residual {r} < solved {}",
                design.residual
            );
        }
    }

    #[test]
    fn comb_fit_is_a_least_squares_minimum(seed in 0u64..1024) {
        // Discrete LS over the sample points; perturbing the solved tooth
        // amplitudes can only grow the sum of squares.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..25).map(|i| -0.1 + 0.2 * i as f64 / 24.0).collect();
        let fv: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new((40.0 * x).cos() + 0.3 * unif(&mut rng), 0.0))
            .collect();
        let fit = comb_fit(&xs, &fv, 7, 6.0, 6.0).unwrap();
        let sum_sq = |amps: &[Complex64]| -> f64 {
            let omegas = fit.comb.omegas();
            xs.iter()
                .zip(&fv)
                .map(|(&x, f)| {
                    let v: Complex64 = omegas
                        .iter()
                        .zip(amps)
                        .map(|(&w, a)| a * Complex64::from_polar(1.0, w * x))
                        .sum();
                    (v - f).norm_sqr()
                })
                .sum()
        };
        let base = sum_sq(&fit.comb.amplitudes);
        let scale: f64 = fit.comb.amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for _ in 0..20 {
            let perturbed: Vec<Complex64> = fit
                .comb
                .amplitudes
                .iter()
                .map(|a| {
                    a + Complex64::new(
                        1e-4 * scale * unif(&mut rng),
                        1e-4 * scale * unif(&mut rng),
                    )
                })
                .collect();
            prop_assert!(sum_sq(&perturbed) >= base - 1e-10 * (1.0 + base));
        }
    }
}
