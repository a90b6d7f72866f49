//! Optimization-based constructors: interval pseudo-inverse approximation,
//! Legendre/spherical-Bessel line approximation, frequency-comb fitting, and
//! interference-minimizing phase descent.

pub mod pinv;
pub mod quad;
pub mod specfun;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::sinc;
use pinv::lstsq_complex_full;
use quad::{integrate, integrate_real};
use specfun::spherical_jn_all;

/// SVD cutoff relative to σ_max; the Gram matrices here go severely
/// ill-conditioned well before this bites.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-12;

/// Result of the finite-interval Fourier pseudo-inverse approximation:
/// ψ_N(x) = Σ_{n=0}^{N} C_n e^{i k_n x}, k_n = 2π(1 - 2n/N).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalApproxDesign {
    pub n: u32,
    pub interval: (f64, f64),
    pub wavenumbers: Vec<f64>,
    pub coefficients: Vec<Complex64>,
    /// ∫ |Φ - ψ_N|² dx over the interval.
    pub residual: f64,
    pub gram_rank: usize,
}

impl IntervalApproxDesign {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.wavenumbers
            .iter()
            .zip(&self.coefficients)
            .map(|(&k, c)| c * Complex64::from_polar(1.0, k * x))
            .sum()
    }
}

/// Best bandlimited approximation of `target` on `interval`: C = α⁺·b with
/// b_n = ∫ Φ e^{-i k_n x} dx and α_{nm} = ∫ e^{i(k_m - k_n)x} dx (closed
/// form).
pub fn interval_approx(
    target: impl Fn(f64) -> Complex64,
    interval: (f64, f64),
    n: u32,
) -> Result<IntervalApproxDesign> {
    let (x1, x2) = interval;
    if !(x1 < x2) {
        return Err(Error::InvalidArgument(format!(
            "interval must satisfy x1 < x2, got ({x1}, {x2})"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let ks: Vec<f64> = (0..=n)
        .map(|j| 2.0 * std::f64::consts::PI * (1.0 - 2.0 * j as f64 / n as f64))
        .collect();
    let dim = ks.len();

    // Gram matrix by the complex-exponential closed form.
    let mut alpha = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (r, &kn) in ks.iter().enumerate() {
        for (c, &km) in ks.iter().enumerate() {
            alpha[r][c] = exp_integral(km - kn, x1, x2);
        }
    }
    let b: Vec<Complex64> = ks
        .iter()
        .map(|&kn| integrate(|x| target(x) * Complex64::from_polar(1.0, -kn * x), x1, x2, QUAD_TOL))
        .collect::<Result<_>>()?;

    let sol = lstsq_complex_full(&alpha, &b, DEFAULT_SVD_CUTOFF)?;
    let mut design = IntervalApproxDesign {
        n,
        interval,
        wavenumbers: ks,
        coefficients: sol.solution,
        residual: 0.0,
        gram_rank: sol.rank,
    };
    design.residual = integrate_real(
        |x| (target(x) - design.eval(x)).norm_sqr(),
        x1,
        x2,
        1e-10,
    )?
    .max(0.0);
    Ok(design)
}

/// ∫_{x1}^{x2} e^{i q x} dx.
fn exp_integral(q: f64, x1: f64, x2: f64) -> Complex64 {
    if q.abs() < 1e-14 {
        Complex64::new(x2 - x1, 0.0)
    } else {
        (Complex64::from_polar(1.0, q * x2) - Complex64::from_polar(1.0, q * x1))
            / Complex64::new(0.0, q)
    }
}

/// Whole-line expansion result: f_N(x) = √(2/π) Σ_n iⁿ D_n j_n(x).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BesselApproxDesign {
    pub n_terms: u32,
    pub interval: (f64, f64),
    pub coefficients: Vec<Complex64>,
    pub residual: f64,
    pub gram_rank: usize,
}

impl BesselApproxDesign {
    pub fn eval(&self, x: f64) -> Complex64 {
        let j = spherical_jn_all(self.coefficients.len() - 1, x);
        let root = (2.0 / std::f64::consts::PI).sqrt();
        let mut i_pow = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, d) in self.coefficients.iter().enumerate() {
            acc += i_pow * d * j[n];
            i_pow *= Complex64::new(0.0, 1.0);
        }
        acc * root
    }
}

/// Interval-optimal spherical-Bessel expansion: D = A⁺·B with
/// B_n = √(π/2) ∫ g j_n dx and A_{nm} = ∫ j_n j_m dx.
pub fn bessel_line_approx(
    target: impl Fn(f64) -> Complex64,
    interval: (f64, f64),
    n_terms: u32,
) -> Result<BesselApproxDesign> {
    let (x1, x2) = interval;
    if !(x1 < x2) {
        return Err(Error::InvalidArgument("interval must satisfy x1 < x2".into()));
    }
    if n_terms < 1 {
        return Err(Error::InvalidArgument("n_terms must be >= 1".into()));
    }
    let nmax = n_terms as usize - 1;
    let mut a = vec![vec![Complex64::new(0.0, 0.0); nmax + 1]; nmax + 1];
    for r in 0..=nmax {
        for c in r..=nmax {
            let v = integrate_real(
                |x| {
                    let j = spherical_jn_all(nmax, x);
                    j[r] * j[c]
                },
                x1,
                x2,
                QUAD_TOL,
            )?;
            a[r][c] = Complex64::new(v, 0.0);
            a[c][r] = Complex64::new(v, 0.0);
        }
    }
    // Fold the i^n phase and the √(2/π) prefactor of the basis into the
    // normal equations so D keeps the usual scaling: ψ uses √(2/π) iⁿ jₙ,
    // so the Gram in that basis is (2/π)·(i^m)conj(i^n)·A_{nm} and the
    // projection is √(2/π)·conj(iⁿ)·∫ g jₙ = (2/π)·conj(iⁿ)·√(π/2)·∫ g jₙ.
    // Dividing the common (2/π) leaves A and B as stated.
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); nmax + 1]; nmax + 1];
    let mut b = vec![Complex64::new(0.0, 0.0); nmax + 1];
    let i_unit = Complex64::new(0.0, 1.0);
    for r in 0..=nmax {
        let phase_r = i_unit.powi(r as i32).conj();
        for c in 0..=nmax {
            rows[r][c] = phase_r * i_unit.powi(c as i32) * a[r][c];
        }
        let proj = integrate(
            |x| {
                let j = spherical_jn_all(nmax, x);
                target(x) * j[r]
            },
            x1,
            x2,
            QUAD_TOL,
        )?;
        b[r] = phase_r * (std::f64::consts::PI / 2.0).sqrt() * proj;
    }
    let sol = lstsq_complex_full(&rows, &b, DEFAULT_SVD_CUTOFF)?;
    let mut design = BesselApproxDesign {
        n_terms,
        interval,
        coefficients: sol.solution,
        residual: 0.0,
        gram_rank: sol.rank,
    };
    design.residual = integrate_real(
        |x| (target(x) - design.eval(x)).norm_sqr(),
        x1,
        x2,
        1e-10,
    )?
    .max(0.0);
    Ok(design)
}

/// A finite frequency comb: teeth at ω_k = (k/(K-1))·Ω + ω_min with complex
/// amplitudes and optional per-tooth delays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombSpec {
    pub omega_min: f64,
    /// Spectral distance Ω between the band limits (0 permitted when K = 1).
    pub omega_span: f64,
    pub amplitudes: Vec<Complex64>,
    /// Phase delays τ_k; empty means all zero.
    #[serde(default)]
    pub delays: Vec<f64>,
}

impl CombSpec {
    pub fn teeth(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn omegas(&self) -> Vec<f64> {
        let k = self.amplitudes.len();
        if k == 1 {
            return vec![self.omega_min];
        }
        (0..k)
            .map(|i| self.omega_min + i as f64 / (k - 1) as f64 * self.omega_span)
            .collect()
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_min + self.omega_span
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let omegas = self.omegas();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&w, a)) in omegas.iter().zip(&self.amplitudes).enumerate() {
            let tau = self.delays.get(i).copied().unwrap_or(0.0);
            acc += a * Complex64::from_polar(1.0, w * (t - tau));
        }
        acc
    }

    pub fn eval_derivative(&self, t: f64) -> Complex64 {
        let omegas = self.omegas();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&w, a)) in omegas.iter().zip(&self.amplitudes).enumerate() {
            let tau = self.delays.get(i).copied().unwrap_or(0.0);
            acc += a * Complex64::new(0.0, w) * Complex64::from_polar(1.0, w * (t - tau));
        }
        acc
    }

    /// Local (instantaneous) frequency Im[ψ'/ψ] at `t`.
    pub fn local_frequency(&self, t: f64) -> f64 {
        let f = self.eval(t);
        if f.norm() == 0.0 {
            return f64::NAN;
        }
        (self.eval_derivative(t) / f).im
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CombFit {
    pub comb: CombSpec,
    /// Rank of the tone matrix at the SVD cutoff; below `min(K, points)`
    /// signals a degenerate sample set.
    pub rank: usize,
    /// Residual Σ|ψ(x_i) - F_i|².
    pub residual: f64,
}

/// Least-squares comb amplitudes A = M⁺F on the sample set `xs`.
///
/// Underdetermined systems return the minimum-norm amplitudes; repeated
/// sample positions collapse the rank, which is reported rather than
/// rejected.
pub fn comb_fit(
    xs: &[f64],
    f_values: &[Complex64],
    teeth: usize,
    omega_min: f64,
    omega_span: f64,
) -> Result<CombFit> {
    if teeth == 0 {
        return Err(Error::InvalidArgument("need at least one tooth".into()));
    }
    if teeth >= 2 && !(omega_span > 0.0) {
        return Err(Error::InvalidArgument("Ω must be positive for K >= 2".into()));
    }
    if xs.len() != f_values.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} sample positions vs {} values",
            xs.len(),
            f_values.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let proto = CombSpec {
        omega_min,
        omega_span,
        amplitudes: vec![Complex64::new(0.0, 0.0); teeth],
        delays: Vec::new(),
    };
    let omegas = proto.omegas();
    let rows: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| omegas.iter().map(|&w| Complex64::from_polar(1.0, w * x)).collect())
        .collect();
    let sol = lstsq_complex_full(&rows, f_values, DEFAULT_SVD_CUTOFF)?;
    let comb = CombSpec {
        amplitudes: sol.solution,
        ..proto
    };
    let residual = xs
        .iter()
        .zip(f_values)
        .map(|(&x, f)| (comb.eval(x) - f).norm_sqr())
        .sum();
    Ok(CombFit {
        comb,
        rank: sol.rank,
        residual,
    })
}

/// Configuration for the interference-minimizing phase search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseDescentConfig {
    /// Half-width of the minimization interval [-T_SO, T_SO].
    pub t_so: f64,
    pub step_size: f64,
    pub max_iters: usize,
    pub restarts: usize,
    /// Convergence tolerance on the objective decrease per iteration.
    pub tol: f64,
    pub seed: u64,
}

impl Default for PhaseDescentConfig {
    fn default() -> Self {
        PhaseDescentConfig {
            t_so: 1.0,
            step_size: 1e-2,
            max_iters: 5000,
            restarts: 16,
            tol: 1e-12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseDescentResult {
    pub comb: CombSpec,
    pub objective: f64,
    pub converged: bool,
    /// Objective per accepted iteration of the winning restart.
    pub history: Vec<f64>,
}

/// Interference energy I({τ}) = ∫_{-T}^{T} |Σ A e^{iω_i(t-τ_i)}|² dt in
/// closed form (the integrand is read as a squared magnitude).
pub fn interference_objective(amplitude: f64, omegas: &[f64], taus: &[f64], t_so: f64) -> f64 {
    let n = omegas.len();
    let mut acc = n as f64;
    for i in 0..n {
        for j in i + 1..n {
            let s = sinc((omegas[i] - omegas[j]) * t_so);
            acc += 2.0 * s * (omegas[i] * taus[i] - omegas[j] * taus[j]).cos();
        }
    }
    amplitude * amplitude * 2.0 * t_so * acc
}

/// Analytic gradient ∂I/∂τ_m of [`interference_objective`].
pub fn interference_gradient(amplitude: f64, omegas: &[f64], taus: &[f64], t_so: f64) -> Vec<f64> {
    let n = omegas.len();
    let pref = amplitude * amplitude * 2.0 * t_so;
    (0..n)
        .map(|m| {
            let mut g = 0.0;
            for j in 0..n {
                if j != m {
                    let s = sinc((omegas[m] - omegas[j]) * t_so);
                    g -= 2.0 * omegas[m] * s * (omegas[m] * taus[m] - omegas[j] * taus[j]).sin();
                }
            }
            pref * g
        })
        .collect()
}

/// Minimize the interference energy over the delays by gradient descent with
/// backtracking line search; τ_0 is pinned at zero (global time-shift gauge)
/// and the best of `restarts` seeded random initializations wins.
pub fn phase_descent(
    amplitude: f64,
    omegas: &[f64],
    config: &PhaseDescentConfig,
) -> Result<PhaseDescentResult> {
    if omegas.len() < 2 {
        return Err(Error::InvalidArgument(
            "phase descent needs at least two frequencies".into(),
        ));
    }
    if !(config.t_so > 0.0) || !(config.step_size > 0.0) || config.max_iters == 0 {
        return Err(Error::InvalidArgument(
            "T_SO, step size and max iterations must be positive".into(),
        ));
    }
    let n = omegas.len();
    let mut best: Option<(Vec<f64>, f64, bool, Vec<f64>)> = None;

    for restart in 0..config.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
        let mut taus: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 || restart == 0 {
                    0.0
                } else {
                    rng.gen::<f64>() * 2.0 * std::f64::consts::PI / omegas[i].abs().max(1e-12)
                }
            })
            .collect();
        let mut obj = interference_objective(amplitude, omegas, &taus, config.t_so);
        let mut history = vec![obj];
        let mut converged = false;
        let mut step = config.step_size;
        for _ in 0..config.max_iters {
            let mut grad = interference_gradient(amplitude, omegas, &taus, config.t_so);
            grad[0] = 0.0; // gauge fix
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2.sqrt() < config.tol {
                converged = true;
                break;
            }
            // Backtracking Armijo line search.
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = taus
                    .iter()
                    .zip(&grad)
                    .map(|(t, g)| t - step * g)
                    .collect();
                let trial_obj = interference_objective(amplitude, omegas, &trial, config.t_so);
                if trial_obj <= obj - 0.5 * step * gnorm2 {
                    let delta = obj - trial_obj;
                    taus = trial;
                    obj = trial_obj;
                    history.push(obj);
                    step *= 1.5;
                    accepted = true;
                    if delta < config.tol * obj.abs().max(1.0) {
                        converged = true;
                    }
                    break;
                }
                step *= 0.5;
            }
            if !accepted || converged {
                converged = converged || !accepted && gnorm2.sqrt() < 1e-8;
                break;
            }
        }
        let better = match &best {
            None => true,
            Some((_, b, _, _)) => obj < *b,
        };
        if better {
            best = Some((taus, obj, converged, history));
        }
    }

    let (taus, objective, converged, history) = best.unwrap();
    let comb = CombSpec {
        omega_min: omegas[0],
        omega_span: omegas[omegas.len() - 1] - omegas[0],
        amplitudes: vec![Complex64::new(amplitude, 0.0); n],
        delays: taus,
    };
    Ok(PhaseDescentResult {
        comb,
        objective,
        converged,
        history,
    })
}
