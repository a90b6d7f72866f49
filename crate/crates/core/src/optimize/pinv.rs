//! Minimum-norm least squares for complex systems.
//!
//! Complex matrices are mapped to their real 2n representation
//! [[Re, -Im], [Im, Re]]; the Moore-Penrose conditions carry through the
//! isomorphism, so the real SVD pseudo-inverse applied there is exactly the
//! complex pseudo-inverse.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub solution: Vec<Complex64>,
    /// Number of singular values above the cutoff (complex rank).
    pub rank: usize,
    pub sigma_max: f64,
}

/// Solve min ||M x - b|| with the minimum-norm solution x = M⁺ b.
///
/// `rows` are the rows of M; `rel_cutoff` discards singular values below
/// `rel_cutoff * σ_max`.
pub fn lstsq_complex_full(
    rows: &[Vec<Complex64>],
    rhs: &[Complex64],
    rel_cutoff: f64,
) -> Result<LstsqSolution> {
    let p = rows.len();
    if p == 0 {
        return Err(Error::InvalidArgument("empty system".into()));
    }
    let k = rows[0].len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::ShapeMismatch("ragged matrix rows".into()));
    }
    if rhs.len() != p {
        return Err(Error::ShapeMismatch(format!(
            "rhs has {} entries for {} rows",
            rhs.len(),
            p
        )));
    }

    let mut m = DMatrix::<f64>::zeros(2 * p, 2 * k);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = v.re;
            m[(i, j + k)] = -v.im;
            m[(i + p, j)] = v.im;
            m[(i + p, j + k)] = v.re;
        }
    }
    let mut b = DVector::<f64>::zeros(2 * p);
    for (i, v) in rhs.iter().enumerate() {
        b[i] = v.re;
        b[i + p] = v.im;
    }

    let svd = m.svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = rel_cutoff * sigma_max;
    // Real-rep singular values come in duplicated pairs; complex rank is half
    // the count above the cutoff.
    let real_rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd
        .solve(&b, eps)
        .map_err(|e| Error::Numeric(format!("svd solve failed: {e}")))?;
    let solution = (0..k).map(|j| Complex64::new(x[j], x[j + k])).collect();
    Ok(LstsqSolution {
        solution,
        rank: real_rank / 2,
        sigma_max,
    })
}

pub fn lstsq_complex(
    rows: &[Vec<Complex64>],
    rhs: &[Complex64],
    rel_cutoff: f64,
) -> Result<Vec<Complex64>> {
    Ok(lstsq_complex_full(rows, rhs, rel_cutoff)?.solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_system() {
        // [[1, i], [−i, 2]] is Hermitian positive definite.
        let rows = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        ];
        let x_true = [Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        let rhs: Vec<Complex64> = rows
            .iter()
            .map(|r| r[0] * x_true[0] + r[1] * x_true[1])
            .collect();
        let got = lstsq_complex(&rows, &rhs, 1e-12).unwrap();
        for (g, t) in got.iter().zip(&x_true) {
            assert!((g - t).norm() < 1e-12);
        }
    }

    #[test]
    fn min_norm_on_underdetermined() {
        // One equation, two unknowns: x = M^H (M M^H)^{-1} b.
        let rows = vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]];
        let rhs = vec![Complex64::new(2.0, 0.0)];
        let sol = lstsq_complex_full(&rows, &rhs, 1e-12).unwrap();
        assert_eq!(sol.rank, 1);
        // M M^H = 2, so x = [1, conj(i)·1] = [1, -i].
        assert!((sol.solution[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((sol.solution[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn rank_deficiency_detected() {
        let rows = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)],
        ];
        let rhs = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let sol = lstsq_complex_full(&rows, &rhs, 1e-10).unwrap();
        assert_eq!(sol.rank, 1);
    }
}
