//! Small dense linear-algebra helpers shared by the other modules.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition number above which a block is treated as numerically singular.
pub const MAX_CONDITION: f64 = 1e12;

pub fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Absolute tolerance widened by the rounding noise of an eigen-decomposition
/// of a matrix with Frobenius norm `norm`.
///
/// A fixed threshold stops being meaningful once `ε·‖σ‖` exceeds it, which
/// happens for the large-`a` extremal states (`‖σ‖ ≈ 10⁸`).
pub fn effective_tol(tol: f64, norm: f64, dim: usize) -> f64 {
    tol + 8.0 * dim as f64 * f64::EPSILON * norm
}

/// `ln det` of a symmetric positive-definite matrix via Cholesky.
pub fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = Cholesky::new(m.clone())
        .ok_or_else(|| Error::Domain("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    Ok(2.0 * (0..m.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    Cholesky::new(m.clone()).is_some()
}

/// Ratio of extreme eigenvalues of a symmetric matrix; infinite if not
/// positive definite.
pub fn spd_condition(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Real symmetric `re` plus `i·im` (antisymmetric `im`) as a Hermitian matrix.
pub fn hermitian(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: DMatrix<Complex64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Symmetric square root of a positive semidefinite matrix.
pub fn spd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain("matrix is not positive definite".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(symmetrize(&(&eig.eigenvectors * d * eig.eigenvectors.transpose())))
}

/// Solves `K X = R` for symmetric positive-definite `K`, refusing blocks whose
/// condition number exceeds [`MAX_CONDITION`].
pub fn spd_solve(k: &DMatrix<f64>, r: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let condition = spd_condition(k);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned {
            what,
            condition,
            limit: MAX_CONDITION,
        });
    }
    let chol = Cholesky::new(k.clone()).ok_or(Error::IllConditioned {
        what,
        condition,
        limit: MAX_CONDITION,
    })?;
    Ok(chol.solve(r))
}
