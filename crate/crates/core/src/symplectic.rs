//! Symplectic form, physicality checks and the Williamson spectrum.

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::cm::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, direct_sum, effective_tol, hermitian, hermitian_eigenvalues};

/// Relative agreement required between the two members of each `±iν` pair.
pub const PAIRING_TOL: f64 = 1e-8;

/// Tolerance for `S Ω Sᵀ = Ω`, relative to `max(1, ‖S‖²)`.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// The block-diagonal form `Ω = ⊕ [[0, 1], [−1, 0]]` on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        let mut matrix = DMatrix::zeros(dim, dim);
        for k in 0..n_modes {
            matrix[(2 * k, 2 * k + 1)] = 1.0;
            matrix[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { n_modes, matrix }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

/// `Ω` on `n` modes as a bare matrix.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    SymplecticForm::new(n_modes).into_matrix()
}

/// Outcome of a positivity test performed with a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    /// Violated by less than the tolerance; accepted but close to the edge.
    Marginal,
    Violated,
}

impl Verdict {
    pub fn accepted(self) -> bool {
        self != Verdict::Violated
    }
}

/// Details of a bona fide test `σ + iΩ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonaFide {
    pub min_eigenvalue: f64,
    /// Threshold actually applied, including the rounding floor for `‖σ‖`.
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Bona fide test of a bare even-dimensional symmetric matrix (single party).
pub fn bona_fide_matrix(m: &DMatrix<f64>, tol: f64) -> Result<BonaFide> {
    let dim = m.nrows();
    if dim == 0 || dim % 2 != 0 || m.ncols() != dim {
        return Err(Error::Structural(format!(
            "expected an even square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let min_eigenvalue = hermitian_eigenvalues(hermitian(m, &omega(dim / 2)))[0];
    let tolerance = effective_tol(tol, m.norm(), dim);
    let verdict = if min_eigenvalue >= 0.0 {
        Verdict::Satisfied
    } else if min_eigenvalue >= -tolerance {
        Verdict::Marginal
    } else {
        Verdict::Violated
    };
    Ok(BonaFide {
        min_eigenvalue,
        tolerance,
        verdict,
    })
}

pub fn bona_fide_check(sigma: &CovarianceMatrix, tol: f64) -> BonaFide {
    bona_fide_matrix(sigma.matrix(), tol).expect("covariance matrices have even dimension")
}

/// `σ + i(Ω_A ⊕ Ω_B) ≥ 0` up to `tol` (plus the rounding floor for `‖σ‖`).
pub fn is_bona_fide(sigma: &CovarianceMatrix, tol: f64) -> bool {
    bona_fide_check(sigma, tol).verdict.accepted()
}

/// Williamson spectrum together with the worst relative disagreement between
/// the two members of an eigenvalue pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    pub values: Vec<f64>,
    pub pair_mismatch: f64,
}

/// Symplectic eigenvalues of a real symmetric positive-definite matrix,
/// ascending, computed from the spectrum `±iν` of `ΩM`.
pub fn symplectic_spectrum(m: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::Structural(format!("matrix is {}x{}", dim, m.ncols())));
    }
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::Structural(format!("odd or empty dimension {dim}")));
    }
    if !linalg::is_positive_definite(m) {
        return Err(Error::Domain("matrix is not positive definite".into()));
    }
    let om = omega(dim / 2) * m;
    let schur = Schur::try_new(om, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Domain("Schur iteration did not converge".into()))?;
    let mut moduli: Vec<f64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im.abs())
        .collect();
    moduli.sort_by(f64::total_cmp);

    let mut values = Vec::with_capacity(dim / 2);
    let mut pair_mismatch = 0.0_f64;
    for pair in moduli.chunks_exact(2) {
        let nu = 0.5 * (pair[0] + pair[1]);
        pair_mismatch = pair_mismatch.max((pair[1] - pair[0]) / nu);
        values.push(nu);
    }
    Ok(SymplecticSpectrum {
        values,
        pair_mismatch,
    })
}

/// Symplectic eigenvalues of `m`, ascending. Logs a warning when the `±iν`
/// pairs disagree by more than [`PAIRING_TOL`].
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let spectrum = symplectic_spectrum(m)?;
    if spectrum.pair_mismatch > PAIRING_TOL {
        log::warn!(
            "symplectic eigenvalue pairs disagree by {:.3e} (relative)",
            spectrum.pair_mismatch
        );
    }
    Ok(spectrum.values)
}

/// Flips the sign of every momentum coordinate of Bob's modes.
pub fn partial_transpose(sigma: &CovarianceMatrix) -> CovarianceMatrix {
    let dim = sigma.dim();
    let da = 2 * sigma.n_a();
    let sign = |i: usize| if i >= da && (i - da) % 2 == 1 { -1.0 } else { 1.0 };
    let data = DMatrix::from_fn(dim, dim, |i, j| sign(i) * sign(j) * sigma.matrix()[(i, j)]);
    CovarianceMatrix::new(data, sigma.n_a(), sigma.n_b()).expect("sign flips keep the shape")
}

pub fn is_ppt(sigma: &CovarianceMatrix, tol: f64) -> bool {
    is_bona_fide(&partial_transpose(sigma), tol)
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> bool {
    let dim = s.nrows();
    if s.ncols() != dim || dim % 2 != 0 {
        return false;
    }
    let om = omega(dim / 2);
    let defect = (s * &om * s.transpose() - &om).abs().max();
    defect <= tol * s.norm_squared().max(1.0)
}

/// `(S_A ⊕ S_B) σ (S_A ⊕ S_B)ᵀ`.
pub fn apply_local_symplectic(
    sigma: &CovarianceMatrix,
    s_a: &DMatrix<f64>,
    s_b: &DMatrix<f64>,
) -> Result<CovarianceMatrix> {
    let (da, db) = (2 * sigma.n_a(), 2 * sigma.n_b());
    if s_a.shape() != (da, da) || s_b.shape() != (db, db) {
        return Err(Error::Structural(format!(
            "local symplectics {:?} and {:?} do not match partition ({}, {})",
            s_a.shape(),
            s_b.shape(),
            sigma.n_a(),
            sigma.n_b()
        )));
    }
    if !is_symplectic(s_a, SYMPLECTIC_TOL) || !is_symplectic(s_b, SYMPLECTIC_TOL) {
        return Err(Error::Domain("local transformation is not symplectic".into()));
    }
    let s = direct_sum(s_a, s_b);
    CovarianceMatrix::new(&s * sigma.matrix() * s.transpose(), sigma.n_a(), sigma.n_b())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twomode::tmsv_state;
    use crate::DEFAULT_TOL;

    fn rotation(theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
    }

    #[test]
    fn omega_is_antisymmetric_and_squares_to_minus_identity() {
        let om = omega(3);
        assert_eq!(om.transpose(), -&om);
        assert_eq!(&om * &om, -DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn vacuum_is_bona_fide() {
        for (n, m) in [(1, 1), (2, 3)] {
            let v = CovarianceMatrix::vacuum(n, m).unwrap();
            assert!(is_bona_fide(&v, DEFAULT_TOL));
        }
    }

    #[test]
    fn half_identity_violates_uncertainty() {
        let check = bona_fide_matrix(&DMatrix::from_diagonal_element(2, 2, 0.5), DEFAULT_TOL).unwrap();
        assert!((check.min_eigenvalue + 0.5).abs() < 1e-12);
        assert_eq!(check.verdict, Verdict::Violated);
    }

    #[test]
    fn tmsv_is_bona_fide_with_unit_spectrum() {
        let s = tmsv_state((1.0f64).cosh()).unwrap();
        assert!(is_bona_fide(&s, DEFAULT_TOL));
        let nu = symplectic_eigenvalues(s.matrix()).unwrap();
        for v in nu {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_spectra() {
        assert_eq!(
            symplectic_eigenvalues(&DMatrix::identity(4, 4))
                .unwrap()
                .iter()
                .map(|v| (v * 1e12).round() / 1e12)
                .collect::<Vec<_>>(),
            vec![1.0, 1.0]
        );
        let nu = symplectic_eigenvalues(&DMatrix::from_diagonal_element(2, 2, 3.0)).unwrap();
        assert!((nu[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_errors() {
        assert!(matches!(
            symplectic_eigenvalues(&DMatrix::identity(3, 3)),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            symplectic_eigenvalues(&DMatrix::from_diagonal_element(2, 2, -1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn partial_transpose_of_standard_form_flips_d() {
        let s = tmsv_state(2.0).unwrap();
        let pt = partial_transpose(&s);
        assert_eq!(pt.matrix()[(1, 3)], -s.matrix()[(1, 3)]);
        assert_eq!(pt.matrix()[(0, 2)], s.matrix()[(0, 2)]);
        assert_eq!(partial_transpose(&pt), s);
        let nu = symplectic_eigenvalues(pt.matrix()).unwrap();
        assert!((nu[0] - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn ppt_examples() {
        assert!(!is_ppt(&tmsv_state(2.0).unwrap(), DEFAULT_TOL));
        assert!(is_ppt(&CovarianceMatrix::vacuum(1, 1).unwrap(), DEFAULT_TOL));
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let b = DMatrix::from_diagonal_element(2, 2, 1.5);
        let prod = CovarianceMatrix::from_blocks(&a, &b, &DMatrix::zeros(2, 2)).unwrap();
        assert!(is_ppt(&prod, DEFAULT_TOL));
    }

    #[test]
    fn local_symplectics() {
        let s = tmsv_state(2.0).unwrap();
        let id = DMatrix::identity(2, 2);
        assert_eq!(apply_local_symplectic(&s, &id, &id).unwrap(), s);

        let rotated = apply_local_symplectic(&s, &rotation(0.3), &rotation(-1.1)).unwrap();
        let before = symplectic_eigenvalues(s.matrix()).unwrap();
        let after = symplectic_eigenvalues(rotated.matrix()).unwrap();
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-10);
        }

        let z = 1.7;
        let squeezer = DMatrix::from_row_slice(2, 2, &[z, 0.0, 0.0, 1.0 / z]);
        let v = CovarianceMatrix::vacuum(1, 1).unwrap();
        let out = apply_local_symplectic(&v, &squeezer, &id).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            z * z,
            1.0 / (z * z),
            1.0,
            1.0,
        ]));
        assert!((out.matrix() - expected).abs().max() < 1e-14);
    }

    #[test]
    fn non_symplectic_local_map_is_rejected() {
        let s = tmsv_state(2.0).unwrap();
        let bad = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(matches!(
            apply_local_symplectic(&s, &bad, &DMatrix::identity(2, 2)),
            Err(Error::Domain(_))
        ));
    }
}
