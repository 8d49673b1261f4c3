//! Gaussian channels on Alice's side, realized through a symplectic dilation.

use nalgebra::DMatrix;

use crate::cm::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::direct_sum;
use crate::symplectic::{bona_fide_matrix, is_symplectic, SYMPLECTIC_TOL};
use crate::DEFAULT_TOL;

/// A channel `A → A'` acting as: attach an ancilla in state `ancilla_cm`,
/// apply `symplectic` to `(A, ancilla)`, discard the ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannelDilation {
    ancilla_modes: usize,
    ancilla_cm: DMatrix<f64>,
    symplectic: DMatrix<f64>,
}

impl GaussianChannelDilation {
    pub fn new(ancilla_cm: DMatrix<f64>, symplectic: DMatrix<f64>) -> Result<Self> {
        let check = bona_fide_matrix(&ancilla_cm, DEFAULT_TOL)?;
        if !check.verdict.accepted() {
            return Err(Error::Domain(format!(
                "ancilla covariance matrix is not bona fide (min eigenvalue {:.3e})",
                check.min_eigenvalue
            )));
        }
        let k = ancilla_cm.nrows();
        if symplectic.nrows() <= k || symplectic.ncols() != symplectic.nrows() {
            return Err(Error::Structural(format!(
                "symplectic {:?} leaves no system modes next to {} ancilla quadratures",
                symplectic.shape(),
                k
            )));
        }
        if !is_symplectic(&symplectic, SYMPLECTIC_TOL) {
            return Err(Error::Domain("dilation matrix is not symplectic".into()));
        }
        Ok(Self {
            ancilla_modes: k / 2,
            ancilla_cm,
            symplectic,
        })
    }

    /// Identity channel on `n` system modes with `k` vacuum ancillas.
    pub fn identity(n: usize, k: usize) -> Self {
        let dim = 2 * (n + k);
        Self::new(DMatrix::identity(2 * k, 2 * k), DMatrix::identity(dim, dim))
            .expect("identity dilation is valid")
    }

    /// Single-mode pure-loss channel: a beamsplitter of the given
    /// transmissivity mixing the system with vacuum.
    pub fn pure_loss(transmissivity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(Error::Domain(format!(
                "transmissivity {transmissivity} outside [0, 1]"
            )));
        }
        let t = transmissivity.sqrt();
        let r = (1.0 - transmissivity).sqrt();
        #[rustfmt::skip]
        let s = DMatrix::from_row_slice(4, 4, &[
             t, 0.0,   r, 0.0,
            0.0,  t, 0.0,   r,
            -r, 0.0,   t, 0.0,
            0.0, -r, 0.0,   t,
        ]);
        Self::new(DMatrix::identity(2, 2), s)
    }

    /// Replaces the `n` system modes by the ancilla state.
    pub fn replace(ancilla_cm: DMatrix<f64>) -> Result<Self> {
        let k = ancilla_cm.nrows();
        let mut s = DMatrix::zeros(2 * k, 2 * k);
        s.view_mut((0, k), (k, k)).fill_with_identity();
        s.view_mut((k, 0), (k, k)).fill_with_identity();
        Self::new(ancilla_cm, s)
    }

    pub fn ancilla_modes(&self) -> usize {
        self.ancilla_modes
    }

    pub fn system_modes(&self) -> usize {
        self.symplectic.nrows() / 2 - self.ancilla_modes
    }

    pub fn ancilla_cm(&self) -> &DMatrix<f64> {
        &self.ancilla_cm
    }

    pub fn symplectic(&self) -> &DMatrix<f64> {
        &self.symplectic
    }
}

/// Applies the channel to Alice's modes. Bob's block is left untouched.
pub fn apply_channel_a(
    sigma: &CovarianceMatrix,
    channel: &GaussianChannelDilation,
) -> Result<CovarianceMatrix> {
    let da = 2 * sigma.n_a();
    if channel.system_modes() != sigma.n_a() {
        return Err(Error::Structural(format!(
            "channel acts on {} modes but Alice holds {}",
            channel.system_modes(),
            sigma.n_a()
        )));
    }
    let s = &channel.symplectic;
    let x = s.view((0, 0), (da, da));
    // A' is the system block of S (A ⊕ E) Sᵀ.
    let joint = direct_sum(&sigma.block_a(), &channel.ancilla_cm);
    let a_out = (s * joint * s.transpose()).view((0, 0), (da, da)).into_owned();
    let c_out = x * sigma.block_c();
    CovarianceMatrix::from_blocks(&a_out, &sigma.block_b(), &c_out)
}
