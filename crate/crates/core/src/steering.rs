//! Gaussian steerability, Rényi-2 coherent information, Reid conditional
//! variances and conditioning on general-dyne measurements.
//!
//! A state is `A → B` steerable by Gaussian measurements iff the Schur
//! complement `M^B = B − Cᵀ A⁻¹ C` is not itself a physical covariance
//! matrix, i.e. iff some symplectic eigenvalue of `M^B` is below one. The
//! degree of steerability sums `−ln ν` over those eigenvalues. All values are
//! in nats.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cm::{CovarianceMatrix, Party};
use crate::error::{Error, Result};
use crate::linalg::{log_det_spd, spd_solve, symmetrize};
use crate::symplectic::{bona_fide_matrix, symplectic_eigenvalues};
use crate::twomode::is_standard_form;
use crate::DEFAULT_TOL;

/// Finite squeezing used to stand in for an ideal homodyne detection.
pub const DEFAULT_HOMODYNE_SQUEEZING: f64 = 1e-6;

/// Who steers whom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AToB,
    BToA,
}

impl Direction {
    pub fn steering(self) -> Party {
        match self {
            Direction::AToB => Party::A,
            Direction::BToA => Party::B,
        }
    }

    pub fn steered(self) -> Party {
        self.steering().other()
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::AToB => Direction::BToA,
            Direction::BToA => Direction::AToB,
        }
    }
}

/// Schur complement of the steering party's block: `B − Cᵀ A⁻¹ C` when Bob
/// is steered, `A − C B⁻¹ Cᵀ` when Alice is.
pub fn schur_complement(sigma: &CovarianceMatrix, steered: Party) -> Result<DMatrix<f64>> {
    let c = sigma.block_c();
    let m = match steered {
        Party::B => {
            let x = spd_solve(&sigma.block_a(), &c, "conditioning block A")?;
            sigma.block_b() - c.transpose() * x
        }
        Party::A => {
            let x = spd_solve(&sigma.block_b(), &c.transpose(), "conditioning block B")?;
            sigma.block_a() - c * x
        }
    };
    Ok(symmetrize(&m))
}

/// `Σ_{ν<1} −ln ν`, before clamping.
fn deficit(nu: &[f64]) -> f64 {
    nu.iter().filter(|&&v| v < 1.0).map(|v| -v.ln()).sum()
}

fn steered_spectrum(sigma: &CovarianceMatrix, direction: Direction) -> Result<Vec<f64>> {
    symplectic_eigenvalues(&schur_complement(sigma, direction.steered())?)
}

/// Gaussian steerability `G` in the given direction.
pub fn steering_measure(sigma: &CovarianceMatrix, direction: Direction) -> Result<f64> {
    Ok(deficit(&steered_spectrum(sigma, direction)?).max(0.0))
}

/// Rényi-2 entropy `½ ln det σ` of a Gaussian state or marginal.
pub fn renyi2_entropy(m: &DMatrix<f64>) -> Result<f64> {
    Ok(0.5 * log_det_spd(m)?)
}

/// `S(steering marginal) − S(σ)`.
///
/// Equals the unclamped steerability when the steered party has a single
/// mode; for several steered modes it is only logged as a caveat.
pub fn coherent_information(sigma: &CovarianceMatrix, direction: Direction) -> Result<f64> {
    if sigma.n_modes(direction.steered()) != 1 {
        log::warn!(
            "coherent information with {} steered modes does not equal the steering measure",
            sigma.n_modes(direction.steered())
        );
    }
    Ok(renyi2_entropy(&sigma.block(direction.steering()))? - renyi2_entropy(sigma.matrix())?)
}

/// Products of the Reid conditional variances,
/// `(V_{x_A|x_B} V_{p_A|p_B}, V_{x_B|x_A} V_{p_B|p_A}) = (det σ / det B, det σ / det A)`.
///
/// Only meaningful for two-mode matrices in standard form, where the
/// conditional variances come from homodyne detection of matching
/// quadratures.
pub fn reid_variances(sigma: &CovarianceMatrix) -> Result<(f64, f64)> {
    if sigma.n_a() != 1 || sigma.n_b() != 1 {
        return Err(Error::Precondition(
            "Reid variances are defined for two-mode states".into(),
        ));
    }
    if !is_standard_form(sigma, DEFAULT_TOL) {
        return Err(Error::Precondition(
            "matrix is not in standard form; reduce it with to_standard_form first".into(),
        ));
    }
    let ld = sigma.log_det()?;
    let product_a = (ld - log_det_spd(&sigma.block_b())?).exp();
    let product_b = (ld - log_det_spd(&sigma.block_a())?).exp();
    Ok((product_a, product_b))
}

/// Seed covariance matrix `T` of a Gaussian measurement on Alice's modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementCm {
    t: DMatrix<f64>,
}

impl MeasurementCm {
    /// Validates `T + iΩ ≥ 0`.
    pub fn new(t: DMatrix<f64>) -> Result<Self> {
        let check = bona_fide_matrix(&t, DEFAULT_TOL)?;
        if !check.verdict.accepted() {
            return Err(Error::Domain(format!(
                "measurement seed violates T + iΩ ≥ 0 (min eigenvalue {:.3e})",
                check.min_eigenvalue
            )));
        }
        Ok(Self { t: symmetrize(&t) })
    }

    /// Heterodyne detection of every mode: `T = I`.
    pub fn heterodyne(n_modes: usize) -> Self {
        Self::new(DMatrix::identity(2 * n_modes, 2 * n_modes)).expect("vacuum seed")
    }

    /// Finitely squeezed seed `diag(t, 1/t)` per mode; `t → 0` approaches
    /// homodyne detection of `x`.
    pub fn homodyne_x(n_modes: usize, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("squeezing {t} must be positive")));
        }
        let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            m[(2 * k, 2 * k)] = t;
            m[(2 * k + 1, 2 * k + 1)] = 1.0 / t;
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.t
    }
}

/// Bob's covariance matrix after Alice performs the measurement `T`:
/// `B − Cᵀ (T + A)⁻¹ C`, independent of the outcome.
pub fn condition_on_measurement(sigma: &CovarianceMatrix, t: &MeasurementCm) -> Result<DMatrix<f64>> {
    let da = 2 * sigma.n_a();
    if t.matrix().nrows() != da {
        return Err(Error::Structural(format!(
            "measurement acts on {} quadratures, Alice holds {}",
            t.matrix().nrows(),
            da
        )));
    }
    let c = sigma.block_c();
    let x = spd_solve(&(t.matrix() + sigma.block_a()), &c, "T + A")?;
    Ok(symmetrize(&(sigma.block_b() - c.transpose() * x)))
}

/// Both steering directions of a state at a glance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringReport {
    pub g_a_to_b: f64,
    pub g_b_to_a: f64,
    /// Symplectic eigenvalues of `M^A` (Alice steered).
    pub nu_a: Vec<f64>,
    /// Symplectic eigenvalues of `M^B` (Bob steered).
    pub nu_b: Vec<f64>,
    pub steerable_a_to_b: bool,
    pub steerable_b_to_a: bool,
    /// `det M^A = det σ / det B`.
    pub reid_product_a: f64,
    /// `det M^B = det σ / det A`.
    pub reid_product_b: f64,
}

impl SteeringReport {
    pub fn measure(&self, direction: Direction) -> f64 {
        match direction {
            Direction::AToB => self.g_a_to_b,
            Direction::BToA => self.g_b_to_a,
        }
    }

    /// True when an eigenvalue deciding `direction` lies within `tol` of one.
    pub fn marginal(&self, direction: Direction, tol: f64) -> bool {
        let nu = match direction {
            Direction::AToB => &self.nu_b,
            Direction::BToA => &self.nu_a,
        };
        nu.iter().any(|v| (v - 1.0).abs() <= tol)
    }
}

pub fn steering_report(sigma: &CovarianceMatrix) -> Result<SteeringReport> {
    let m_b = schur_complement(sigma, Party::B)?;
    let m_a = schur_complement(sigma, Party::A)?;
    let nu_b = symplectic_eigenvalues(&m_b)?;
    let nu_a = symplectic_eigenvalues(&m_a)?;
    let g_a_to_b = deficit(&nu_b).max(0.0);
    let g_b_to_a = deficit(&nu_a).max(0.0);
    Ok(SteeringReport {
        g_a_to_b,
        g_b_to_a,
        steerable_a_to_b: nu_b.iter().any(|&v| v < 1.0),
        steerable_b_to_a: nu_a.iter().any(|&v| v < 1.0),
        nu_a,
        nu_b,
        reid_product_a: log_det_spd(&m_a)?.exp(),
        reid_product_b: log_det_spd(&m_b)?.exp(),
    })
}
