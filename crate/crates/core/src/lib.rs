//! Quantification of EPR steering for bipartite Gaussian states under
//! Gaussian measurements.
//!
//! Covariance matrices follow the vacuum-normalized convention: the vacuum
//! is the identity and a matrix `σ` is physical iff `σ + iΩ ≥ 0`. Quadratures
//! are ordered `(x₁, p₁, …, xₙ, pₙ)` with Alice's modes first.
//!
//! ```
//! use gsteer::{steering_measure, tmsv_state, Direction};
//!
//! let sigma = tmsv_state(2.0).unwrap();
//! let g = steering_measure(&sigma, Direction::AToB).unwrap();
//! assert!((g - 2f64.ln()).abs() < 1e-12);
//! ```

pub mod channel;
pub mod cm;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod random;
pub mod scan;
pub mod steering;
pub mod symplectic;
pub mod twomode;
pub mod verify;

pub use channel::{apply_channel_a, GaussianChannelDilation};
pub use cm::{CovarianceMatrix, Party};
pub use error::{Error, Result};
pub use oracle::{dense_eigen_crosscheck, empirical_reid_product, sample_gaussian, SampleBatch};
pub use random::{random_cm, random_cm_with, random_symplectic, RandomCmConfig};
pub use steering::{
    coherent_information, condition_on_measurement, reid_variances, renyi2_entropy,
    schur_complement, steering_measure, steering_report, Direction, MeasurementCm,
    SteeringReport,
};
pub use symplectic::{
    apply_local_symplectic, bona_fide_check, is_bona_fide, is_ppt, partial_transpose,
    symplectic_eigenvalues, BonaFide, SymplecticForm, Verdict,
};
pub use twomode::{
    classify_two_mode, entanglement_renyi2, extremal_state, key_rate_bound, purity_profile,
    steering_bounds_check, tmsv_state, to_standard_form, EntanglementEstimate, PurityProfile,
    RegionLabel, StandardFormParams,
};

/// Symmetry tolerance applied when a covariance matrix is constructed.
pub const DEFAULT_SYM_TOL: f64 = 1e-10;

/// Default threshold for positivity and symplectic-eigenvalue decisions.
pub const DEFAULT_TOL: f64 = 1e-9;
