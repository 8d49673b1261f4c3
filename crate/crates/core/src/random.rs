//! Seeded random symplectics, covariance matrices and channels for the
//! property suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::GaussianChannelDilation;
use crate::cm::CovarianceMatrix;
use crate::linalg::symmetrize;

/// Parameters of the random-state generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCmConfig {
    /// Williamson temperatures are drawn uniformly from `[1, temperature_scale]`.
    pub temperature_scale: f64,
    /// Single-mode squeezing parameters are drawn from `[0, max_squeezing]`.
    pub max_squeezing: f64,
}

impl Default for RandomCmConfig {
    fn default() -> Self {
        Self {
            temperature_scale: 3.0,
            max_squeezing: 2.0,
        }
    }
}

impl RandomCmConfig {
    pub fn with_temperature(temperature_scale: f64) -> Self {
        Self {
            temperature_scale,
            ..Self::default()
        }
    }
}

/// Generator for stream `stream` of master seed `seed`. Distinct streams are
/// independent, so parallel workers can draw case `i` from stream `i`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// Haar-random orthogonal symplectic on `n` modes (a passive interferometer),
/// in interleaved `(x₁, p₁, …)` ordering.
pub fn random_orthogonal_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let u = haar_unitary(n, rng);
    // [[X, −Y], [Y, X]] in (x…, p…) ordering, then interleaved.
    let block = |i: usize, j: usize| -> f64 {
        let (bi, ri) = (i % 2, i / 2);
        let (bj, rj) = (j % 2, j / 2);
        let z = u[(ri, rj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    };
    DMatrix::from_fn(2 * n, 2 * n, block)
}

/// Random symplectic `O₁ Z O₂` with single-mode squeezers `Z` bounded by
/// `max_squeezing`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, max_squeezing: f64, rng: &mut R) -> DMatrix<f64> {
    let o1 = random_orthogonal_symplectic(n, rng);
    let o2 = random_orthogonal_symplectic(n, rng);
    let mut z = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let r = if max_squeezing > 0.0 {
            rng.random_range(0.0..=max_squeezing)
        } else {
            0.0
        };
        z[(2 * k, 2 * k)] = r.exp();
        z[(2 * k + 1, 2 * k + 1)] = (-r).exp();
    }
    o1 * z * o2
}

/// Random `S D Sᵀ` on `n` modes, not yet partitioned.
pub fn random_mixed_matrix<R: Rng + ?Sized>(
    n: usize,
    config: &RandomCmConfig,
    rng: &mut R,
) -> DMatrix<f64> {
    assert!(n > 0, "at least one mode is required");
    assert!(
        config.temperature_scale >= 1.0,
        "temperature scale must be at least 1"
    );
    let s = random_symplectic(n, config.max_squeezing, rng);
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let nu = if config.temperature_scale > 1.0 {
            rng.random_range(1.0..=config.temperature_scale)
        } else {
            1.0
        };
        d[(2 * k, 2 * k)] = nu;
        d[(2 * k + 1, 2 * k + 1)] = nu;
    }
    symmetrize(&(&s * d * s.transpose()))
}

pub fn random_cm_with<R: Rng + ?Sized>(
    n_a: usize,
    n_b: usize,
    config: &RandomCmConfig,
    rng: &mut R,
) -> CovarianceMatrix {
    assert!(n_a > 0 && n_b > 0, "both parties need at least one mode");
    CovarianceMatrix::new(random_mixed_matrix(n_a + n_b, config, rng), n_a, n_b)
        .expect("S D Sᵀ is symmetric with the right shape")
}

/// Random bona fide covariance matrix, deterministic in `seed`.
///
/// # Panics
///
/// If either party has no modes or `temperature_scale < 1`.
pub fn random_cm(n_a: usize, n_b: usize, temperature_scale: f64, seed: u64) -> CovarianceMatrix {
    let config = RandomCmConfig::with_temperature(temperature_scale);
    random_cm_with(n_a, n_b, &config, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random Gaussian channel on `n` modes with one or two mixed, squeezed
/// ancillas coupled by a random symplectic.
pub fn random_channel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GaussianChannelDilation {
    let k = rng.random_range(1..=2);
    let ancilla = random_mixed_matrix(
        k,
        &RandomCmConfig {
            temperature_scale: 2.0,
            max_squeezing: 1.0,
        },
        rng,
    );
    let s = random_symplectic(n + k, 1.0, rng);
    GaussianChannelDilation::new(ancilla, s).expect("random dilation is valid by construction")
}
