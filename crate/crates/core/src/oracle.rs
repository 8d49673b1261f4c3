//! Brute-force cross-checks that share no code path with the analytic
//! pipeline: Monte Carlo conditional variances and a Hermitian eigensolver
//! for the Williamson spectrum.
//!
//! Sampling treats the covariance matrix itself as a classical covariance
//! (not `σ/2`). Every identity checked here (Schur complements, determinant
//! ratios) is homogeneous, so the convention does not affect the comparison.

use std::io::Write;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cm::{CovarianceMatrix, Party};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, spd_sqrt};
use crate::random::rng_for;
use crate::symplectic::omega;

/// Samples drawn from each counter-based RNG stream. Stream `k` always
/// produces samples `k·BLOCK .. (k+1)·BLOCK`, whatever the worker count.
pub const BLOCK: usize = 8192;

/// Zero-mean phase-space samples, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    dim: usize,
    seed: u64,
    samples: Vec<f64>,
}

impl SampleBatch {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.dim)
    }

    pub fn mean(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.dim);
        for r in self.rows() {
            for (acc, x) in m.iter_mut().zip(r) {
                *acc += x;
            }
        }
        m / self.count() as f64
    }

    /// Unbiased sample covariance about the sample mean.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let mut cov = DMatrix::zeros(self.dim, self.dim);
        for r in self.rows() {
            let v = DVector::from_iterator(self.dim, r.iter().zip(mean.iter()).map(|(x, m)| x - m));
            cov.ger(1.0, &v, &v, 1.0);
        }
        cov / (self.count() as f64 - 1.0)
    }

    /// Sample mean within five standard errors of zero.
    pub fn mean_within_band(&self, trace: f64) -> bool {
        self.mean().norm() <= 5.0 * (trace / self.count() as f64).sqrt()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.dim / 2)
            .flat_map(|k| [format!("x{}", k + 1), format!("p{}", k + 1)])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for r in self.rows() {
            let line: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn fill_block(l: &DMatrix<f64>, seed: u64, block: usize, out: &mut [f64]) {
    let dim = l.nrows();
    let mut rng = rng_for(seed, block as u64);
    let mut z = DVector::zeros(dim);
    for row in out.chunks_exact_mut(dim) {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let x = l * &z;
        row.copy_from_slice(x.as_slice());
    }
}

/// Draws `count` vectors from `N(0, σ)` using the Cholesky factor of `σ`,
/// with work split into `workers` contiguous chunks of blocks.
pub fn sample_gaussian_with_workers(
    sigma: &CovarianceMatrix,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<SampleBatch> {
    let dim = sigma.dim();
    let l = Cholesky::new(sigma.matrix().clone())
        .ok_or(Error::IllConditioned {
            what: "sampling covariance",
            condition: f64::INFINITY,
            limit: crate::linalg::MAX_CONDITION,
        })?
        .l();
    let mut samples = vec![0.0; count * dim];
    let blocks: Vec<(usize, &mut [f64])> = samples.chunks_mut(BLOCK * dim).enumerate().collect();
    let per_worker = blocks.len().div_ceil(workers.max(1)).max(1);
    let mut grouped: Vec<Vec<(usize, &mut [f64])>> = Vec::new();
    for (i, b) in blocks.into_iter().enumerate() {
        if i % per_worker == 0 {
            grouped.push(Vec::new());
        }
        grouped.last_mut().unwrap().push(b);
    }
    grouped.into_par_iter().for_each(|chunk| {
        for (k, out) in chunk {
            fill_block(&l, seed, k, out);
        }
    });
    Ok(SampleBatch { dim, seed, samples })
}

pub fn sample_gaussian(sigma: &CovarianceMatrix, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_gaussian_with_workers(sigma, count, seed, rayon::current_num_threads())
}

/// Monte Carlo estimate of a Reid conditional-variance product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReidEstimate {
    pub product: f64,
    /// Delta-method standard error of `product`.
    pub std_error: f64,
}

struct Regression {
    residuals: Vec<f64>,
    variance: f64,
}

fn regress(batch: &SampleBatch, y: usize, x: usize) -> Result<Regression> {
    let n = batch.count() as f64;
    let (mut mx, mut my) = (0.0, 0.0);
    for r in batch.rows() {
        mx += r[x];
        my += r[y];
    }
    mx /= n;
    my /= n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for r in batch.rows() {
        let (dx, dy) = (r[x] - mx, r[y] - my);
        sxx += dx * dx;
        sxy += dx * dy;
    }
    if !(sxx > f64::EPSILON * n) {
        return Err(Error::DegenerateData(format!("regressor column {x} has no variance")));
    }
    let slope = sxy / sxx;
    let residuals: Vec<f64> = batch
        .rows()
        .map(|r| (r[y] - my) - slope * (r[x] - mx))
        .collect();
    let variance = residuals.iter().map(|e| e * e).sum::<f64>() / (n - 2.0);
    Ok(Regression {
        residuals,
        variance,
    })
}

/// `V_{x|x'} V_{p|p'}` from least-squares residuals of the steered party's
/// quadratures regressed on the steering party's matching quadratures.
pub fn empirical_reid(batch: &SampleBatch, steered: Party) -> Result<ReidEstimate> {
    if batch.dim() != 4 {
        return Err(Error::Precondition(format!(
            "Reid products need a two-mode batch, got dimension {}",
            batch.dim()
        )));
    }
    if batch.count() < 10_000 {
        return Err(Error::Precondition(format!(
            "at least 10⁴ samples are needed, got {}",
            batch.count()
        )));
    }
    let (target, regressor) = match steered {
        Party::B => (2, 0),
        Party::A => (0, 2),
    };
    let rx = regress(batch, target, regressor)?;
    let rp = regress(batch, target + 1, regressor + 1)?;
    let (vx, vp) = (rx.variance, rp.variance);
    let n = batch.count() as f64;
    let (mut m4x, mut m4p, mut m22) = (0.0, 0.0, 0.0);
    for (ex, ep) in rx.residuals.iter().zip(&rp.residuals) {
        let (qx, qp) = (ex * ex, ep * ep);
        m4x += qx * qx;
        m4p += qp * qp;
        m22 += qx * qp;
    }
    let var_x = (m4x / n - vx * vx) / n;
    let var_p = (m4p / n - vp * vp) / n;
    let cov = (m22 / n - vx * vp) / n;
    let var_product = vp * vp * var_x + vx * vx * var_p + 2.0 * vx * vp * cov;
    Ok(ReidEstimate {
        product: vx * vp,
        std_error: var_product.max(0.0).sqrt(),
    })
}

pub fn empirical_reid_product(batch: &SampleBatch, steered: Party) -> Result<f64> {
    empirical_reid(batch, steered).map(|e| e.product)
}

/// Williamson spectrum from the Hermitian matrix `i √M Ω √M`, whose
/// eigenvalues are `±ν`. Ascending.
pub fn dense_eigen_crosscheck(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if m.ncols() != dim || dim == 0 || dim % 2 != 0 {
        return Err(Error::Structural(format!(
            "expected an even square matrix, got {}x{}",
            dim,
            m.ncols()
        )));
    }
    let root = spd_sqrt(m)?;
    let k = &root * omega(dim / 2) * &root;
    let h = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(0.0, k[(i, j)]));
    let vals = hermitian_eigenvalues(h);
    Ok(vals[dim / 2..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twomode::tmsv_state;

    #[test]
    fn crosscheck_trivial_cases() {
        for v in dense_eigen_crosscheck(&DMatrix::identity(6, 6)).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 8.0]);
        assert!((dense_eigen_crosscheck(&m).unwrap()[0] - 4.0).abs() < 1e-12);
        assert!(dense_eigen_crosscheck(&DMatrix::identity(3, 3)).is_err());
        assert!(dense_eigen_crosscheck(&DMatrix::from_diagonal_element(2, 2, -1.0)).is_err());
    }

    #[test]
    fn identity_samples_have_unit_variance() {
        let s = CovarianceMatrix::vacuum(1, 1).unwrap();
        let batch = sample_gaussian(&s, 1_000_000, 7).unwrap();
        let cov = batch.covariance();
        for i in 0..4 {
            assert!((0.99..=1.01).contains(&cov[(i, i)]), "{}", cov[(i, i)]);
        }
        assert!(batch.mean_within_band(4.0));
    }

    #[test]
    fn seeds_are_reproducible_and_worker_independent() {
        let s = tmsv_state(2.0).unwrap();
        let a = sample_gaussian_with_workers(&s, 50_000, 3, 1).unwrap();
        let b = sample_gaussian_with_workers(&s, 50_000, 3, 5).unwrap();
        let c = sample_gaussian(&s, 50_000, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_ne!(a, sample_gaussian(&s, 50_000, 4).unwrap());
    }

    #[test]
    fn reid_preconditions() {
        let s = tmsv_state(2.0).unwrap();
        let small = sample_gaussian(&s, 100, 1).unwrap();
        assert!(matches!(empirical_reid_product(&small, Party::B), Err(Error::Precondition(_))));
        let mut d = DMatrix::<f64>::identity(4, 4);
        d[(0, 0)] = 1e-300;
        let degenerate = CovarianceMatrix::new(d, 1, 1).unwrap();
        let batch = sample_gaussian(&degenerate, 20_000, 1).unwrap();
        assert!(matches!(
            empirical_reid_product(&batch, Party::B),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let s = tmsv_state(2.0).unwrap();
        let batch = sample_gaussian(&s, 3, 1).unwrap();
        let mut out = Vec::new();
        batch.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "x1,p1,x2,p2");
        assert_eq!(lines.len(), 4);
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first, batch.row(0));
    }
}
