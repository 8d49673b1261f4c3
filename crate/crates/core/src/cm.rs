use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, direct_sum, max_abs, symmetrize};
use crate::DEFAULT_SYM_TOL;

/// One side of the bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

/// Covariance matrix of a bipartite Gaussian state with an explicit `A|B`
/// mode partition.
///
/// Rows and columns `0..2n` belong to Alice, `2n..2(n+m)` to Bob, with
/// quadratures interleaved as `x, p` per mode. The stored matrix is exactly
/// symmetric: inputs within the symmetry tolerance are averaged with their
/// transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    data: DMatrix<f64>,
    n_a: usize,
    n_b: usize,
}

impl CovarianceMatrix {
    pub fn new(data: DMatrix<f64>, n_a: usize, n_b: usize) -> Result<Self> {
        Self::with_sym_tol(data, n_a, n_b, DEFAULT_SYM_TOL)
    }

    /// Like [`CovarianceMatrix::new`] with an explicit relative symmetry
    /// tolerance.
    pub fn with_sym_tol(data: DMatrix<f64>, n_a: usize, n_b: usize, sym_tol: f64) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::Structural(format!(
                "both parties need at least one mode, got ({n_a}, {n_b})"
            )));
        }
        let dim = 2 * (n_a + n_b);
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::Structural(format!(
                "partition ({n_a}, {n_b}) needs a {dim}x{dim} matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix has non-finite entries".into()));
        }
        let asym = max_abs(&(&data - data.transpose()));
        if asym > sym_tol * max_abs(&data).max(1.0) {
            return Err(Error::Structural(format!(
                "matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        Ok(Self {
            data: symmetrize(&data),
            n_a,
            n_b,
        })
    }

    /// Assembles `[[A, C], [Cᵀ, B]]`.
    pub fn from_blocks(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() % 2 != 0 || b.nrows() % 2 != 0 {
            return Err(Error::Structural("blocks must have even dimension".into()));
        }
        let (da, db) = (a.nrows(), b.nrows());
        if a.ncols() != da || b.ncols() != db || c.shape() != (da, db) {
            return Err(Error::Structural(format!(
                "block shapes do not fit: A {:?}, B {:?}, C {:?}",
                a.shape(),
                b.shape(),
                c.shape()
            )));
        }
        let mut data = DMatrix::zeros(da + db, da + db);
        data.view_mut((0, 0), (da, da)).copy_from(a);
        data.view_mut((da, da), (db, db)).copy_from(b);
        data.view_mut((0, da), (da, db)).copy_from(c);
        data.view_mut((da, 0), (db, da)).copy_from(&c.transpose());
        Self::new(data, da / 2, db / 2)
    }

    pub fn vacuum(n_a: usize, n_b: usize) -> Result<Self> {
        let dim = 2 * (n_a + n_b);
        Self::new(DMatrix::identity(dim, dim), n_a, n_b)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn n_modes(&self, party: Party) -> usize {
        match party {
            Party::A => self.n_a,
            Party::B => self.n_b,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn block_a(&self) -> DMatrix<f64> {
        let d = 2 * self.n_a;
        self.data.view((0, 0), (d, d)).into_owned()
    }

    pub fn block_b(&self) -> DMatrix<f64> {
        let (da, db) = (2 * self.n_a, 2 * self.n_b);
        self.data.view((da, da), (db, db)).into_owned()
    }

    /// The `2n×2m` correlation block `C`.
    pub fn block_c(&self) -> DMatrix<f64> {
        let (da, db) = (2 * self.n_a, 2 * self.n_b);
        self.data.view((0, da), (da, db)).into_owned()
    }

    pub fn block(&self, party: Party) -> DMatrix<f64> {
        match party {
            Party::A => self.block_a(),
            Party::B => self.block_b(),
        }
    }

    /// The same state with the roles of Alice and Bob exchanged.
    pub fn swap_parties(&self) -> Self {
        Self::from_blocks(&self.block_b(), &self.block_a(), &self.block_c().transpose())
            .expect("swapped blocks keep a valid shape")
    }

    /// Tensor product of two bipartite states, keeping Alice's modes of both
    /// factors on Alice's side: `A₁⊕A₂ | B₁⊕B₂`.
    pub fn tensor(&self, other: &Self) -> Self {
        let a = direct_sum(&self.block_a(), &other.block_a());
        let b = direct_sum(&self.block_b(), &other.block_b());
        let c = direct_sum(&self.block_c(), &other.block_c());
        Self::from_blocks(&a, &b, &c).expect("direct sum of valid blocks")
    }

    /// Convex combination `λ·self + (1−λ)·other` of two matrices with the same
    /// partition.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.n_a != other.n_a || self.n_b != other.n_b {
            return Err(Error::Structural("mixing requires identical partitions".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("mixing weight {lambda} outside [0, 1]")));
        }
        Self::new(&self.data * lambda + &other.data * (1.0 - lambda), self.n_a, self.n_b)
    }

    pub fn log_det(&self) -> Result<f64> {
        linalg::log_det_spd(&self.data)
    }

    pub fn det(&self) -> Result<f64> {
        self.log_det().map(f64::exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CovarianceMatrix {
        let a = DMatrix::from_diagonal_element(2, 2, 2.0);
        let b = DMatrix::from_diagonal_element(2, 2, 3.0);
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, -1.0]);
        CovarianceMatrix::from_blocks(&a, &b, &c).unwrap()
    }

    #[test]
    fn blocks_round_trip() {
        let s = sample();
        assert_eq!(s.block_a(), DMatrix::from_diagonal_element(2, 2, 2.0));
        assert_eq!(s.block_c()[(0, 1)], 0.5);
        assert_eq!(s.matrix()[(3, 0)], 0.5);
    }

    #[test]
    fn rejects_bad_shapes_and_asymmetry() {
        assert!(matches!(
            CovarianceMatrix::new(DMatrix::identity(4, 4), 2, 1),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            CovarianceMatrix::new(DMatrix::identity(4, 4), 2, 0),
            Err(Error::Structural(_))
        ));
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(0, 1)] = 0.1;
        assert!(matches!(CovarianceMatrix::new(m, 1, 1), Err(Error::Structural(_))));
    }

    #[test]
    fn tiny_asymmetry_is_averaged_away() {
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(0, 2)] = 0.5;
        m[(2, 0)] = 0.5 + 1e-13;
        let s = CovarianceMatrix::new(m, 1, 1).unwrap();
        assert_eq!(s.matrix()[(0, 2)], s.matrix()[(2, 0)]);
    }

    #[test]
    fn swap_twice_is_identity() {
        let s = sample();
        assert_eq!(s.swap_parties().swap_parties(), s);
        assert_eq!(s.swap_parties().block_a(), s.block_b());
    }

    #[test]
    fn tensor_keeps_party_grouping() {
        let s = sample();
        let t = s.tensor(&CovarianceMatrix::vacuum(1, 1).unwrap());
        assert_eq!((t.n_a(), t.n_b()), (2, 2));
        assert_eq!(t.block_a()[(0, 0)], 2.0);
        assert_eq!(t.block_a()[(2, 2)], 1.0);
        assert_eq!(t.block_c()[(0, 1)], 0.5);
    }
}
