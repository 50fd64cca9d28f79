//! Seeded sampling helpers.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64`, with normals drawn by `rand_distr`'s
//! ziggurat `StandardNormal`. Outputs are bit-reproducible for a given
//! seed and build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::spectral::{self, Matrix, SymMatrix};

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal(rng: &mut SimRng) -> f64 {
    rng.sample(StandardNormal)
}

/// `rows × cols` matrix of i.i.d. `N(0, std²)` draws, filled row-major.
pub fn gaussian_matrix(rng: &mut SimRng, rows: usize, cols: usize, std: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| std * standard_normal(rng))
}

/// Modified Gram-Schmidt on the columns of a square matrix.
pub fn orthonormalize_columns(g: &Matrix) -> Matrix {
    let d = g.rows();
    assert!(g.is_square());
    let mut q = g.clone();
    for k in 0..d {
        for j in 0..k {
            let dot: f64 = (0..d).map(|i| q[(i, j)] * q[(i, k)]).sum();
            for i in 0..d {
                q[(i, k)] -= dot * q[(i, j)];
            }
        }
        let norm = (0..d).map(|i| q[(i, k)] * q[(i, k)]).sum::<f64>().sqrt();
        assert!(norm > 0.0, "column {k} is linearly dependent");
        for i in 0..d {
            q[(i, k)] /= norm;
        }
    }
    q
}

/// Haar-ish random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(d: usize, seed: u64) -> Matrix {
    let mut rng = seeded(seed);
    orthonormalize_columns(&gaussian_matrix(&mut rng, d, d, 1.0))
}

/// Draws rows `x = F g` with `g ~ N(0, I)`, so `Cov(x) = F Fᵀ`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    factor: Matrix,
}

impl GaussianSampler {
    /// Factor `V diag(√max(λ, 0))` of a PSD covariance.
    pub fn new(cov: &SymMatrix) -> Result<Self> {
        let s = spectral::eigh(cov)?;
        spectral::check_psd(&s, cov.frobenius_norm())?;
        let d = cov.dim();
        let roots: Vec<f64> = s.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        Ok(Self {
            factor: Matrix::from_fn(d, d, |i, k| s.eigenvectors[(i, k)] * roots[k]),
        })
    }

    pub fn from_factor(factor: Matrix) -> Self {
        assert!(factor.is_square());
        Self { factor }
    }

    pub fn dim(&self) -> usize {
        self.factor.rows()
    }

    /// `n × d` matrix of draws, one per row.
    pub fn sample(&self, rng: &mut SimRng, n: usize) -> Matrix {
        let g = gaussian_matrix(rng, n, self.dim(), 1.0);
        g.matmul(&self.factor.transpose())
    }
}
