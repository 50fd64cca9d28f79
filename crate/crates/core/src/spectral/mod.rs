//! Dense symmetric linear algebra: Jacobi eigendecomposition, inverse
//! square roots, batch covariance and conditioning.

mod batch;
mod matrix;

pub use batch::EmbeddingBatch;
pub use matrix::{offdiag_mass, Matrix, SymMatrix};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues below `-PSD_TOLERANCE * ‖A‖_F` mean the matrix is not PSD.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Eigen-pairs of a symmetric matrix, eigenvalues in descending order.
/// Column `k` of `eigenvectors` pairs with `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SymmetricSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymMatrix::from_upper_fn(d, |i, j| {
            (0..d).map(|k| v[(i, k)] * mapped[k] * v[(j, k)]).sum()
        })
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map_eigenvalues(|l| l)
    }

    pub fn condition_number(&self) -> ConditionNumber {
        condition_number(&self.eigenvalues)
    }
}

/// `λ_1 / λ_d`, or `Infinite` when the smallest eigenvalue is not positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionNumber {
    Finite(f64),
    Infinite,
}

impl ConditionNumber {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ConditionNumber::Infinite)
    }

    pub fn value(&self) -> f64 {
        match *self {
            ConditionNumber::Finite(v) => v,
            ConditionNumber::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for ConditionNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConditionNumber::Finite(v) => write!(f, "{v}"),
            ConditionNumber::Infinite => f.write_str("inf"),
        }
    }
}

const INFINITY_MARKER: &str = "inf";

impl Serialize for ConditionNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            ConditionNumber::Finite(v) => s.serialize_f64(v),
            ConditionNumber::Infinite => s.serialize_str(INFINITY_MARKER),
        }
    }
}

impl<'de> Deserialize<'de> for ConditionNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(ConditionNumber::Finite(v)),
            Repr::Text(t) if t == INFINITY_MARKER => Ok(ConditionNumber::Infinite),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"{INFINITY_MARKER}\", got {t:?}"
            ))),
        }
    }
}

/// Condition number of a descending spectrum.
pub fn condition_number(eigenvalues: &[f64]) -> ConditionNumber {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(&top), Some(&bottom)) if bottom > 0.0 => ConditionNumber::Finite(top / bottom),
        _ => ConditionNumber::Infinite,
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps visit every `(p, q)` pair in row order and stop once the
/// off-diagonal Frobenius norm drops to `JACOBI_TOLERANCE * ‖A‖_F`.
/// The result is deterministic for a given input.
pub fn eigh(a: &SymMatrix) -> Result<SymmetricSpectrum> {
    if let Some((row, col)) = a.as_matrix().first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let d = a.dim();
    let mut work = a.as_matrix().clone();
    let mut v = Matrix::identity(d);
    let threshold = JACOBI_TOLERANCE * a.frobenius_norm();

    let mut converged = false;
    let mut off = off_diagonal_norm(&work);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..d.saturating_sub(1) {
            for q in (p + 1)..d {
                rotate(&mut work, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&work);
    }
    if !converged && off > threshold {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm: off,
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| work[(j, j)].total_cmp(&work[(i, i)]));
    let eigenvalues = order.iter().map(|&k| work[(k, k)]).collect();
    let eigenvectors = Matrix::from_fn(d, d, |i, k| v[(i, order[k])]);
    Ok(SymmetricSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    offdiag_mass(m).sqrt()
}

/// Annihilates `a[p][q]` with a plane rotation and accumulates it into `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let d = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta.is_infinite() { 0.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for r in 0..d {
        if r == p || r == q {
            continue;
        }
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[(r, p)] = new_rp;
        a[(p, r)] = new_rp;
        a[(r, q)] = new_rq;
        a[(q, r)] = new_rq;
    }
    for r in 0..d {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = c * vrp - s * vrq;
        v[(r, q)] = s * vrp + c * vrq;
    }
}

/// Default eigenvalue floor for [`inv_sqrt`]: `1e-12 * max(λ_1, 1)`.
pub fn default_floor(spectrum: &SymmetricSpectrum) -> f64 {
    1e-12 * spectrum.eigenvalues.first().copied().unwrap_or(0.0).max(1.0)
}

/// `V diag(max(λ_i, floor))^{-1/2} Vᵀ` for a PSD matrix.
pub fn inv_sqrt(a: &SymMatrix, floor: f64) -> Result<SymMatrix> {
    if floor.is_nan() || floor <= 0.0 || floor.is_infinite() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue floor must be a positive finite number, got {floor}"
        )));
    }
    let spectrum = eigh(a)?;
    check_psd(&spectrum, a.frobenius_norm())?;
    Ok(spectrum.map_eigenvalues(|l| l.max(floor).sqrt().recip()))
}

/// [`inv_sqrt`] with [`default_floor`].
pub fn inv_sqrt_default(a: &SymMatrix) -> Result<SymMatrix> {
    let spectrum = eigh(a)?;
    check_psd(&spectrum, a.frobenius_norm())?;
    let floor = default_floor(&spectrum);
    Ok(spectrum.map_eigenvalues(|l| l.max(floor).sqrt().recip()))
}

pub(crate) fn check_psd(spectrum: &SymmetricSpectrum, frobenius: f64) -> Result<()> {
    let bound = -PSD_TOLERANCE * frobenius;
    match spectrum.eigenvalues.last() {
        Some(&min) if min < bound => Err(Error::NotPsd {
            min_eigenvalue: min,
            bound,
        }),
        _ => Ok(()),
    }
}

/// Population-normalized (`1/n`) second-moment matrix of the batch rows,
/// about the batch mean when `centered`, else about zero.
pub fn covariance(batch: &EmbeddingBatch, centered: bool) -> SymMatrix {
    let n = batch.n();
    let d = batch.d();
    let mean = if centered {
        batch.column_means()
    } else {
        vec![0.0; d]
    };
    let mut acc = Matrix::zeros(d, d);
    let mut dev = vec![0.0; d];
    for b in 0..n {
        for ((slot, &z), &m) in dev.iter_mut().zip(batch.row(b)).zip(&mean) {
            *slot = z - m;
        }
        for i in 0..d {
            let di = dev[i];
            if di == 0.0 {
                continue;
            }
            for j in i..d {
                acc[(i, j)] += di * dev[j];
            }
        }
    }
    let scale = 1.0 / n as f64;
    SymMatrix::from_upper_fn(d, |i, j| acc[(i, j)] * scale)
}
