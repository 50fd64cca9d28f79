//! Fisher-information geometry of the Gaussian representation model:
//! the local and average FIM, the covariance-to-FIM spectral map, the
//! effective intrinsic dimension and the efficiency ratio built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, condition_number, offdiag_mass, ConditionNumber, Matrix, SymMatrix};

pub const DEFAULT_EPSILON: f64 = 0.05;

/// Eigenvalues within `TIE_TOLERANCE * λ_1` of each other belong to the
/// same eigenspace and are never split by the `d_eff` cut.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Covariance eigenvalues below `RANK_TOLERANCE * ν_1` are numerically zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Largest negative value `fim_spectrum_from_cov` clamps to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Observation noise `σ²`, encoder Lipschitz constant `L` and dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModelConfig {
    pub sigma_sq: f64,
    pub lipschitz: f64,
    pub dim: usize,
}

impl GaussianModelConfig {
    pub fn new(sigma_sq: f64, lipschitz: f64, dim: usize) -> Result<Self> {
        if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma_sq must be positive, got {sigma_sq}")));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "lipschitz must be positive, got {lipschitz}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("dim must be at least 1".into()));
        }
        Ok(Self {
            sigma_sq,
            lipschitz,
            dim,
        })
    }

    /// Same noise model at another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.sigma_sq, self.lipschitz, dim)
    }
}

/// Spectral summary of a representation covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// `ν_i`, descending, numerically-zero values set to 0.
    pub cov_eigenvalues: Vec<f64>,
    /// `λ_i` from the spectral map, descending.
    pub fim_eigenvalues: Vec<f64>,
    pub epsilon: f64,
    pub d_eff: usize,
    pub eta: f64,
    pub condition_number: ConditionNumber,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offdiag_mass: Option<f64>,
}

impl EfficiencyReport {
    pub fn dim(&self) -> usize {
        self.fim_eigenvalues.len()
    }
}

/// FIM of `N(z, σ² I)` with respect to its mean: `(1/σ²) I_d`.
pub fn local_fim(cfg: &GaussianModelConfig) -> SymMatrix {
    SymMatrix::scaled_identity(cfg.dim, 1.0 / cfg.sigma_sq)
}

/// Entrywise mean of per-sample FIMs.
pub fn average_fim(samples: &[SymMatrix]) -> Result<SymMatrix> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidInput("average_fim needs at least one matrix".into()))?;
    let d = first.dim();
    let mut acc = Matrix::zeros(d, d);
    for (k, m) in samples.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::InvalidInput(format!(
                "matrix {k} has dimension {}, expected {d}",
                m.dim()
            )));
        }
        for (a, v) in acc.as_mut_slice().iter_mut().zip(m.as_matrix().as_slice()) {
            *a += v;
        }
    }
    let scale = 1.0 / samples.len() as f64;
    Ok(SymMatrix::from_upper_fn(d, |i, j| acc[(i, j)] * scale))
}

/// Leading-order FIM eigenvalues from covariance eigenvalues:
/// `λ_i = (1/σ²) · ν_i / (ν_i + σ² L²)`.
///
/// The map is strictly increasing in `ν`, so input order is preserved.
/// Values in `[-1e-12, 0)` are clamped to zero.
pub fn fim_spectrum_from_cov(nu: &[f64], cfg: &GaussianModelConfig) -> Result<Vec<f64>> {
    let noise = cfg.sigma_sq * cfg.lipschitz * cfg.lipschitz;
    nu.iter()
        .enumerate()
        .map(|(i, &v)| {
            if !v.is_finite() || v < -NEGATIVE_CLAMP {
                return Err(Error::InvalidInput(format!(
                    "covariance eigenvalue {i} is {v}, expected non-negative"
                )));
            }
            let v = v.max(0.0);
            Ok(v / (v + noise) / cfg.sigma_sq)
        })
        .collect()
}

/// Smallest `k` whose top-`k` eigenvalue mass reaches `1 - epsilon` of the
/// total, where a ratio of exactly `1 - epsilon` counts.
///
/// The cut never separates eigenvalues that are tied (within
/// `TIE_TOLERANCE * λ_1`): a repeated eigenvalue spans one eigenspace, so
/// when the cut lands inside a tie group it is moved to the group's end.
pub fn effective_dimension(lambda: &[f64], epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_spectrum(lambda)?;
    let total: f64 = lambda.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSpectrum(
            "all eigenvalues are zero; effective dimension is undefined".into(),
        ));
    }
    let target = 1.0 - epsilon;
    let mut cumulative = 0.0;
    let mut k = lambda.len();
    for (i, &l) in lambda.iter().enumerate() {
        cumulative += l;
        if cumulative / total >= target {
            k = i + 1;
            break;
        }
    }
    let tie = TIE_TOLERANCE * lambda[0];
    while k < lambda.len() && lambda[k - 1] - lambda[k] <= tie {
        k += 1;
    }
    Ok(k)
}

/// `d_eff / d`.
pub fn efficiency(lambda: &[f64], epsilon: f64, d: usize) -> Result<f64> {
    if d != lambda.len() {
        return Err(Error::InvalidInput(format!(
            "dimension {d} does not match spectrum length {}",
            lambda.len()
        )));
    }
    Ok(effective_dimension(lambda, epsilon)? as f64 / d as f64)
}

/// Eigendecomposes `cov`, maps its spectrum through
/// [`fim_spectrum_from_cov`] and summarizes the result.
pub fn build_report(
    cov: &SymMatrix,
    cfg: &GaussianModelConfig,
    epsilon: f64,
    correlation: Option<&Matrix>,
) -> Result<EfficiencyReport> {
    check_epsilon(epsilon)?;
    if cov.dim() != cfg.dim {
        return Err(Error::InvalidInput(format!(
            "covariance dimension {} does not match model dimension {}",
            cov.dim(),
            cfg.dim
        )));
    }
    if let Some(c) = correlation {
        if c.shape() != (cfg.dim, cfg.dim) {
            return Err(Error::InvalidInput(format!(
                "correlation matrix is {}x{}, expected {d}x{d}",
                c.rows(),
                c.cols(),
                d = cfg.dim
            )));
        }
    }
    let spectrum = spectral::eigh(cov)?;
    spectral::check_psd(&spectrum, cov.frobenius_norm())?;

    let top = spectrum.eigenvalues[0];
    if top <= 0.0 {
        return Err(Error::DegenerateSpectrum(
            "covariance has no positive eigenvalue".into(),
        ));
    }
    let cutoff = RANK_TOLERANCE * top;
    let nu: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|&v| if v <= cutoff { 0.0 } else { v })
        .collect();
    let lambda = fim_spectrum_from_cov(&nu, cfg)?;
    let d_eff = effective_dimension(&lambda, epsilon)?;
    Ok(EfficiencyReport {
        eta: d_eff as f64 / cfg.dim as f64,
        condition_number: condition_number(&lambda),
        cov_eigenvalues: nu,
        fim_eigenvalues: lambda,
        epsilon,
        d_eff,
        offdiag_mass: correlation.map(offdiag_mass),
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

fn check_spectrum(lambda: &[f64]) -> Result<()> {
    if lambda.is_empty() {
        return Err(Error::InvalidInput("spectrum is empty".into()));
    }
    if let Some(i) = lambda.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "eigenvalue {i} is {}, expected finite and non-negative",
            lambda[i]
        )));
    }
    if let Some(i) = lambda.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(format!(
            "spectrum is not sorted descending at index {}",
            i + 1
        )));
    }
    Ok(())
}
