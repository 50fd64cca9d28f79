//! Seeded validators for the closed-form claims of the framework.
//!
//! Each validator measures named deviations, compares them with named
//! tolerances and records the full configuration it ran with. Monte Carlo
//! checks use a `5/√n` pass bar per entry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::barlow::{
    cross_correlation, diag_gap, population_cross_correlation, train_toy, AugmentationModel,
    LinearEncoder, TrainConfig, TrainingTrace,
};
use crate::error::{Error, Result};
use crate::fim::{self, build_report, fim_spectrum_from_cov, local_fim, EfficiencyReport, GaussianModelConfig};
use crate::report::ParamRecord;
use crate::rng::{self, GaussianSampler};
use crate::spectral::{self, condition_number, offdiag_mass, ConditionNumber, EmbeddingBatch, Matrix, SymMatrix};

pub const MIN_MC_SAMPLES: usize = 10_000;
pub const MIN_EVAL_SAMPLES: usize = 4096;
pub const OFFDIAG_MASS_THRESHOLD: f64 = 0.05;
pub const DIAG_GAP_THRESHOLD: f64 = 0.1;
pub const SPECTRAL_SPREAD_TOLERANCE: f64 = 1e-12;

/// CLT pass bar for a mean of `n` unit-scale draws.
pub fn clt_tolerance(n: usize) -> f64 {
    5.0 / (n as f64).sqrt()
}

/// Independent sub-stream seed for `stream` under a master seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub name: String,
    pub passed: bool,
    /// Deviations; each is compared against the same key in `tolerance`.
    pub measured: BTreeMap<String, f64>,
    pub tolerance: BTreeMap<String, f64>,
    /// Informational values that are not pass criteria.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observed: BTreeMap<String, f64>,
    pub config: ParamRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ValidationResult {
    fn new(name: &str, config: ParamRecord) -> Self {
        Self {
            name: name.into(),
            passed: false,
            measured: BTreeMap::new(),
            tolerance: BTreeMap::new(),
            observed: BTreeMap::new(),
            config,
            error: None,
        }
    }

    fn check(&mut self, key: &str, measured: f64, tolerance: f64) -> &mut Self {
        self.measured.insert(key.into(), measured);
        self.tolerance.insert(key.into(), tolerance);
        self
    }

    fn observe(&mut self, key: &str, value: f64) -> &mut Self {
        self.observed.insert(key.into(), value);
        self
    }

    fn finish(mut self) -> Self {
        self.passed = self.measured.iter().all(|(k, m)| {
            self.tolerance
                .get(k)
                .is_some_and(|t| m.is_finite() && *m <= *t)
        });
        self
    }

    /// Failed entry carrying the error that stopped a validator.
    pub fn from_error(name: &str, config: ParamRecord, err: &Error) -> Self {
        let mut r = Self::new(name, config);
        r.error = Some(err.to_string());
        r
    }
}

/// Diagonal covariance spectrum, optionally conjugated by a seeded
/// random rotation, and a sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub cov_eigenvalues: Vec<f64>,
    pub rotation_seed: Option<u64>,
    pub sample_count: usize,
}

impl SyntheticSpec {
    pub fn new(cov_eigenvalues: Vec<f64>, rotation_seed: Option<u64>, sample_count: usize) -> Result<Self> {
        if cov_eigenvalues.is_empty() {
            return Err(Error::InvalidInput("at least one covariance eigenvalue is required".into()));
        }
        if let Some(v) = cov_eigenvalues.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "covariance eigenvalues must be finite and non-negative, got {v}"
            )));
        }
        if sample_count < 2 {
            return Err(Error::InvalidInput(format!(
                "sample count must be at least 2, got {sample_count}"
            )));
        }
        Ok(Self {
            cov_eigenvalues,
            rotation_seed,
            sample_count,
        })
    }

    pub fn dim(&self) -> usize {
        self.cov_eigenvalues.len()
    }

    fn rotation(&self) -> Matrix {
        match self.rotation_seed {
            Some(seed) => rng::random_orthogonal(self.dim(), seed),
            None => Matrix::identity(self.dim()),
        }
    }

    /// `Qᵀ diag(ν) Q`.
    pub fn covariance(&self) -> SymMatrix {
        SymMatrix::diagonal(&self.cov_eigenvalues).conjugate(&self.rotation().transpose())
    }

    fn sampler(&self) -> GaussianSampler {
        let q = self.rotation();
        let roots: Vec<f64> = self.cov_eigenvalues.iter().map(|v| v.sqrt()).collect();
        GaussianSampler::from_factor(Matrix::from_fn(self.dim(), self.dim(), |i, k| q[(k, i)] * roots[k]))
    }

    fn params(&self) -> ParamRecord {
        ParamRecord {
            d: Some(self.dim()),
            n: Some(self.sample_count),
            nu: Some(self.cov_eigenvalues.clone()),
            rotation_seed: self.rotation_seed,
            ..ParamRecord::default()
        }
    }
}

/// `n` draws from `N(0, Qᵀ diag(ν) Q)`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> EmbeddingBatch {
    let x = spec.sampler().sample(&mut rng::seeded(seed), spec.sample_count);
    EmbeddingBatch::new(x).expect("Gaussian draws are finite")
}

/// Monte Carlo FIM of `N(z, σ² I)`: averages `(1/σ⁴)(t − z)(t − z)ᵀ`
/// over `t ~ N(z, σ² I)` and compares it with `(1/σ²) I`.
pub fn validate_lemma1(cfg: &GaussianModelConfig, mc_samples: usize, seed: u64) -> Result<ValidationResult> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::Precondition(format!(
            "lemma1 needs at least {MIN_MC_SAMPLES} Monte Carlo samples, got {mc_samples}"
        )));
    }
    let d = cfg.dim;
    let z: Vec<f64> = (0..d).map(|i| 0.5 * i as f64 - 1.0).collect();
    let std = cfg.sigma_sq.sqrt();
    let mut g = rng::seeded(seed);
    let t = Matrix::from_fn(mc_samples, d, |_, i| z[i] + std * rng::standard_normal(&mut g));
    let residual = Matrix::from_fn(mc_samples, d, |b, i| t[(b, i)] - z[i]);
    let second_moment = spectral::covariance(&EmbeddingBatch::new(residual)?, false);
    let estimate = second_moment.scale(1.0 / (cfg.sigma_sq * cfg.sigma_sq));
    let target = local_fim(cfg);
    let deviation = estimate.as_matrix().sub(target.as_matrix()).max_abs();

    let mut r = ValidationResult::new(
        "lemma1_isotropic_fim",
        ParamRecord {
            d: Some(d),
            n: Some(mc_samples),
            sigma_sq: Some(cfg.sigma_sq),
            seed: Some(seed),
            ..ParamRecord::default()
        },
    );
    r.check("max_entry_deviation", deviation, clt_tolerance(mc_samples) / cfg.sigma_sq)
        .observe("target_diagonal", 1.0 / cfg.sigma_sq)
        .observe("mean_estimated_diagonal", estimate.diag().iter().sum::<f64>() / d as f64);
    Ok(r.finish())
}

/// Empirical whitened cross-correlation of `(z, z + ε)` against the
/// closed form, with both views whitened by the true
/// `(Σ_z + σ_ε² I)^{-1/2}`.
pub fn validate_lemma3(spec: &SyntheticSpec, noise_var: f64, seed: u64) -> Result<ValidationResult> {
    let n = spec.sample_count;
    if n < MIN_MC_SAMPLES {
        return Err(Error::Precondition(format!(
            "lemma3 needs at least {MIN_MC_SAMPLES} samples, got {n}"
        )));
    }
    let aug = AugmentationModel::new(noise_var, derive_seed(seed, 1))
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let cov_z = spec.covariance();
    let z = generate_synthetic(spec, seed);
    let (za, zb) = aug.augment_pair(&z);
    let whitener = spectral::inv_sqrt_default(&cov_z.add_diagonal(noise_var))?;
    let wa = za.matrix().matmul(whitener.as_matrix());
    let wb = zb.matrix().matmul(whitener.as_matrix());
    let empirical = wa.t_matmul(&wb).scale(1.0 / n as f64);
    let population = population_cross_correlation(&cov_z, noise_var)?;
    let deviation = empirical.sub(population.as_matrix()).max_abs();

    let mut params = spec.params();
    params.noise_var = Some(noise_var);
    params.seed = Some(seed);
    let mut r = ValidationResult::new("lemma3_closed_form", params);
    r.check("max_entry_deviation", deviation, clt_tolerance(n));
    for (i, v) in population.diag().iter().enumerate() {
        r.observe(&format!("population_c{i}{i}"), *v);
        r.observe(&format!("empirical_c{i}{i}"), empirical[(i, i)]);
    }
    Ok(r.finish())
}

pub const DEFAULT_LEMMA4_DELTA: f64 = 0.01;

/// Forward direction: `Σ_z = ν I` gives `C = ν/(ν + σ_ε²) I`.
/// Converse bound: `C_ii ≥ 1 − δ` under the diagonal formula needs
/// `ν_i ≥ σ_ε² (1 − δ)/δ`.
pub fn validate_lemma4(nu_equal: f64, noise_var: f64, d: usize, delta: f64) -> Result<ValidationResult> {
    if !(nu_equal > 0.0 && nu_equal.is_finite()) {
        return Err(Error::Precondition(format!("nu must be positive, got {nu_equal}")));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::Precondition(format!("noise variance must be non-negative, got {noise_var}")));
    }
    if d == 0 {
        return Err(Error::Precondition("d must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1), got {delta}")));
    }
    let c = population_cross_correlation(&SymMatrix::scaled_identity(d, nu_equal), noise_var)?;
    let expected = nu_equal / (nu_equal + noise_var);
    let forward = c
        .as_matrix()
        .sub(SymMatrix::scaled_identity(d, expected).as_matrix())
        .max_abs();
    let diag = c.diag();
    let spread = diag.iter().cloned().fold(f64::MIN, f64::max) - diag.iter().cloned().fold(f64::MAX, f64::min);

    let bound = noise_var * (1.0 - delta) / delta;
    let (boundary_dev, below_excess) = if noise_var > 0.0 {
        let at = |nu: f64| nu / (nu + noise_var);
        let boundary = (at(bound) - (1.0 - delta)).abs();
        let below = (at(bound * (1.0 - 1e-6)) - (1.0 - delta)).max(0.0);
        (boundary, below)
    } else {
        (0.0, 0.0)
    };

    let mut r = ValidationResult::new(
        "lemma4_isotropy",
        ParamRecord {
            d: Some(d),
            gamma: Some(nu_equal),
            noise_var: Some(noise_var),
            delta: Some(delta),
            ..ParamRecord::default()
        },
    );
    r.check("forward_max_deviation", forward, 1e-12)
        .check("diagonal_spread", spread, 1e-12)
        .check("converse_boundary_deviation", boundary_dev, 1e-12)
        .check("converse_below_bound_excess", below_excess, 0.0)
        .observe("c_diagonal", expected)
        .observe("implied_nu_lower_bound", bound);
    Ok(r.finish())
}

/// Equal covariance eigenvalues map to an exactly equal FIM spectrum.
pub fn validate_theorem1(
    spec: &SyntheticSpec,
    cfg: &GaussianModelConfig,
    noise_var: f64,
) -> Result<ValidationResult> {
    let gamma = spec.cov_eigenvalues[0];
    if spec.cov_eigenvalues.iter().any(|&v| v != gamma) {
        return Err(Error::Precondition("theorem1 needs all covariance eigenvalues equal".into()));
    }
    if gamma == 0.0 {
        return Err(Error::DegenerateSpectrum(
            "γ = 0: every FIM eigenvalue is zero".into(),
        ));
    }
    let cfg = cfg.with_dim(spec.dim())?;
    let cov = spec.covariance();
    let nu = spectral::eigh(&cov)?.eigenvalues;
    let lambda = fim_spectrum_from_cov(&nu, &cfg)?;
    let top = lambda[0];
    let bottom = *lambda.last().expect("non-empty spectrum");
    let spread = (top - bottom) / top;
    let cond = match condition_number(&lambda) {
        ConditionNumber::Finite(c) => c,
        ConditionNumber::Infinite => f64::INFINITY,
    };
    let c = population_cross_correlation(&cov, noise_var)?;
    let c_eig = spectral::eigh(&c)?.eigenvalues;
    let c_spread = (c_eig[0] - c_eig[c_eig.len() - 1]).abs() / c_eig[0].abs().max(f64::MIN_POSITIVE);

    let mut params = spec.params();
    params.sigma_sq = Some(cfg.sigma_sq);
    params.lipschitz = Some(cfg.lipschitz);
    params.noise_var = Some(noise_var);
    params.gamma = Some(gamma);
    let mut r = ValidationResult::new("theorem1_isotropic_fim", params);
    r.check("fim_relative_spread", spread, SPECTRAL_SPREAD_TOLERANCE)
        .check("condition_number_minus_one", (cond - 1.0).abs(), SPECTRAL_SPREAD_TOLERANCE)
        .check("correlation_relative_spread", c_spread, SPECTRAL_SPREAD_TOLERANCE)
        .observe("fim_eigenvalue", top)
        .observe("expected_fim_eigenvalue", gamma / (gamma + cfg.sigma_sq * cfg.lipschitz.powi(2)) / cfg.sigma_sq);
    Ok(r.finish())
}

/// Settings for the end-to-end optimality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Config {
    pub d_in: usize,
    pub d_out: usize,
    /// Data covariance is `data_scale · I_{d_in}`.
    pub data_scale: f64,
    pub noise_var: f64,
    pub train: TrainConfig,
    pub eval_n: usize,
    pub epsilon: f64,
}

pub const DEFAULT_NOISE_VAR: f64 = 0.1;

impl Default for Theorem2Config {
    fn default() -> Self {
        Self {
            d_in: 8,
            d_out: 4,
            data_scale: 1.0,
            noise_var: DEFAULT_NOISE_VAR,
            train: TrainConfig::default(),
            eval_n: MIN_EVAL_SAMPLES,
            epsilon: fim::DEFAULT_EPSILON,
        }
    }
}

impl Theorem2Config {
    pub fn data_cov(&self) -> SymMatrix {
        SymMatrix::scaled_identity(self.d_in, self.data_scale)
    }

    pub fn augmentation(&self) -> Result<AugmentationModel> {
        AugmentationModel::new(self.noise_var, derive_seed(self.train.seed, 2))
    }

    pub fn initial_encoder(&self) -> LinearEncoder {
        LinearEncoder::random(self.d_in, self.d_out, derive_seed(self.train.seed, 3))
    }

    pub fn params(&self) -> ParamRecord {
        ParamRecord {
            d_in: Some(self.d_in),
            d_out: Some(self.d_out),
            gamma: Some(self.data_scale),
            noise_var: Some(self.noise_var),
            sigma_sq: Some(self.train.sigma_sq),
            lipschitz: Some(self.train.lipschitz),
            epsilon: Some(self.epsilon),
            lambda: Some(self.train.lambda),
            lr: Some(self.train.lr),
            steps: Some(self.train.steps),
            batch_n: Some(self.train.batch_n),
            eval_n: Some(self.eval_n),
            seed: Some(self.train.seed),
            ..ParamRecord::default()
        }
    }
}

/// Efficiency and correlation of an encoder on a fresh batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EfficiencyReport,
    pub correlation: Matrix,
    pub diag_gap: f64,
}

impl Evaluation {
    pub fn offdiag_mass(&self) -> f64 {
        offdiag_mass(&self.correlation)
    }
}

/// Draws `eval_n` inputs from `N(0, data_cov)`, encodes and augments them
/// with streams derived from `seed`, and reports `η` of the view-A
/// covariance plus the views' cross-correlation.
pub fn evaluate_encoder(
    encoder: &LinearEncoder,
    data_cov: &SymMatrix,
    noise_var: f64,
    model: &GaussianModelConfig,
    eval_n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<Evaluation> {
    let sampler = GaussianSampler::new(data_cov)?;
    let x = sampler.sample(&mut rng::seeded(derive_seed(seed, 10)), eval_n);
    let z = EmbeddingBatch::new(encoder.encode(&x))?;
    let aug = AugmentationModel::new(noise_var, derive_seed(seed, 11))?;
    let (za, zb) = aug.augment_pair(&z);
    let correlation = cross_correlation(&za, &zb)?;
    let cov = spectral::covariance(&za, true);
    let report = build_report(&cov, &model.with_dim(encoder.d_out())?, epsilon, Some(&correlation))?;
    Ok(Evaluation {
        diag_gap: diag_gap(&correlation),
        report,
        correlation,
    })
}

/// Outcome of an end-to-end run: the validation entry plus the artifacts
/// that produced it.
#[derive(Debug, Clone)]
pub struct Theorem2Run {
    pub result: ValidationResult,
    pub encoder: LinearEncoder,
    pub trace: TrainingTrace,
    pub evaluation: Evaluation,
}

/// Trains the toy encoder to the loss optimum and checks `η = 1`,
/// off-diagonal mass and diagonal gap on a fresh evaluation batch.
pub fn run_theorem2(cfg: &Theorem2Config) -> Result<Theorem2Run> {
    if cfg.eval_n < MIN_EVAL_SAMPLES {
        return Err(Error::Precondition(format!(
            "theorem2 needs at least {MIN_EVAL_SAMPLES} evaluation samples, got {}",
            cfg.eval_n
        )));
    }
    let data_cov = cfg.data_cov();
    let aug = cfg.augmentation().map_err(|e| Error::Precondition(e.to_string()))?;
    let (encoder, trace) = train_toy(&data_cov, &cfg.initial_encoder(), &aug, &cfg.train)?;
    let model = GaussianModelConfig::new(cfg.train.sigma_sq, cfg.train.lipschitz, cfg.d_out)?;
    let evaluation = evaluate_encoder(
        &encoder,
        &data_cov,
        cfg.noise_var,
        &model,
        cfg.eval_n,
        cfg.epsilon,
        derive_seed(cfg.train.seed, 4),
    )?;

    let mut r = ValidationResult::new("theorem2_optimal_efficiency", cfg.params());
    r.check("eta_shortfall", 1.0 - evaluation.report.eta, 0.0)
        .check("offdiag_mass", evaluation.offdiag_mass(), OFFDIAG_MASS_THRESHOLD)
        .check("diag_gap", evaluation.diag_gap, DIAG_GAP_THRESHOLD)
        .observe("eta", evaluation.report.eta)
        .observe("d_eff", evaluation.report.d_eff as f64)
        .observe("fim_condition_number", evaluation.report.condition_number.value())
        .observe("encoder_operator_norm", encoder.operator_norm()?);
    if let Some(last) = trace.last() {
        r.observe("final_train_loss", last.total)
            .observe("final_train_offdiag_mass", last.offdiag_mass)
            .observe("final_train_diag_gap", last.diag_gap);
    }
    Ok(Theorem2Run {
        result: r.finish(),
        encoder,
        trace,
        evaluation,
    })
}

pub fn validate_theorem2(cfg: &Theorem2Config) -> Result<ValidationResult> {
    run_theorem2(cfg).map(|run| run.result)
}

/// Checks the covariance-to-FIM map on every `(ν profile, σ², L)` pair:
/// order preservation, the `1/σ²` ceiling, and whether `η` from the
/// mapped spectrum matches `η` from `ν` exactly when the cut agrees.
pub fn sweep_spectrum_map(
    profiles: &[Vec<f64>],
    models: &[(f64, f64)],
    epsilon: f64,
) -> Result<Vec<ValidationResult>> {
    if profiles.is_empty() || models.is_empty() {
        return Err(Error::Precondition("spectrum sweep needs non-empty grids".into()));
    }
    let mut out = Vec::with_capacity(profiles.len() * models.len());
    for nu in profiles {
        if nu.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("ν profiles must be sorted descending".into()));
        }
        for &(sigma_sq, lipschitz) in models {
            let cfg = GaussianModelConfig::new(sigma_sq, lipschitz, nu.len())?;
            let lambda = fim_spectrum_from_cov(nu, &cfg)?;
            let order_violations = lambda.windows(2).filter(|w| w[0] < w[1]).count();
            let ceiling = 1.0 / sigma_sq;
            let excess = lambda.iter().map(|l| (l - ceiling).max(0.0)).fold(0.0, f64::max);

            let mut r = ValidationResult::new(
                "prop1_spectrum_map",
                ParamRecord {
                    d: Some(nu.len()),
                    nu: Some(nu.clone()),
                    sigma_sq: Some(sigma_sq),
                    lipschitz: Some(lipschitz),
                    epsilon: Some(epsilon),
                    ..ParamRecord::default()
                },
            );
            r.check("order_violations", order_violations as f64, 0.0)
                .check("ceiling_excess", excess, 0.0);
            if nu.iter().any(|&v| v > 0.0) {
                let d_nu = fim::effective_dimension(nu, epsilon)?;
                let d_lambda = fim::effective_dimension(&lambda, epsilon)?;
                let eta_nu = d_nu as f64 / nu.len() as f64;
                let eta_lambda = d_lambda as f64 / nu.len() as f64;
                let consistent = (eta_nu == eta_lambda) == (d_nu == d_lambda);
                r.check("cut_inconsistency", if consistent { 0.0 } else { 1.0 }, 0.0)
                    .observe("eta_from_nu", eta_nu)
                    .observe("eta_from_lambda", eta_lambda);
            }
            out.push(r.finish());
        }
    }
    Ok(out)
}

/// Five `ν` profiles × twenty `(σ², L)` pairs: 100 configurations.
pub fn default_sweep_grid() -> (Vec<Vec<f64>>, Vec<(f64, f64)>) {
    let profiles = vec![
        vec![4.0, 3.0, 2.0, 1.0],
        vec![2.5; 6],
        vec![10.0, 1.0, 0.1, 0.01, 0.0],
        vec![1e3, 1e3, 1.0, 1e-3],
        vec![0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0],
    ];
    let mut models = Vec::new();
    for sigma_sq in [0.01, 0.1, 1.0, 4.0, 25.0] {
        for lipschitz in [0.1, 0.5, 1.0, 3.0] {
            models.push((sigma_sq, lipschitz));
        }
    }
    (profiles, models)
}

/// The claims `validate` can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Claim {
    Lemma1,
    Lemma3,
    Lemma4,
    Theorem1,
    Theorem2,
    Prop1,
}

impl Claim {
    pub const ALL: [Claim; 6] = [
        Claim::Lemma1,
        Claim::Lemma3,
        Claim::Lemma4,
        Claim::Theorem1,
        Claim::Theorem2,
        Claim::Prop1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::Lemma1 => "lemma1",
            Claim::Lemma3 => "lemma3",
            Claim::Lemma4 => "lemma4",
            Claim::Theorem1 => "theorem1",
            Claim::Theorem2 => "theorem2",
            Claim::Prop1 => "prop1",
        }
    }

    /// `"all"` expands to every claim.
    pub fn parse_selector(s: &str) -> Option<Vec<Claim>> {
        if s == "all" {
            return Some(Self::ALL.to_vec());
        }
        Self::ALL.iter().copied().find(|c| c.name() == s).map(|c| vec![c])
    }
}

/// Defaults for every validator, each overridable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSettings {
    pub seed: u64,
    pub sigma_sq: f64,
    pub lipschitz: f64,
    pub epsilon: f64,
    pub lemma1_dim: usize,
    pub lemma1_samples: usize,
    pub lemma3_nu: Vec<f64>,
    pub lemma3_noise_var: f64,
    pub lemma3_samples: usize,
    pub lemma4_nu: f64,
    pub lemma4_noise_var: f64,
    pub lemma4_dim: usize,
    pub lemma4_delta: f64,
    pub theorem1_gamma: f64,
    pub theorem1_dim: usize,
    pub theorem1_noise_var: f64,
    pub theorem2: Theorem2Config,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            seed: 0,
            sigma_sq: 1.0,
            lipschitz: 1.0,
            epsilon: fim::DEFAULT_EPSILON,
            lemma1_dim: 4,
            lemma1_samples: 100_000,
            lemma3_nu: vec![2.0, 1.0],
            lemma3_noise_var: 1.0,
            lemma3_samples: 100_000,
            lemma4_nu: 1.0,
            lemma4_noise_var: 1.0,
            lemma4_dim: 3,
            lemma4_delta: DEFAULT_LEMMA4_DELTA,
            theorem1_gamma: 3.0,
            theorem1_dim: 16,
            theorem1_noise_var: 1.0,
            theorem2: Theorem2Config::default(),
        }
    }
}

/// Runs one claim. `prop1` yields one entry per grid point.
pub fn run_claim(claim: Claim, s: &ValidationSettings) -> Result<Vec<ValidationResult>> {
    let model = |dim| GaussianModelConfig::new(s.sigma_sq, s.lipschitz, dim);
    match claim {
        Claim::Lemma1 => Ok(vec![validate_lemma1(
            &model(s.lemma1_dim)?,
            s.lemma1_samples,
            derive_seed(s.seed, 100),
        )?]),
        Claim::Lemma3 => {
            let spec = SyntheticSpec::new(s.lemma3_nu.clone(), None, s.lemma3_samples)?;
            Ok(vec![validate_lemma3(&spec, s.lemma3_noise_var, derive_seed(s.seed, 101))?])
        }
        Claim::Lemma4 => Ok(vec![validate_lemma4(
            s.lemma4_nu,
            s.lemma4_noise_var,
            s.lemma4_dim,
            s.lemma4_delta,
        )?]),
        Claim::Theorem1 => {
            let spec = SyntheticSpec::new(
                vec![s.theorem1_gamma; s.theorem1_dim],
                Some(derive_seed(s.seed, 102)),
                2,
            )?;
            Ok(vec![validate_theorem1(
                &spec,
                &model(s.theorem1_dim)?,
                s.theorem1_noise_var,
            )?])
        }
        Claim::Theorem2 => Ok(vec![validate_theorem2(&s.theorem2)?]),
        Claim::Prop1 => {
            let (profiles, models) = default_sweep_grid();
            sweep_spectrum_map(&profiles, &models, s.epsilon)
        }
    }
}

/// Runs claims concurrently, one thread each; output order follows `claims`.
/// Every validator owns its generator, so results match a serial run.
pub fn run_claims(claims: &[Claim], s: &ValidationSettings) -> Vec<(Claim, Result<Vec<ValidationResult>>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = claims
            .iter()
            .map(|&c| (c, scope.spawn(move || run_claim(c, s))))
            .collect();
        handles
            .into_iter()
            .map(|(c, h)| (c, h.join().expect("validator thread panicked")))
            .collect()
    })
}

pub fn run_claims_serial(claims: &[Claim], s: &ValidationSettings) -> Vec<(Claim, Result<Vec<ValidationResult>>)> {
    claims.iter().map(|&c| (c, run_claim(c, s))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lemma1_default_passes() {
        let cfg = GaussianModelConfig::new(1.0, 1.0, 4).unwrap();
        let r = validate_lemma1(&cfg, 100_000, 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.measured["max_entry_deviation"] < 0.016);
    }

    #[test]
    fn lemma1_scaled_variance() {
        let cfg = GaussianModelConfig::new(4.0, 1.0, 2).unwrap();
        let r = validate_lemma1(&cfg, 50_000, 2).unwrap();
        assert!(r.passed);
        assert!((r.observed["mean_estimated_diagonal"] - 0.25).abs() < 0.01);
    }

    #[test]
    fn lemma1_rejects_small_sample() {
        let cfg = GaussianModelConfig::new(1.0, 1.0, 2).unwrap();
        assert!(matches!(validate_lemma1(&cfg, 1000, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn lemma3_diagonal_case() {
        let spec = SyntheticSpec::new(vec![2.0, 1.0], None, 100_000).unwrap();
        let r = validate_lemma3(&spec, 1.0, 5).unwrap();
        assert!(r.passed, "{r:?}");
        assert_relative_eq!(r.observed["population_c00"], 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.observed["population_c11"], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn lemma3_high_snr_and_noise_dominated() {
        let spec = SyntheticSpec::new(vec![100.0, 100.0], Some(3), 20_000).unwrap();
        let r = validate_lemma3(&spec, 1.0, 6).unwrap();
        assert!(r.passed);
        assert!((r.observed["population_c00"] - 100.0 / 101.0).abs() < 1e-12);

        let spec = SyntheticSpec::new(vec![1.0, 0.5], None, 20_000).unwrap();
        let r = validate_lemma3(&spec, 1e6, 7).unwrap();
        assert!(r.passed);
        assert!(r.observed["population_c00"] < 1e-5);
    }

    #[test]
    fn lemma3_rejects_small_sample() {
        let spec = SyntheticSpec::new(vec![1.0], None, 100).unwrap();
        assert!(matches!(validate_lemma3(&spec, 1.0, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn lemma3_deviation_shrinks_with_sample_size() {
        // averaged over seeds to tame single-run noise
        let mean_dev = |n: usize| {
            (0..8)
                .map(|seed| {
                    let spec = SyntheticSpec::new(vec![2.0, 1.0], Some(9), n).unwrap();
                    validate_lemma3(&spec, 1.0, seed).unwrap().measured["max_entry_deviation"]
                })
                .sum::<f64>()
                / 8.0
        };
        let ratio = mean_dev(10_000) / mean_dev(40_000);
        assert!(ratio > 1.0 && ratio < 4.0, "ratio {ratio}");
    }

    #[test]
    fn lemma4_examples() {
        let r = validate_lemma4(1.0, 1.0, 3, 0.01).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.observed["c_diagonal"], 0.5);
        assert_relative_eq!(r.observed["implied_nu_lower_bound"], 99.0, max_relative = 1e-12);

        let r = validate_lemma4(2.5, 0.0, 4, 0.01).unwrap();
        assert!(r.passed);
        assert_eq!(r.observed["c_diagonal"], 1.0);
    }

    #[test]
    fn theorem1_examples() {
        let cfg = GaussianModelConfig::new(1.0, 1.0, 16).unwrap();
        let spec = SyntheticSpec::new(vec![3.0; 16], Some(4), 2).unwrap();
        let r = validate_theorem1(&spec, &cfg, 1.0).unwrap();
        assert!(r.passed, "{r:?}");
        assert_relative_eq!(r.observed["fim_eigenvalue"], 0.75, max_relative = 1e-12);

        let zero = SyntheticSpec::new(vec![0.0; 3], None, 2).unwrap();
        assert!(matches!(
            validate_theorem1(&zero, &cfg, 1.0),
            Err(Error::DegenerateSpectrum(_))
        ));
        let unequal = SyntheticSpec::new(vec![1.0, 2.0], None, 2).unwrap();
        assert!(matches!(
            validate_theorem1(&unequal, &cfg, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sweep_example_profile() {
        let results = sweep_spectrum_map(&[vec![4.0, 3.0, 2.0, 1.0]], &[(1.0, 1.0)], 0.05).unwrap();
        assert_eq!(results.len(), 1);
        assert!(results[0].passed);
        let nu = [4.0, 3.0, 2.0, 1.0];
        let cfg = GaussianModelConfig::new(1.0, 1.0, 4).unwrap();
        let lambda = fim_spectrum_from_cov(&nu, &cfg).unwrap();
        for (l, want) in lambda.iter().zip([0.8, 0.75, 2.0 / 3.0, 0.5]) {
            assert_relative_eq!(*l, want, max_relative = 1e-15);
        }
    }

    #[test]
    fn sweep_equal_profile_gives_unit_efficiency() {
        let results = sweep_spectrum_map(&[vec![1.5; 5]], &[(0.3, 2.0), (5.0, 0.1)], 0.1).unwrap();
        for r in results {
            assert_eq!(r.observed["eta_from_nu"], 1.0);
            assert_eq!(r.observed["eta_from_lambda"], 1.0);
        }
    }

    #[test]
    fn sweep_zero_eigenvalue_maps_to_zero() {
        let cfg = GaussianModelConfig::new(2.0, 1.5, 3).unwrap();
        let lambda = fim_spectrum_from_cov(&[3.0, 1.0, 0.0], &cfg).unwrap();
        assert_eq!(lambda[2], 0.0);
        assert!(sweep_spectrum_map(&[], &[(1.0, 1.0)], 0.1).is_err());
    }

    #[test]
    fn default_grid_has_one_hundred_points_and_passes() {
        let (profiles, models) = default_sweep_grid();
        let results = sweep_spectrum_map(&profiles, &models, 0.05).unwrap();
        assert_eq!(results.len(), 100);
        assert!(results.iter().all(|r| r.passed));
    }

    #[test]
    fn synthetic_examples() {
        let spec = SyntheticSpec::new(vec![1.0, 1.0], Some(1), 100_000).unwrap();
        let batch = generate_synthetic(&spec, 2);
        let cov = spectral::covariance(&batch, false);
        assert!(cov.as_matrix().sub(&Matrix::identity(2)).max_abs() < clt_tolerance(100_000));
        assert_eq!(generate_synthetic(&spec, 2), batch);

        let zero = SyntheticSpec::new(vec![0.0, 0.0], Some(1), 10).unwrap();
        assert_eq!(generate_synthetic(&zero, 3).matrix(), &Matrix::zeros(10, 2));
    }

    #[test]
    fn synthetic_rotated_covariance_matches_target() {
        let spec = SyntheticSpec::new(vec![3.0, 1.0, 0.5], Some(8), 200_000).unwrap();
        let cov = spectral::covariance(&generate_synthetic(&spec, 4), false);
        let dev = cov.as_matrix().sub(spec.covariance().as_matrix()).max_abs();
        assert!(dev < 3.0 * clt_tolerance(200_000), "dev {dev}");
    }

    #[test]
    fn rank_one_encoder_collapses_to_one_dimension() {
        let enc = LinearEncoder::rank_one(8, 4, 5);
        let model = GaussianModelConfig::new(1.0, 1.0, 4).unwrap();
        let eval = evaluate_encoder(&enc, &SymMatrix::identity(8), 0.1, &model, 4096, 0.05, 1).unwrap();
        assert_eq!(eval.report.d_eff, 1);
        assert_eq!(eval.report.eta, 0.25);
    }

    #[test]
    fn validation_result_pass_rule() {
        let mut r = ValidationResult::new("x", ParamRecord::default());
        r.check("a", 0.1, 0.2).check("b", 0.3, 0.3);
        assert!(r.clone().finish().passed);
        r.check("c", f64::NAN, 1.0);
        assert!(!r.finish().passed);
    }

    #[test]
    fn claim_selector_parsing() {
        assert_eq!(Claim::parse_selector("all").unwrap().len(), 6);
        assert_eq!(Claim::parse_selector("prop1"), Some(vec![Claim::Prop1]));
        assert!(Claim::parse_selector("lemma2").is_none());
    }

    #[test]
    fn parallel_and_serial_runs_agree() {
        let claims = [Claim::Lemma1, Claim::Lemma3, Claim::Lemma4, Claim::Theorem1, Claim::Prop1];
        let s = ValidationSettings {
            lemma1_samples: 20_000,
            lemma3_samples: 20_000,
            ..ValidationSettings::default()
        };
        let par: Vec<_> = run_claims(&claims, &s).into_iter().map(|(c, r)| (c, r.unwrap())).collect();
        let ser: Vec<_> = run_claims_serial(&claims, &s).into_iter().map(|(c, r)| (c, r.unwrap())).collect();
        assert_eq!(par, ser);
    }
}
