//! The `analyze`, `train`, `validate` and `loss` commands.
//!
//! Each command returns an [`Outcome`]: the report document, the process
//! exit status, and any side artifact. Errors that prevent a report from
//! being produced are returned as [`Error`]; [`ExitStatus::for_error`] maps
//! them onto the exit-status contract.

use std::path::{Path, PathBuf};

use crate::barlow::{bt_loss, cross_correlation, population_cross_correlation};
use crate::error::{Error, Result};
use crate::fim::{build_report, GaussianModelConfig, RANK_TOLERANCE};
use crate::io::{read_embeddings, EmbeddingFormat};
use crate::lab::{run_claims, run_theorem2, Claim, Theorem2Config, ValidationResult, ValidationSettings};
use crate::report::{CollapseDiagnosis, ParamRecord, ReportDocument};
use crate::spectral::{self, Matrix, SymMatrix};

/// Loadings below this magnitude do not count a coordinate as involved in
/// a null direction.
const LOADING_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ValidationFailure = 1,
    Usage = 2,
    Input = 3,
    Divergence = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(err: &Error) -> Self {
        match err {
            Error::Precondition(_) => ExitStatus::Usage,
            Error::Divergence { .. } => ExitStatus::Divergence,
            _ => ExitStatus::Input,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ReportDocument,
    pub status: ExitStatus,
    /// Training trace CSV, produced by `train`.
    pub trace_csv: Option<String>,
}

impl Outcome {
    fn ok(report: ReportDocument) -> Self {
        Self {
            report,
            status: ExitStatus::Success,
            trace_csv: None,
        }
    }
}

fn usage(message: String) -> Error {
    Error::Precondition(message)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--epsilon must lie in (0, 1), got {epsilon}")))
    }
}

fn check_positive(flag: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{flag} must be positive and finite, got {value}")))
    }
}

fn model(sigma_sq: f64, lipschitz: f64, dim: usize) -> Result<GaussianModelConfig> {
    check_positive("--sigma-sq", sigma_sq)?;
    check_positive("--lipschitz", lipschitz)?;
    GaussianModelConfig::new(sigma_sq, lipschitz, dim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    pub format: EmbeddingFormat,
    pub epsilon: f64,
    pub sigma_sq: f64,
    pub lipschitz: f64,
    pub noise_var: Option<f64>,
    pub lambda: f64,
}

impl AnalyzeArgs {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            format: EmbeddingFormat::Csv,
            epsilon: crate::fim::DEFAULT_EPSILON,
            sigma_sq: 1.0,
            lipschitz: 1.0,
            noise_var: None,
            lambda: crate::barlow::DEFAULT_LAMBDA,
        }
    }
}

/// Covariance spectrum and efficiency of an embedding file.
///
/// A covariance with no positive eigenvalue yields a report carrying the
/// collapse diagnosis and the error, with [`ExitStatus::Input`].
pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    check_epsilon(args.epsilon)?;
    check_positive("--lambda", args.lambda)?;
    if let Some(nv) = args.noise_var {
        if !(nv >= 0.0 && nv.is_finite()) {
            return Err(usage(format!("--noise-var must be non-negative, got {nv}")));
        }
    }
    let batch = read_embeddings(&args.input, args.format)?;
    let cfg = model(args.sigma_sq, args.lipschitz, batch.d())?;
    let mut doc = ReportDocument::new(
        "analyze",
        ParamRecord {
            d: Some(batch.d()),
            n: Some(batch.n()),
            sigma_sq: Some(args.sigma_sq),
            lipschitz: Some(args.lipschitz),
            noise_var: args.noise_var,
            epsilon: Some(args.epsilon),
            lambda: args.noise_var.map(|_| args.lambda),
            input: Some(args.input.display().to_string()),
            format: Some(args.format.name().into()),
            ..ParamRecord::default()
        },
    );
    let cov = spectral::covariance(&batch, true);

    let population = match args.noise_var {
        Some(nv) => Some(population_cross_correlation(&cov, nv)?.into_matrix()),
        None => None,
    };
    match build_report(&cov, &cfg, args.epsilon, population.as_ref()) {
        Ok(report) => {
            if report.condition_number.is_infinite() {
                doc.collapse = Some(diagnose_collapse(&cov)?);
            }
            doc.efficiency = Some(report);
        }
        Err(err @ Error::DegenerateSpectrum(_)) => {
            doc.collapse = Some(diagnose_collapse(&cov)?);
            doc.error = Some(err.to_string());
            return Ok(Outcome {
                report: doc,
                status: ExitStatus::Input,
                trace_csv: None,
            });
        }
        Err(err) => return Err(err),
    }
    if let Some(c) = population {
        doc.loss = Some(bt_loss(&c, args.lambda));
        doc.population_cross_correlation = Some(c.to_rows());
    }
    Ok(Outcome::ok(doc))
}

/// Names the coordinates and directions along which `cov` has no variance.
pub fn diagnose_collapse(cov: &SymMatrix) -> Result<CollapseDiagnosis> {
    let d = cov.dim();
    let diag = cov.diag();
    let top_var = diag.iter().cloned().fold(0.0, f64::max);
    let zero_variance_dims: Vec<usize> = (0..d)
        .filter(|&i| diag[i] <= RANK_TOLERANCE * top_var)
        .collect();

    let spectrum = spectral::eigh(cov)?;
    let top = spectrum.eigenvalues[0].max(0.0);
    let null: Vec<usize> = (0..d)
        .filter(|&k| spectrum.eigenvalues[k] <= RANK_TOLERANCE * top)
        .collect();
    let null_directions: Vec<Vec<f64>> = null
        .iter()
        .map(|&k| (0..d).map(|i| spectrum.eigenvectors[(i, k)]).collect())
        .collect();
    let involved_dims: Vec<usize> = (0..d)
        .filter(|&i| null_directions.iter().any(|v| v[i].abs() > LOADING_TOLERANCE))
        .collect();

    let message = if null.len() == d {
        "representation collapsed to a point: every dimension has zero variance".to_string()
    } else {
        format!(
            "{} of {d} covariance eigenvalues are zero; zero-variance dims {:?}; null directions involve dims {:?}",
            null.len(),
            zero_variance_dims,
            involved_dims
        )
    };
    Ok(CollapseDiagnosis {
        zero_variance_dims,
        null_eigenvalues: null.len(),
        involved_dims,
        null_directions,
        message,
    })
}

/// Trains the toy encoder, evaluates it on a fresh batch and returns the
/// final report plus the trace CSV.
pub fn cmd_train(cfg: &Theorem2Config) -> Result<Outcome> {
    check_epsilon(cfg.epsilon)?;
    check_positive("--noise-var", cfg.noise_var)?;
    check_positive("--sigma-sq", cfg.train.sigma_sq)?;
    check_positive("--lipschitz", cfg.train.lipschitz)?;
    let run = run_theorem2(cfg)?;
    let mut doc = ReportDocument::new("train", cfg.params());
    doc.loss = Some(bt_loss(&run.evaluation.correlation, cfg.train.lambda));
    doc.cross_correlation = Some(run.evaluation.correlation.to_rows());
    doc.efficiency = Some(run.evaluation.report.clone());
    doc.final_step = run.trace.last().copied();
    doc.all_passed = Some(run.result.passed);
    doc.validations.push(run.result);
    Ok(Outcome {
        report: doc,
        status: ExitStatus::Success,
        trace_csv: Some(run.trace.to_csv()),
    })
}

/// Flag overrides applied on top of [`ValidationSettings::default`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidateOverrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub dim: Option<usize>,
    pub gamma: Option<f64>,
    pub noise_var: Option<f64>,
    pub sigma_sq: Option<f64>,
    pub lipschitz: Option<f64>,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub lr: Option<f64>,
    pub steps: Option<usize>,
    pub batch_n: Option<usize>,
    pub d_in: Option<usize>,
    pub d_out: Option<usize>,
}

impl ValidateOverrides {
    pub fn apply(&self, s: &mut ValidationSettings) {
        let t2 = &mut s.theorem2;
        if let Some(seed) = self.seed {
            s.seed = seed;
            t2.train.seed = seed;
        }
        if let Some(n) = self.samples {
            s.lemma1_samples = n;
            s.lemma3_samples = n;
            t2.eval_n = n;
        }
        if let Some(d) = self.dim {
            s.lemma1_dim = d;
            s.lemma4_dim = d;
            s.theorem1_dim = d;
        }
        if let Some(g) = self.gamma {
            s.lemma4_nu = g;
            s.theorem1_gamma = g;
            t2.data_scale = g;
        }
        if let Some(nv) = self.noise_var {
            s.lemma3_noise_var = nv;
            s.lemma4_noise_var = nv;
            s.theorem1_noise_var = nv;
            t2.noise_var = nv;
        }
        if let Some(v) = self.sigma_sq {
            s.sigma_sq = v;
            t2.train.sigma_sq = v;
        }
        if let Some(v) = self.lipschitz {
            s.lipschitz = v;
            t2.train.lipschitz = v;
        }
        if let Some(e) = self.epsilon {
            s.epsilon = e;
            t2.epsilon = e;
            t2.train.report_epsilon = e;
        }
        if let Some(v) = self.lambda {
            t2.train.lambda = v;
        }
        if let Some(v) = self.lr {
            t2.train.lr = v;
        }
        if let Some(v) = self.steps {
            t2.train.steps = v;
        }
        if let Some(v) = self.batch_n {
            t2.train.batch_n = v;
        }
        if let Some(v) = self.d_in {
            t2.d_in = v;
        }
        if let Some(v) = self.d_out {
            t2.d_out = v;
        }
    }
}

/// Runs the selected validators. Status is [`ExitStatus::Divergence`] if
/// any training diverged, else [`ExitStatus::Usage`] if any precondition
/// failed, else [`ExitStatus::ValidationFailure`] if anything else failed.
pub fn cmd_validate(selector: &str, overrides: &ValidateOverrides) -> Result<Outcome> {
    let claims = Claim::parse_selector(selector).ok_or_else(|| {
        let names: Vec<&str> = Claim::ALL.iter().map(|c| c.name()).collect();
        usage(format!(
            "unknown claim {selector:?}; expected one of {}, all",
            names.join(", ")
        ))
    })?;
    let mut settings = ValidationSettings::default();
    overrides.apply(&mut settings);

    let mut doc = ReportDocument::new(
        "validate",
        ParamRecord {
            seed: Some(settings.seed),
            sigma_sq: Some(settings.sigma_sq),
            lipschitz: Some(settings.lipschitz),
            epsilon: Some(settings.epsilon),
            ..ParamRecord::default()
        },
    );
    let mut diverged = false;
    let mut precondition = false;
    for (claim, result) in run_claims(&claims, &settings) {
        match result {
            Ok(results) => doc.validations.extend(results),
            Err(err) => {
                match &err {
                    Error::Divergence { .. } => diverged = true,
                    Error::Precondition(_) | Error::InvalidInput(_) => precondition = true,
                    _ => {}
                }
                doc.validations
                    .push(ValidationResult::from_error(claim.name(), ParamRecord::default(), &err));
            }
        }
    }
    let all_passed = doc.validations.iter().all(|r| r.passed);
    doc.all_passed = Some(all_passed);
    let status = if diverged {
        ExitStatus::Divergence
    } else if precondition {
        ExitStatus::Usage
    } else if !all_passed {
        ExitStatus::ValidationFailure
    } else {
        ExitStatus::Success
    };
    Ok(Outcome {
        report: doc,
        status,
        trace_csv: None,
    })
}

/// Cross-correlation and loss between two aligned view files.
pub fn cmd_loss(a: &Path, b: &Path, format: EmbeddingFormat, lambda: f64) -> Result<Outcome> {
    check_positive("--lambda", lambda)?;
    let za = read_embeddings(a, format)?;
    let zb = read_embeddings(b, format)?;
    if (za.n(), za.d()) != (zb.n(), zb.d()) {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {} is {}x{}, {} is {}x{}",
            a.display(),
            za.n(),
            za.d(),
            b.display(),
            zb.n(),
            zb.d()
        )));
    }
    let c: Matrix = cross_correlation(&za, &zb)?;
    let mut doc = ReportDocument::new(
        "loss",
        ParamRecord {
            n: Some(za.n()),
            d: Some(za.d()),
            lambda: Some(lambda),
            input: Some(a.display().to_string()),
            input_b: Some(b.display().to_string()),
            format: Some(format.name().into()),
            ..ParamRecord::default()
        },
    );
    doc.loss = Some(bt_loss(&c, lambda));
    doc.cross_correlation = Some(c.to_rows());
    Ok(Outcome::ok(doc))
}
