use serde::{Deserialize, Serialize};

use super::{bt_loss_and_grads, diag_gap, AugmentationModel, DEFAULT_LAMBDA};
use crate::error::{Error, Result};
use crate::fim::{self, GaussianModelConfig, DEFAULT_EPSILON};
use crate::rng::{self, GaussianSampler};
use crate::spectral::{self, offdiag_mass, EmbeddingBatch, Matrix, SymMatrix};

/// Loss ratio to the first step that counts towards divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// Consecutive over-threshold steps that abort training.
pub const DIVERGENCE_PATIENCE: usize = 100;

/// Affine encoder `z = W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEncoder {
    weights: Matrix,
    bias: Vec<f64>,
}

impl LinearEncoder {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.rows() == 0 || weights.cols() == 0 {
            return Err(Error::InvalidInput("encoder weights must be non-empty".into()));
        }
        if bias.len() != weights.rows() {
            return Err(Error::InvalidInput(format!(
                "bias has {} entries, expected {}",
                bias.len(),
                weights.rows()
            )));
        }
        if let Some((row, col)) = weights.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("encoder bias must be finite".into()));
        }
        Ok(Self { weights, bias })
    }

    pub fn zeros(d_in: usize, d_out: usize) -> Self {
        Self::new(Matrix::zeros(d_out, d_in), vec![0.0; d_out]).expect("non-empty shape")
    }

    /// Weights i.i.d. `N(0, 1/d_in)`, zero bias.
    pub fn random(d_in: usize, d_out: usize, seed: u64) -> Self {
        let mut g = rng::seeded(seed);
        let w = rng::gaussian_matrix(&mut g, d_out, d_in, (d_in as f64).sqrt().recip());
        Self::new(w, vec![0.0; d_out]).expect("finite random weights")
    }

    /// Rank-one weights `u vᵀ` with random unit `u`, `v`: every output is
    /// a multiple of the same projection.
    pub fn rank_one(d_in: usize, d_out: usize, seed: u64) -> Self {
        let mut g = rng::seeded(seed);
        let mut u: Vec<f64> = (0..d_out).map(|_| rng::standard_normal(&mut g)).collect();
        let mut v: Vec<f64> = (0..d_in).map(|_| rng::standard_normal(&mut g)).collect();
        normalize(&mut u);
        normalize(&mut v);
        let w = Matrix::from_fn(d_out, d_in, |i, j| u[i] * v[j]);
        Self::new(w, vec![0.0; d_out]).expect("finite rank-one weights")
    }

    pub fn d_in(&self) -> usize {
        self.weights.cols()
    }

    pub fn d_out(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Rows of `x` mapped through the encoder.
    pub fn encode(&self, x: &Matrix) -> Matrix {
        let mut z = x.matmul(&self.weights.transpose());
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&self.bias) {
                *v += b;
            }
        }
        z
    }

    /// Spectral norm `‖W‖₂`, the encoder's Lipschitz constant.
    pub fn operator_norm(&self) -> Result<f64> {
        let gram = SymMatrix::symmetrize(&self.weights.matmul(&self.weights.transpose()));
        let top = spectral::eigh(&gram)?.eigenvalues[0];
        Ok(top.max(0.0).sqrt())
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Optimizer and reporting settings for [`train_toy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub lr: f64,
    pub steps: usize,
    pub batch_n: usize,
    pub report_epsilon: f64,
    /// Seed of the input-sampling stream.
    pub seed: u64,
    /// Gaussian model used to turn batch covariances into `η`.
    pub sigma_sq: f64,
    pub lipschitz: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            lr: 0.05,
            steps: 3000,
            batch_n: 512,
            report_epsilon: DEFAULT_EPSILON,
            seed: 0,
            sigma_sq: 1.0,
            lipschitz: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub invariance: f64,
    pub redundancy: f64,
    pub total: f64,
    pub offdiag_mass: f64,
    pub diag_gap: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub records: Vec<TraceRecord>,
}

pub const TRACE_CSV_HEADER: &str = "step,invariance,redundancy,total,offdiag_mass,diag_gap,eta";

impl TrainingTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn at_step(&self, step: usize) -> Option<&TraceRecord> {
        self.records.iter().find(|r| r.step == step)
    }

    /// CSV with a header row and reals at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.step,
                crate::report::format_real(r.invariance),
                crate::report::format_real(r.redundancy),
                crate::report::format_real(r.total),
                crate::report::format_real(r.offdiag_mass),
                crate::report::format_real(r.diag_gap),
                crate::report::format_real(r.eta),
            ));
        }
        out
    }
}

/// Gradient descent on a linear encoder under the Barlow Twins loss.
///
/// Each step samples `x ~ N(0, data_cov)`, encodes it, adds augmentation
/// noise in representation space, and descends the loss gradient chained
/// through the encoder. The trace records the loss terms, the
/// correlation's off-diagonal mass and diagonal gap, and `η` of the
/// view-A batch covariance.
pub fn train_toy(
    data_cov: &SymMatrix,
    encoder_init: &LinearEncoder,
    aug: &AugmentationModel,
    cfg: &TrainConfig,
) -> Result<(LinearEncoder, TrainingTrace)> {
    check_train_preconditions(data_cov, encoder_init, cfg)?;
    let model = GaussianModelConfig::new(cfg.sigma_sq, cfg.lipschitz, encoder_init.d_out())?;
    let sampler = GaussianSampler::new(data_cov)?;
    let mut data_rng = rng::seeded(cfg.seed);
    let mut noise_rng = aug.rng();

    let mut encoder = encoder_init.clone();
    let mut trace = TrainingTrace {
        records: Vec::with_capacity(cfg.steps),
    };
    let mut guard = DivergenceGuard::default();

    for step in 1..=cfg.steps {
        let x = sampler.sample(&mut data_rng, cfg.batch_n);
        let z = EmbeddingBatch::new(encoder.encode(&x)).map_err(|_| Error::Divergence {
            step,
            loss: f64::NAN,
            initial: guard.initial.unwrap_or(f64::NAN),
        })?;
        let (za, zb) = aug.augment_pair_with(&z, &mut noise_rng);
        let out = bt_loss_and_grads(&za, &zb, cfg.lambda)?;
        let total = out.loss.total;

        guard.observe(step, total)?;

        let cov = spectral::covariance(&za, true);
        let eta = match fim::build_report(&cov, &model, cfg.report_epsilon, None) {
            Ok(report) => report.eta,
            // representations large enough to overflow the covariance
            Err(Error::NonFinite { .. }) => {
                return Err(Error::Divergence {
                    step,
                    loss: total,
                    initial: guard.initial.unwrap_or(total),
                })
            }
            Err(e) => return Err(e),
        };
        trace.records.push(TraceRecord {
            step,
            invariance: out.loss.invariance,
            redundancy: out.loss.redundancy,
            total,
            offdiag_mass: offdiag_mass(&out.correlation),
            diag_gap: diag_gap(&out.correlation),
            eta,
        });

        // z_B = z_A + ε, so both view gradients flow into the same encoder output
        let grad_z = out.grad_a.add(&out.grad_b);
        let grad_w = grad_z.t_matmul(&x);
        let mut grad_bias = vec![0.0; encoder.d_out()];
        for r in 0..grad_z.rows() {
            for (g, v) in grad_bias.iter_mut().zip(grad_z.row(r)) {
                *g += v;
            }
        }
        for (w, g) in encoder.weights.as_mut_slice().iter_mut().zip(grad_w.as_slice()) {
            *w -= cfg.lr * g;
        }
        for (b, g) in encoder.bias.iter_mut().zip(&grad_bias) {
            *b -= cfg.lr * g;
        }
    }
    Ok((encoder, trace))
}

/// Aborts when the loss turns non-finite, or stays above
/// `DIVERGENCE_FACTOR` times the first step's loss for
/// `DIVERGENCE_PATIENCE` consecutive steps.
#[derive(Debug, Clone, Default)]
pub struct DivergenceGuard {
    initial: Option<f64>,
    over_threshold: usize,
}

impl DivergenceGuard {
    pub fn observe(&mut self, step: usize, loss: f64) -> Result<()> {
        let initial = *self.initial.get_or_insert(loss);
        let diverged = |loss| Error::Divergence { step, loss, initial };
        if !loss.is_finite() {
            return Err(diverged(loss));
        }
        if loss > DIVERGENCE_FACTOR * initial {
            self.over_threshold += 1;
            if self.over_threshold >= DIVERGENCE_PATIENCE {
                return Err(diverged(loss));
            }
        } else {
            self.over_threshold = 0;
        }
        Ok(())
    }
}

fn check_train_preconditions(
    data_cov: &SymMatrix,
    encoder: &LinearEncoder,
    cfg: &TrainConfig,
) -> Result<()> {
    if cfg.steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    if data_cov.dim() != encoder.d_in() {
        return Err(Error::Precondition(format!(
            "data covariance dimension {} does not match encoder input dimension {}",
            data_cov.dim(),
            encoder.d_in()
        )));
    }
    if cfg.batch_n < 2 * encoder.d_out() {
        return Err(Error::Precondition(format!(
            "batch size {} must be at least 2·d_out = {}",
            cfg.batch_n,
            2 * encoder.d_out()
        )));
    }
    if !(cfg.lr > 0.0 && cfg.lr.is_finite()) {
        return Err(Error::Precondition(format!("learning rate must be positive, got {}", cfg.lr)));
    }
    if !(cfg.lambda > 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::Precondition(format!("lambda must be positive, got {}", cfg.lambda)));
    }
    if !(cfg.report_epsilon > 0.0 && cfg.report_epsilon < 1.0) {
        return Err(Error::Precondition(format!(
            "report epsilon must lie in (0, 1), got {}",
            cfg.report_epsilon
        )));
    }
    Ok(())
}
