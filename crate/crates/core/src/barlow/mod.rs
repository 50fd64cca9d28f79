//! Barlow Twins objective on two augmented views of a batch.
//!
//! The estimator centers and normalizes each column over the batch,
//! then correlates view A against view B. The loss pulls the diagonal of
//! that matrix to one and the off-diagonal entries to zero.

mod train;

pub use train::{train_toy, DivergenceGuard, LinearEncoder, TraceRecord, TrainConfig, TrainingTrace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, View};
use crate::rng::{self, SimRng};
use crate::spectral::{self, offdiag_mass, EmbeddingBatch, Matrix, SymMatrix};

pub const DEFAULT_LAMBDA: f64 = 0.005;

/// Batch standard deviation at or below which a column is degenerate.
pub const MIN_COLUMN_STD: f64 = 1e-12;

/// Isotropic Gaussian noise added in representation space,
/// `z_B = z_A + ε` with `ε ~ N(0, noise_var · I)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationModel {
    pub noise_var: f64,
    pub seed: u64,
}

impl AugmentationModel {
    pub fn new(noise_var: f64, seed: u64) -> Result<Self> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "augmentation noise variance must be positive, got {noise_var}"
            )));
        }
        Ok(Self { noise_var, seed })
    }

    /// Generator for this model's noise stream.
    pub fn rng(&self) -> SimRng {
        rng::seeded(self.seed)
    }

    /// `(Z_A, Z_B)` using a fresh stream seeded from `self.seed`.
    pub fn augment_pair(&self, z: &EmbeddingBatch) -> (EmbeddingBatch, EmbeddingBatch) {
        self.augment_pair_with(z, &mut self.rng())
    }

    /// `(Z_A, Z_B)` drawing noise rows from `rng` in row-major order.
    pub fn augment_pair_with(
        &self,
        z: &EmbeddingBatch,
        rng: &mut SimRng,
    ) -> (EmbeddingBatch, EmbeddingBatch) {
        let std = self.noise_var.sqrt();
        let noise = rng::gaussian_matrix(rng, z.n(), z.d(), std);
        let zb = z.matrix().add(&noise);
        let zb = EmbeddingBatch::new(zb).expect("adding finite noise keeps the batch valid");
        (z.clone(), zb)
    }
}

/// Terms of the Barlow Twins loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BtLossBreakdown {
    /// `Σ_i (1 − C_ii)²`
    pub invariance: f64,
    /// `Σ_{i≠j} C_ij²`
    pub redundancy: f64,
    pub lambda: f64,
    /// `invariance + lambda · redundancy`
    pub total: f64,
}

/// Column-centered, column-normalized view: `Â_{·i} = a_{·i} / ‖a_{·i}‖`.
struct NormalizedView {
    unit: Matrix,
    norms: Vec<f64>,
}

fn normalize_columns(z: &EmbeddingBatch, view: View) -> Result<NormalizedView> {
    let mut unit = z.centered();
    let n = unit.rows();
    let d = unit.cols();
    let mut norms = vec![0.0; d];
    for b in 0..n {
        for (s, v) in norms.iter_mut().zip(unit.row(b)) {
            *s += v * v;
        }
    }
    for (dim, s) in norms.iter_mut().enumerate() {
        *s = s.sqrt();
        if *s / (n as f64).sqrt() <= MIN_COLUMN_STD {
            return Err(Error::DegenerateColumn { view, dim });
        }
    }
    for b in 0..n {
        for (v, s) in unit.row_mut(b).iter_mut().zip(&norms) {
            *v /= s;
        }
    }
    Ok(NormalizedView { unit, norms })
}

fn check_pair(za: &EmbeddingBatch, zb: &EmbeddingBatch) -> Result<()> {
    if za.n() != zb.n() || za.d() != zb.d() {
        return Err(Error::InvalidInput(format!(
            "view shapes differ: A is {}x{}, B is {}x{}",
            za.n(),
            za.d(),
            zb.n(),
            zb.d()
        )));
    }
    Ok(())
}

/// Batch cross-correlation of two views:
/// `C_ij = Σ_b a_bi b_bj / (‖a_{·i}‖ ‖b_{·j}‖)` on mean-centered columns.
///
/// Not symmetric in general. Fails on a zero-variance column, naming the
/// view and dimension.
pub fn cross_correlation(za: &EmbeddingBatch, zb: &EmbeddingBatch) -> Result<Matrix> {
    check_pair(za, zb)?;
    let a = normalize_columns(za, View::A)?;
    let b = normalize_columns(zb, View::B)?;
    Ok(a.unit.t_matmul(&b.unit))
}

/// Population cross-correlation under the whitening convention
/// `C = (Σ_z + σ_ε² I)^{-1/2} Σ_z (Σ_z + σ_ε² I)^{-1/2}`.
///
/// `noise_var = 0` is accepted as the noiseless limit.
pub fn population_cross_correlation(cov_z: &SymMatrix, noise_var: f64) -> Result<SymMatrix> {
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise variance must be non-negative, got {noise_var}"
        )));
    }
    let spectrum = spectral::eigh(cov_z)?;
    spectral::check_psd(&spectrum, cov_z.frobenius_norm())?;
    let whitener = spectral::inv_sqrt_default(&cov_z.add_diagonal(noise_var))?;
    let w = whitener.as_matrix();
    Ok(SymMatrix::symmetrize(&w.matmul(cov_z.as_matrix()).matmul(w)))
}

/// Invariance and redundancy terms of a square correlation matrix.
///
/// Panics if `c` is not square.
pub fn bt_loss(c: &Matrix, lambda: f64) -> BtLossBreakdown {
    assert!(c.is_square(), "correlation matrix must be square, got {:?}", c.shape());
    let invariance = (0..c.rows()).map(|i| (1.0 - c[(i, i)]).powi(2)).sum();
    let redundancy = offdiag_mass(c);
    BtLossBreakdown {
        invariance,
        redundancy,
        lambda,
        total: invariance + lambda * redundancy,
    }
}

/// `∂L/∂C`: `−2(1 − C_ii)` on the diagonal, `2λ C_ij` elsewhere.
pub fn bt_loss_grad_wrt_c(c: &Matrix, lambda: f64) -> Matrix {
    assert!(c.is_square(), "correlation matrix must be square, got {:?}", c.shape());
    Matrix::from_fn(c.rows(), c.cols(), |i, j| {
        if i == j {
            -2.0 * (1.0 - c[(i, i)])
        } else {
            2.0 * lambda * c[(i, j)]
        }
    })
}

/// Loss, correlation matrix and gradients with respect to both raw views.
#[derive(Debug, Clone)]
pub struct LossWithGrads {
    pub loss: BtLossBreakdown,
    pub correlation: Matrix,
    pub grad_a: Matrix,
    pub grad_b: Matrix,
}

/// Forward and backward pass through centering, normalization,
/// correlation and the loss.
pub fn bt_loss_and_grads(
    za: &EmbeddingBatch,
    zb: &EmbeddingBatch,
    lambda: f64,
) -> Result<LossWithGrads> {
    check_pair(za, zb)?;
    let a = normalize_columns(za, View::A)?;
    let b = normalize_columns(zb, View::B)?;
    let c = a.unit.t_matmul(&b.unit);
    let loss = bt_loss(&c, lambda);
    let g = bt_loss_grad_wrt_c(&c, lambda);

    // C = Âᵀ B̂  ⇒  ∂L/∂Â = B̂ Gᵀ,  ∂L/∂B̂ = Â G
    let grad_a_unit = b.unit.matmul(&g.transpose());
    let grad_b_unit = a.unit.matmul(&g);
    Ok(LossWithGrads {
        loss,
        correlation: c,
        grad_a: backprop_normalization(&a, &grad_a_unit),
        grad_b: backprop_normalization(&b, &grad_b_unit),
    })
}

/// `∂L/∂z` from `∂L/∂Â`: project out the radial part of each unit
/// column, divide by its norm, then remove the batch mean.
fn backprop_normalization(view: &NormalizedView, grad_unit: &Matrix) -> Matrix {
    let (n, d) = grad_unit.shape();
    let mut radial = vec![0.0; d];
    for r in 0..n {
        for ((acc, u), g) in radial.iter_mut().zip(view.unit.row(r)).zip(grad_unit.row(r)) {
            *acc += u * g;
        }
    }
    let mut out = Matrix::from_fn(n, d, |r, i| {
        (grad_unit[(r, i)] - view.unit[(r, i)] * radial[i]) / view.norms[i]
    });
    let mut mean = vec![0.0; d];
    for r in 0..n {
        for (m, v) in mean.iter_mut().zip(out.row(r)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    for r in 0..n {
        for (v, m) in out.row_mut(r).iter_mut().zip(&mean) {
            *v -= m;
        }
    }
    out
}

/// Gradients of the total loss with respect to every entry of `Z_A`
/// and `Z_B`.
pub fn bt_loss_grad_wrt_batches(
    za: &EmbeddingBatch,
    zb: &EmbeddingBatch,
    lambda: f64,
) -> Result<(Matrix, Matrix)> {
    let out = bt_loss_and_grads(za, zb, lambda)?;
    Ok((out.grad_a, out.grad_b))
}

/// `max_i |1 − C_ii|`.
pub fn diag_gap(c: &Matrix) -> f64 {
    (0..c.rows().min(c.cols()))
        .map(|i| (1.0 - c[(i, i)]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn sign_pattern() -> EmbeddingBatch {
        EmbeddingBatch::from_rows(&[
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap()
    }

    fn random_batch(rng: &mut SimRng, n: usize, d: usize) -> EmbeddingBatch {
        EmbeddingBatch::new(rng::gaussian_matrix(rng, n, d, 1.0)).unwrap()
    }

    fn total_loss(za: &Matrix, zb: &Matrix, lambda: f64) -> f64 {
        let za = EmbeddingBatch::new(za.clone()).unwrap();
        let zb = EmbeddingBatch::new(zb.clone()).unwrap();
        bt_loss(&cross_correlation(&za, &zb).unwrap(), lambda).total
    }

    /// Central differences of the total loss, one entry at a time.
    fn finite_difference_grads(za: &Matrix, zb: &Matrix, lambda: f64, h: f64) -> (Matrix, Matrix) {
        let fd = |which: usize| {
            let base = if which == 0 { za } else { zb };
            Matrix::from_fn(base.rows(), base.cols(), |r, c| {
                let mut plus = base.clone();
                let mut minus = base.clone();
                plus[(r, c)] += h;
                minus[(r, c)] -= h;
                let (fp, fm) = if which == 0 {
                    (total_loss(&plus, zb, lambda), total_loss(&minus, zb, lambda))
                } else {
                    (total_loss(za, &plus, lambda), total_loss(za, &minus, lambda))
                };
                (fp - fm) / (2.0 * h)
            })
        };
        (fd(0), fd(1))
    }

    fn assert_grads_close(analytic: &Matrix, numeric: &Matrix) {
        for (g, f) in analytic.as_slice().iter().zip(numeric.as_slice()) {
            let tol = 1e-6f64.max(1e-4 * g.abs());
            assert!((g - f).abs() <= tol, "analytic {g} vs numeric {f}");
        }
    }

    #[test]
    fn augmentation_rejects_non_positive_noise() {
        assert!(AugmentationModel::new(0.0, 1).is_err());
        assert!(AugmentationModel::new(-1.0, 1).is_err());
    }

    #[test]
    fn augmentation_zero_noise_limit() {
        let z = EmbeddingBatch::from_rows(&[vec![1.5, -2.0], vec![0.75, 3.0]]).unwrap();
        let (za, zb) = AugmentationModel::new(1e-60, 3).unwrap().augment_pair(&z);
        assert_eq!(za, z);
        assert_eq!(zb, z);
    }

    #[test]
    fn augmentation_is_deterministic() {
        let z = sign_pattern();
        let aug = AugmentationModel::new(0.3, 99).unwrap();
        assert_eq!(aug.augment_pair(&z), aug.augment_pair(&z));
        let other = AugmentationModel::new(0.3, 100).unwrap();
        assert_ne!(aug.augment_pair(&z).1, other.augment_pair(&z).1);
    }

    #[test]
    fn augmentation_noise_covariance_monte_carlo() {
        let n = 100_000;
        let z = EmbeddingBatch::new(Matrix::zeros(n, 3)).unwrap();
        let aug = AugmentationModel::new(0.4, 8).unwrap();
        let (za, zb) = aug.augment_pair(&z);
        let diff = EmbeddingBatch::new(zb.matrix().sub(za.matrix())).unwrap();
        let cov = spectral::covariance(&diff, false);
        let expected = SymMatrix::scaled_identity(3, 0.4);
        let dev = cov.as_matrix().sub(expected.as_matrix()).max_abs();
        assert!(dev < 5.0 / (n as f64).sqrt(), "dev {dev}");
    }

    #[test]
    fn self_correlation_has_unit_diagonal() {
        let mut rng = rng::seeded(1);
        let z = random_batch(&mut rng, 64, 5);
        let c = cross_correlation(&z, &z).unwrap();
        for i in 0..5 {
            assert_relative_eq!(c[(i, i)], 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sign_pattern_correlation_is_identity() {
        let z = sign_pattern();
        assert_eq!(cross_correlation(&z, &z).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn correlation_converges_to_eq4_population_limit() {
        let n = 200_000;
        let nu: [f64; 3] = [4.0, 1.0, 0.25];
        let noise_var = 0.5;
        let mut rng = rng::seeded(12);
        let z = Matrix::from_fn(n, 3, |_, j| nu[j].sqrt() * rng::standard_normal(&mut rng));
        let z = EmbeddingBatch::new(z).unwrap();
        let (za, zb) = AugmentationModel::new(noise_var, 13).unwrap().augment_pair(&z);
        let c = cross_correlation(&za, &zb).unwrap();
        for (i, v) in nu.iter().enumerate() {
            let expected = (v / (v + noise_var)).sqrt();
            assert!((c[(i, i)] - expected).abs() < 3.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn degenerate_column_is_named() {
        let za = EmbeddingBatch::from_rows(&[vec![1.0, 2.0], vec![3.0, 2.0], vec![0.0, 2.0]]).unwrap();
        let zb = EmbeddingBatch::from_rows(&[vec![1.0, 2.0], vec![3.0, 5.0], vec![0.0, 1.0]]).unwrap();
        match cross_correlation(&za, &zb) {
            Err(Error::DegenerateColumn { view: View::A, dim: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match cross_correlation(&zb, &za) {
            Err(Error::DegenerateColumn { view: View::B, dim: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = sign_pattern();
        let b = EmbeddingBatch::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cross_correlation(&a, &b), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn population_correlation_diagonal_case() {
        let nu = [3.0, 1.0, 0.0, 0.25];
        let c = population_cross_correlation(&SymMatrix::diagonal(&nu), 0.5).unwrap();
        for (i, v) in nu.iter().enumerate() {
            assert_relative_eq!(c.get(i, i), v / (v + 0.5), max_relative = 1e-14, epsilon = 1e-300);
        }
        assert_eq!(c.offdiag_mass(), 0.0);
    }

    #[test]
    fn population_correlation_high_snr_is_near_identity() {
        let gamma = 1e4;
        let c = population_cross_correlation(&SymMatrix::scaled_identity(3, gamma), 1.0).unwrap();
        for i in 0..3 {
            assert_relative_eq!(c.get(i, i), gamma / (gamma + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn population_correlation_zero_cov() {
        let c = population_cross_correlation(&SymMatrix::zeros(3), 2.0).unwrap();
        assert_eq!(c, SymMatrix::zeros(3));
    }

    #[test]
    fn population_correlation_isotropic_spectrum() {
        let q = rng::random_orthogonal(5, 4);
        let cov = SymMatrix::scaled_identity(5, 2.0).conjugate(&q);
        let c = population_cross_correlation(&cov, 0.5).unwrap();
        let eig = spectral::eigh(&c).unwrap().eigenvalues;
        for e in eig {
            assert_relative_eq!(e, 0.8, max_relative = 1e-12);
        }
    }

    #[test]
    fn population_correlation_rejects_indefinite() {
        let cov = SymMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            population_cross_correlation(&cov, 0.1),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn loss_examples() {
        for lambda in [0.005, 1.0, 50.0] {
            assert_eq!(bt_loss(&Matrix::identity(4), lambda).total, 0.0);
        }
        let zero = bt_loss(&Matrix::zeros(3, 3), 5.0);
        assert_eq!((zero.invariance, zero.redundancy, zero.total), (3.0, 0.0, 3.0));
        let c = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let l = bt_loss(&c, 2.0);
        assert_eq!((l.invariance, l.redundancy, l.total), (0.0, 0.5, 1.0));
    }

    #[test]
    fn grad_wrt_c_examples() {
        assert_eq!(bt_loss_grad_wrt_c(&Matrix::identity(3), 0.7), Matrix::zeros(3, 3));
        let g = bt_loss_grad_wrt_c(&Matrix::zeros(2, 2), 1.0);
        assert_eq!(g.to_rows(), vec![vec![-2.0, 0.0], vec![0.0, -2.0]]);
    }

    #[test]
    fn grad_wrt_c_matches_finite_differences() {
        let mut rng = rng::seeded(31);
        let h = 1e-5;
        for _ in 0..10 {
            let c = Matrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let lambda = rng.random_range(0.001..3.0);
            let g = bt_loss_grad_wrt_c(&c, lambda);
            let numeric = Matrix::from_fn(4, 4, |i, j| {
                let mut plus = c.clone();
                let mut minus = c.clone();
                plus[(i, j)] += h;
                minus[(i, j)] -= h;
                (bt_loss(&plus, lambda).total - bt_loss(&minus, lambda).total) / (2.0 * h)
            });
            assert_grads_close(&g, &numeric);
        }
    }

    #[test]
    fn batch_grads_sign_pattern() {
        let z = sign_pattern();
        let mut rng = rng::seeded(2);
        let zb = EmbeddingBatch::new(z.matrix().add(&rng::gaussian_matrix(&mut rng, 4, 2, 0.3))).unwrap();
        for (a, b) in [(&z, &z), (&z, &zb)] {
            let (ga, gb) = bt_loss_grad_wrt_batches(a, b, 0.5).unwrap();
            let (fa, fb) = finite_difference_grads(a.matrix(), b.matrix(), 0.5, 1e-5);
            assert_grads_close(&ga, &fa);
            assert_grads_close(&gb, &fb);
        }
    }

    #[test]
    fn batch_grads_at_identity_correlation_match_directional_derivative() {
        let z = sign_pattern();
        let (ga, gb) = bt_loss_grad_wrt_batches(&z, &z, 0.005).unwrap();
        let mut rng = rng::seeded(3);
        let h = 1e-5;
        for _ in 0..5 {
            let da = rng::gaussian_matrix(&mut rng, 4, 2, 1.0);
            let db = rng::gaussian_matrix(&mut rng, 4, 2, 1.0);
            let analytic: f64 = ga.as_slice().iter().zip(da.as_slice()).map(|(g, d)| g * d).sum::<f64>()
                + gb.as_slice().iter().zip(db.as_slice()).map(|(g, d)| g * d).sum::<f64>();
            let plus = total_loss(&z.matrix().add(&da.scale(h)), &z.matrix().add(&db.scale(h)), 0.005);
            let minus = total_loss(&z.matrix().sub(&da.scale(h)), &z.matrix().sub(&db.scale(h)), 0.005);
            let numeric = (plus - minus) / (2.0 * h);
            assert!((analytic - numeric).abs() <= 1e-6f64.max(1e-6 * analytic.abs()));
        }
    }

    #[test]
    fn column_scale_direction_has_zero_gradient() {
        let mut rng = rng::seeded(4);
        let za = random_batch(&mut rng, 16, 3);
        let zb = random_batch(&mut rng, 16, 3);
        let (ga, _) = bt_loss_grad_wrt_batches(&za, &zb, 0.3).unwrap();
        // d/ds L(za with column 1 scaled by s) at s = 1 is Σ_b ga[b,1]·za[b,1]
        let analytic: f64 = (0..16).map(|b| ga[(b, 1)] * za.matrix()[(b, 1)]).sum();
        assert!(analytic.abs() <= 1e-8);
        let scaled = |s: f64| {
            let mut m = za.matrix().clone();
            for b in 0..16 {
                m[(b, 1)] *= s;
            }
            total_loss(&m, zb.matrix(), 0.3)
        };
        let numeric = (scaled(1.0 + 1e-5) - scaled(1.0 - 1e-5)) / 2e-5;
        assert!(numeric.abs() <= 1e-8);
        assert_relative_eq!(scaled(2.0), scaled(1.0), max_relative = 1e-12);
    }

    #[test]
    fn diag_gap_is_max_deviation() {
        let c = Matrix::from_rows(&[vec![0.9, 0.2], vec![0.1, 1.05]]).unwrap();
        assert_relative_eq!(diag_gap(&c), 0.1, epsilon = 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn correlation_invariant_under_positive_affine_maps(seed in any::<u64>()) {
            let mut rng = rng::seeded(seed);
            let za = random_batch(&mut rng, 12, 3);
            let zb = random_batch(&mut rng, 12, 3);
            let base = cross_correlation(&za, &zb).unwrap();
            let affine = |m: &Matrix, rng: &mut SimRng| {
                let scale: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..10.0)).collect();
                let shift: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
                EmbeddingBatch::new(Matrix::from_fn(m.rows(), 3, |b, i| scale[i] * m[(b, i)] + shift[i])).unwrap()
            };
            let ta = affine(za.matrix(), &mut rng);
            let tb = affine(zb.matrix(), &mut rng);
            let moved = cross_correlation(&ta, &tb).unwrap();
            prop_assert!(moved.sub(&base).max_abs() <= 1e-12);
        }

        #[test]
        fn correlation_entries_bounded(seed in any::<u64>()) {
            let mut rng = rng::seeded(seed);
            let za = random_batch(&mut rng, 6, 4);
            let zb = random_batch(&mut rng, 6, 4);
            let c = cross_correlation(&za, &zb).unwrap();
            prop_assert!(c.as_slice().iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }

        #[test]
        fn loss_positive_away_from_identity(
            seed in any::<u64>(),
            d in 1usize..6,
            lambda in 1e-3f64..10.0,
        ) {
            let mut rng = rng::seeded(seed);
            let mut c = Matrix::identity(d);
            let i = rng.random_range(0..d);
            let j = rng.random_range(0..d);
            c[(i, j)] += rng.random_range(1e-3..1.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let l = bt_loss(&c, lambda);
            prop_assert!(l.total > 0.0);
            prop_assert!(l.invariance >= 0.0 && l.redundancy >= 0.0);
            prop_assert_eq!(l.total, l.invariance + lambda * l.redundancy);
        }
    }
}
