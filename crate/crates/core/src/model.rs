//! The teacher–student model `y = Θ⋆ᵀx + ε` and the MAP estimator
//! `Θ̂ = (XᵀX/n + λI)⁻¹ (XᵀY/n + λΘ₀)`.
//!
//! Matrices are row-stacked: `X` is `n×d`, `Y` is `n×q`, predictions are `XΘ`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{invalid, mismatch, Error, Result};
use crate::rng::{self, normal};
use crate::spectrum::CovarianceModel;
use crate::theory::AsymptoticRegime;

/// Relative bound on the normal-equation residual of [`MapSolver::solve`].
pub const NORMAL_EQUATION_TOL: f64 = 1e-8;

const TEST_CHUNK_ROWS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub d: usize,
    pub n: usize,
    pub q: usize,
    pub sigma2: f64,
}

impl ProblemSpec {
    pub fn new(d: usize, n: usize, q: usize, sigma2: f64) -> Result<Self> {
        if d == 0 || n == 0 || q == 0 {
            return Err(invalid!("dimensions must be positive (d = {d}, n = {n}, q = {q})"));
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(invalid!("noise variance must be finite and nonnegative, got {sigma2}"));
        }
        Ok(Self { d, n, q, sigma2 })
    }

    /// Aspect ratio `c = d/n`.
    pub fn c(&self) -> f64 {
        self.d as f64 / self.n as f64
    }

    pub fn regime(&self) -> AsymptoticRegime {
        AsymptoticRegime { c: self.c(), q: self.q, sigma2: self.sigma2 }
    }
}

/// Ground truth `Θ⋆` and prior centre `Θ₀`, both `d×q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TeacherConfig {
    theta_star: DMatrix<f64>,
    theta_0: DMatrix<f64>,
}

impl TeacherConfig {
    pub fn new(theta_star: DMatrix<f64>, theta_0: DMatrix<f64>) -> Result<Self> {
        if theta_star.shape() != theta_0.shape() {
            return Err(mismatch!(
                "teacher is {:?} but prior centre is {:?}",
                theta_star.shape(),
                theta_0.shape()
            ));
        }
        Ok(Self { theta_star, theta_0 })
    }

    /// Draw `Θ⋆` with i.i.d. standard normal entries and `Θ₀ = Θ⋆ + Δ`, where
    /// `Δ` is a Gaussian direction rescaled so that `‖Δ‖_F² = mismatch` exactly.
    pub fn draw(d: usize, q: usize, mismatch: f64, seed: u64) -> Result<Self> {
        Self::draw_scaled(d, q, 1.0, mismatch, seed)
    }

    /// As [`TeacherConfig::draw`] with `Θ⋆` entries of standard deviation
    /// `entry_std`. `entry_std = 1/√d` keeps `E‖Θ⋆‖_F² = q` as `d` varies.
    pub fn draw_scaled(d: usize, q: usize, entry_std: f64, mismatch: f64, seed: u64) -> Result<Self> {
        if !(mismatch.is_finite() && mismatch >= 0.0) {
            return Err(invalid!("target mismatch must be finite and nonnegative, got {mismatch}"));
        }
        if !(entry_std.is_finite() && entry_std >= 0.0) {
            return Err(invalid!("teacher scale must be finite and nonnegative, got {entry_std}"));
        }
        let mut rng = rng::stream(seed, rng::TEACHER_STREAM);
        let theta_star = gaussian_matrix(&mut rng, d, q) * entry_std;
        let mut delta = gaussian_matrix(&mut rng, d, q);
        let norm2 = delta.norm_squared();
        delta *= libm::sqrt(mismatch / norm2);
        let theta_0 = &theta_star + delta;
        Self::new(theta_star, theta_0)
    }

    /// Same `Θ⋆` with the prior centre moved to zero (plain ridge regression).
    pub fn without_prior(&self) -> Self {
        let (d, q) = self.theta_star.shape();
        Self { theta_star: self.theta_star.clone(), theta_0: DMatrix::zeros(d, q) }
    }

    /// Same `Θ⋆` with a fresh prior centre at squared distance `mismatch`.
    pub fn with_mismatch(&self, mismatch: f64, seed: u64) -> Result<Self> {
        let (d, q) = self.theta_star.shape();
        let fresh = Self::draw(d, q, mismatch, seed)?;
        let delta = fresh.theta_0 - fresh.theta_star;
        Ok(Self { theta_star: self.theta_star.clone(), theta_0: &self.theta_star + delta })
    }

    pub fn theta_star(&self) -> &DMatrix<f64> {
        &self.theta_star
    }

    pub fn theta_0(&self) -> &DMatrix<f64> {
        &self.theta_0
    }

    pub fn d(&self) -> usize {
        self.theta_star.nrows()
    }

    pub fn q(&self) -> usize {
        self.theta_star.ncols()
    }

    /// `Θ⋆ − Θ₀`.
    pub fn mismatch_matrix(&self) -> DMatrix<f64> {
        &self.theta_star - &self.theta_0
    }

    /// `S = ‖Θ⋆ − Θ₀‖_F²`.
    pub fn total_mismatch(&self) -> f64 {
        self.mismatch_matrix().norm_squared()
    }
}

/// Per-direction prior mismatch `s_i = ‖(Θ⋆ − Θ₀)ᵀ v_i‖²` along the covariance
/// eigenvectors, aligned with the atoms of the spectrum it is paired with.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchProfile {
    s: Vec<f64>,
}

impl MismatchProfile {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = s.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid!("mismatch component #{i} must be finite and nonnegative, got {v}"));
        }
        Ok(Self { s })
    }

    pub fn from_teacher(teacher: &TeacherConfig, cov: &CovarianceModel) -> Result<Self> {
        if teacher.d() != cov.dim() {
            return Err(mismatch!("teacher has d = {} but covariance has d = {}", teacher.d(), cov.dim()));
        }
        let rotated = cov.rotate_to_eigenbasis(&teacher.mismatch_matrix());
        Self::new((0..rotated.nrows()).map(|i| rotated.row(i).norm_squared()).collect())
    }

    /// Total `S` spread over atoms in proportion to `weights` (isotropic mismatch).
    pub fn isotropic(total: f64, weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(invalid!("weights must have a positive sum"));
        }
        Self::new(weights.iter().map(|w| total * w / sum).collect())
    }

    pub fn components(&self) -> &[f64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.s.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub seed: u64,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.y.ncols()
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    // Row-major draw order so a matrix and a prefix of its rows share a stream.
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(normal(rng));
    }
    DMatrix::from_row_slice(rows, cols, &data)
}

/// Draws `rows` pairs `(x, y)`. Per row, `d` standard normals for `z` are
/// followed by `q` for the noise.
fn draw_pairs<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cov: &CovarianceModel,
    teacher: &TeacherConfig,
    sigma: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (d, q) = (teacher.d(), teacher.q());
    let mut z = DMatrix::zeros(rows, d);
    let mut eps = DMatrix::zeros(rows, q);
    for i in 0..rows {
        for j in 0..d {
            z[(i, j)] = normal(rng);
        }
        for k in 0..q {
            eps[(i, k)] = sigma * normal(rng);
        }
    }
    let x = cov.color(z);
    let y = &x * teacher.theta_star() + eps;
    (x, y)
}

fn check_consistent(spec: &ProblemSpec, cov: &CovarianceModel, teacher: &TeacherConfig) -> Result<()> {
    if cov.dim() != spec.d || teacher.d() != spec.d || teacher.q() != spec.q {
        return Err(mismatch!(
            "spec (d = {}, q = {}), covariance d = {}, teacher {}x{}",
            spec.d,
            spec.q,
            cov.dim(),
            teacher.d(),
            teacher.q()
        ));
    }
    Ok(())
}

/// Sample a training set of `spec.n` pairs from the teacher model.
pub fn generate_dataset(
    spec: &ProblemSpec,
    cov: &CovarianceModel,
    teacher: &TeacherConfig,
    seed: u64,
) -> Result<Dataset> {
    check_consistent(spec, cov, teacher)?;
    let mut rng = rng::stream(seed, rng::TRAIN_STREAM);
    let (x, y) = draw_pairs(&mut rng, spec.n, cov, teacher, libm::sqrt(spec.sigma2));
    Ok(Dataset { x, y, seed })
}

/// Sufficient statistics `XᵀX/n`, `XᵀY/n` of a dataset, reusable across many
/// `(λ, Θ₀)` solves.
#[derive(Debug, Clone)]
pub struct MapSolver {
    gram: DMatrix<f64>,
    cross: DMatrix<f64>,
    y_scale: f64,
    n: usize,
}

impl MapSolver {
    pub fn new(data: &Dataset) -> Result<Self> {
        if data.x.nrows() != data.y.nrows() {
            return Err(mismatch!("X has {} rows but Y has {}", data.x.nrows(), data.y.nrows()));
        }
        let n = data.n();
        let inv_n = 1.0 / n as f64;
        let gram = data.x.tr_mul(&data.x) * inv_n;
        let cross = data.x.tr_mul(&data.y) * inv_n;
        let y_scale = data.y.norm() / libm::sqrt(n as f64);
        Ok(Self { gram, cross, y_scale, n })
    }

    pub fn d(&self) -> usize {
        self.gram.nrows()
    }

    /// Solve `(XᵀX/n + λI) Θ = XᵀY/n + λΘ₀`.
    ///
    /// Uses a Cholesky factorisation; if that fails the system is retried with a
    /// fully pivoted LU. The result is rejected unless the normal-equation
    /// residual is within [`NORMAL_EQUATION_TOL`] of `‖Y‖_F/√n + λ‖Θ₀‖_F`.
    pub fn solve(&self, lambda: f64, theta_0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid!("lambda must be finite and nonnegative, got {lambda}"));
        }
        let d = self.d();
        if theta_0.shape() != self.cross.shape() {
            return Err(mismatch!("prior centre is {:?}, expected {:?}", theta_0.shape(), self.cross.shape()));
        }
        if lambda == 0.0 && self.n < d {
            return Err(Error::Singular(format!(
                "lambda = 0 needs a full-rank Gram matrix but n = {} < d = {d}",
                self.n
            )));
        }
        let mut system = self.gram.clone();
        for i in 0..d {
            system[(i, i)] += lambda;
        }
        let rhs = &self.cross + theta_0 * lambda;

        let theta = match system.clone().cholesky() {
            Some(chol) => chol.solve(&rhs),
            None => {
                let lu = system.clone().full_piv_lu();
                if !lu.is_invertible() {
                    return Err(Error::Singular(format!(
                        "XᵀX/n + λI is not invertible at lambda = {lambda}"
                    )));
                }
                lu.solve(&rhs).ok_or_else(|| {
                    Error::Singular(format!("XᵀX/n + λI is not invertible at lambda = {lambda}"))
                })?
            }
        };

        let residual = (&system * &theta - &rhs).norm();
        let bound = NORMAL_EQUATION_TOL * (self.y_scale + lambda * theta_0.norm());
        if !(residual <= bound) {
            return Err(Error::Singular(format!(
                "normal-equation residual {residual:e} exceeds {bound:e} at lambda = {lambda}; \
                 XᵀX/n + λI is numerically singular"
            )));
        }
        Ok(theta)
    }
}

/// MAP estimate `(XᵀX/n + λI)⁻¹ (XᵀY/n + λΘ₀)`.
pub fn map_estimate(data: &Dataset, lambda: f64, theta_0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    MapSolver::new(data)?.solve(lambda, theta_0)
}

/// `‖XΘ̂ − Y‖_F² / (qn)`.
pub fn empirical_train_risk(data: &Dataset, theta_hat: &DMatrix<f64>) -> Result<f64> {
    if theta_hat.nrows() != data.d() || theta_hat.ncols() != data.q() {
        return Err(mismatch!(
            "estimate is {:?}, expected {}x{}",
            theta_hat.shape(),
            data.d(),
            data.q()
        ));
    }
    let residual = &data.x * theta_hat - &data.y;
    Ok(residual.norm_squared() / (data.q() * data.n()) as f64)
}

fn check_estimate(theta_hat: &DMatrix<f64>, teacher: &TeacherConfig, cov: &CovarianceModel) -> Result<()> {
    if theta_hat.shape() != teacher.theta_star().shape() || cov.dim() != teacher.d() {
        return Err(mismatch!(
            "estimate {:?}, teacher {:?}, covariance d = {}",
            theta_hat.shape(),
            teacher.theta_star().shape(),
            cov.dim()
        ));
    }
    Ok(())
}

/// Test risk conditional on the fitted estimate, exact over the test point:
/// `(1/q) tr[(Θ̂−Θ⋆)ᵀ Σ (Θ̂−Θ⋆)] + σ²`.
pub fn exact_test_risk(
    theta_hat: &DMatrix<f64>,
    teacher: &TeacherConfig,
    cov: &CovarianceModel,
    sigma2: f64,
) -> Result<f64> {
    check_estimate(theta_hat, teacher, cov)?;
    let err = theta_hat - teacher.theta_star();
    Ok(cov.quadratic_trace(&err) / teacher.q() as f64 + sigma2)
}

/// Mean of `‖Θ̂ᵀx − y‖²/q` over `n_test` fresh pairs.
pub fn sampled_test_risk(
    theta_hat: &DMatrix<f64>,
    teacher: &TeacherConfig,
    cov: &CovarianceModel,
    sigma2: f64,
    n_test: usize,
    seed: u64,
) -> Result<f64> {
    check_estimate(theta_hat, teacher, cov)?;
    if n_test == 0 {
        return Err(invalid!("n_test must be positive"));
    }
    let mut rng = rng::stream(seed, rng::TEST_STREAM);
    let sigma = libm::sqrt(sigma2);
    let mut remaining = n_test;
    let mut partial = Vec::new();
    while remaining > 0 {
        let rows = remaining.min(TEST_CHUNK_ROWS);
        let (x, y) = draw_pairs(&mut rng, rows, cov, teacher, sigma);
        partial.push((x * theta_hat - y).norm_squared());
        remaining -= rows;
    }
    Ok(crate::stats::pairwise_sum(&partial) / (n_test * teacher.q()) as f64)
}

/// A drawn test set reduced to its second moments around the teacher, so the
/// sampled test risk of many estimates can be evaluated without revisiting
/// the samples. With `E = Θ̂ − Θ⋆` and residual `Eᵀx − ε`:
/// `risk = [tr(EᵀAE) − 2 tr(EᵀB) + C] / q` with `A = XᵀX/N`, `B = XᵀN_ε/N`,
/// `C = ‖N_ε‖²/N`.
///
/// Uses the same draws as [`sampled_test_risk`] for equal `(seed, n_test)`.
#[derive(Debug, Clone)]
pub struct TestSample {
    theta_star: DMatrix<f64>,
    second_moment: DMatrix<f64>,
    noise_cross: DMatrix<f64>,
    noise_power: f64,
    n_test: usize,
}

impl TestSample {
    pub fn draw(
        teacher: &TeacherConfig,
        cov: &CovarianceModel,
        sigma2: f64,
        n_test: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_test == 0 {
            return Err(invalid!("n_test must be positive"));
        }
        if cov.dim() != teacher.d() {
            return Err(mismatch!("teacher has d = {} but covariance has d = {}", teacher.d(), cov.dim()));
        }
        let (d, q) = (teacher.d(), teacher.q());
        let mut rng = rng::stream(seed, rng::TEST_STREAM);
        let sigma = libm::sqrt(sigma2);
        let mut second_moment = DMatrix::zeros(d, d);
        let mut noise_cross = DMatrix::zeros(d, q);
        let mut noise_power = 0.0;
        let mut remaining = n_test;
        while remaining > 0 {
            let rows = remaining.min(TEST_CHUNK_ROWS);
            let (x, y) = draw_pairs(&mut rng, rows, cov, teacher, sigma);
            let eps = y - &x * teacher.theta_star();
            second_moment += x.tr_mul(&x);
            noise_cross += x.tr_mul(&eps);
            noise_power += eps.norm_squared();
            remaining -= rows;
        }
        let inv = 1.0 / n_test as f64;
        Ok(Self {
            theta_star: teacher.theta_star().clone(),
            second_moment: second_moment * inv,
            noise_cross: noise_cross * inv,
            noise_power: noise_power * inv,
            n_test,
        })
    }

    pub fn n_test(&self) -> usize {
        self.n_test
    }

    pub fn risk(&self, theta_hat: &DMatrix<f64>) -> Result<f64> {
        if theta_hat.shape() != self.theta_star.shape() {
            return Err(mismatch!("estimate is {:?}, expected {:?}", theta_hat.shape(), self.theta_star.shape()));
        }
        let err = theta_hat - &self.theta_star;
        let quad = err.dot(&(&self.second_moment * &err));
        let cross = err.dot(&self.noise_cross);
        let q = self.theta_star.ncols() as f64;
        Ok(((quad - 2.0 * cross + self.noise_power) / q).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_instance(sigma2: f64, seed: u64) -> (ProblemSpec, CovarianceModel, TeacherConfig, Dataset) {
        let spec = ProblemSpec::new(3, 5, 2, sigma2).unwrap();
        let cov = CovarianceModel::identity(3).unwrap();
        let teacher = TeacherConfig::draw(3, 2, 1.0, seed).unwrap();
        let data = generate_dataset(&spec, &cov, &teacher, seed).unwrap();
        (spec, cov, teacher, data)
    }

    #[test]
    fn spec_rejects_degenerate_inputs() {
        assert!(ProblemSpec::new(0, 1, 1, 0.0).is_err());
        assert!(ProblemSpec::new(1, 0, 1, 0.0).is_err());
        assert!(ProblemSpec::new(1, 1, 0, 0.0).is_err());
        assert!(ProblemSpec::new(1, 1, 1, -1e-3).is_err());
        assert_eq!(ProblemSpec::new(100, 200, 10, 0.5).unwrap().c(), 0.5);
    }

    #[test]
    fn teacher_hits_target_mismatch_exactly() {
        for s in [0.0, 1e-3, 2.0, 1234.5] {
            let t = TeacherConfig::draw(17, 4, s, 3).unwrap();
            assert!((t.total_mismatch() - s).abs() <= 1e-12 * s.max(1.0));
        }
        assert!(TeacherConfig::new(DMatrix::zeros(3, 2), DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn zero_teacher_without_noise_gives_zero_responses() {
        let spec = ProblemSpec::new(4, 9, 3, 0.0).unwrap();
        let cov = CovarianceModel::identity(4).unwrap();
        let teacher = TeacherConfig::new(DMatrix::zeros(4, 3), DMatrix::zeros(4, 3)).unwrap();
        let data = generate_dataset(&spec, &cov, &teacher, 1).unwrap();
        assert!(data.y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dataset_shapes_follow_spec() {
        let spec = ProblemSpec::new(100, 200, 10, 0.5).unwrap();
        let cov = CovarianceModel::identity(100).unwrap();
        let teacher = TeacherConfig::draw(100, 10, 2.0, 0).unwrap();
        let data = generate_dataset(&spec, &cov, &teacher, 0).unwrap();
        assert_eq!(data.x.shape(), (200, 100));
        assert_eq!(data.y.shape(), (200, 10));
        let again = generate_dataset(&spec, &cov, &teacher, 0).unwrap();
        assert_eq!(data, again);
    }

    #[test]
    fn generate_rejects_mismatched_teacher() {
        let spec = ProblemSpec::new(3, 5, 2, 0.1).unwrap();
        let cov = CovarianceModel::identity(3).unwrap();
        let teacher = TeacherConfig::draw(4, 2, 1.0, 0).unwrap();
        assert!(matches!(generate_dataset(&spec, &cov, &teacher, 0), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn lambda_zero_needs_full_rank() {
        let spec = ProblemSpec::new(6, 4, 1, 0.1).unwrap();
        let cov = CovarianceModel::identity(6).unwrap();
        let teacher = TeacherConfig::draw(6, 1, 1.0, 0).unwrap();
        let data = generate_dataset(&spec, &cov, &teacher, 0).unwrap();
        let err = map_estimate(&data, 0.0, teacher.theta_0()).unwrap_err();
        assert!(matches!(err, Error::Singular(ref m) if m.contains("n = 4 < d = 6")), "{err}");
        assert!(map_estimate(&data, -1.0, teacher.theta_0()).is_err());
        assert!(map_estimate(&data, f64::NAN, teacher.theta_0()).is_err());
    }

    #[test]
    fn lambda_zero_with_duplicated_column_is_singular() {
        let mut x = DMatrix::from_fn(8, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let col = x.column(0).clone_owned();
        x.set_column(2, &col);
        let data = Dataset { x, y: DMatrix::from_element(8, 1, 1.0), seed: 0 };
        assert!(matches!(map_estimate(&data, 0.0, &DMatrix::zeros(3, 1)), Err(Error::Singular(_))));
        assert!(map_estimate(&data, 1e-3, &DMatrix::zeros(3, 1)).is_ok());
    }

    #[test]
    fn huge_lambda_returns_prior_centre() {
        let (_, _, teacher, data) = small_instance(0.3, 11);
        let theta = map_estimate(&data, 1e9, teacher.theta_0()).unwrap();
        let xty = data.x.tr_mul(&data.y) / data.n() as f64;
        assert!((theta - teacher.theta_0()).norm() <= 1e-6 * (1.0 + xty.norm()));
    }

    #[test]
    fn train_risk_matches_elementwise_sum() {
        let (_, _, _, data) = small_instance(0.3, 5);
        let theta = DMatrix::from_fn(3, 2, |i, j| 0.25 * i as f64 - 0.5 * j as f64);
        let mut brute = 0.0;
        for i in 0..5 {
            for k in 0..2 {
                let mut pred = 0.0;
                for j in 0..3 {
                    pred += data.x[(i, j)] * theta[(j, k)];
                }
                brute += (pred - data.y[(i, k)]).powi(2);
            }
        }
        brute /= 10.0;
        let got = empirical_train_risk(&data, &theta).unwrap();
        assert!((got - brute).abs() < 1e-13 * brute);
        assert!(empirical_train_risk(&data, &DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn interpolation_and_zero_give_zero_train_risk() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 0.5]);
        let theta = DMatrix::from_row_slice(2, 1, &[0.3, -0.7]);
        let data = Dataset { y: &x * &theta, x, seed: 0 };
        assert!(empirical_train_risk(&data, &theta).unwrap() < 1e-30);
        let zero = Dataset { x: data.x.clone(), y: DMatrix::zeros(2, 1), seed: 0 };
        assert_eq!(empirical_train_risk(&zero, &DMatrix::zeros(2, 1)).unwrap(), 0.0);
    }

    #[test]
    fn exact_test_risk_reductions() {
        let teacher = TeacherConfig::draw(5, 3, 1.0, 2).unwrap();
        let cov = CovarianceModel::identity(5).unwrap();
        assert_eq!(exact_test_risk(teacher.theta_star(), &teacher, &cov, 0.7).unwrap(), 0.7);
        let theta = teacher.theta_0().clone();
        let expected = (&theta - teacher.theta_star()).norm_squared() / 3.0 + 0.7;
        assert!((exact_test_risk(&theta, &teacher, &cov, 0.7).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn sampled_risk_is_exactly_zero_for_perfect_noiseless_fit() {
        let teacher = TeacherConfig::draw(4, 2, 0.5, 9).unwrap();
        let cov = CovarianceModel::ar1(4, 0.3).unwrap();
        let r = sampled_test_risk(teacher.theta_star(), &teacher, &cov, 0.0, 5000, 1).unwrap();
        assert_eq!(r, 0.0);
        assert!(sampled_test_risk(teacher.theta_star(), &teacher, &cov, 0.0, 0, 1).is_err());
    }

    #[test]
    fn test_sample_moments_match_direct_average() {
        let teacher = TeacherConfig::draw(6, 2, 3.0, 4).unwrap();
        let cov = CovarianceModel::two_atom(6, 1.0, 3.0).unwrap();
        let sample = TestSample::draw(&teacher, &cov, 0.4, 10_000, 8).unwrap();
        for theta in [teacher.theta_0().clone(), teacher.theta_star().clone(), DMatrix::zeros(6, 2)] {
            let direct = sampled_test_risk(&theta, &teacher, &cov, 0.4, 10_000, 8).unwrap();
            let moments = sample.risk(&theta).unwrap();
            assert!((direct - moments).abs() < 1e-10 * direct, "{direct} vs {moments}");
        }
    }

    #[test]
    fn mismatch_profile_sums_to_total_in_any_basis() {
        let teacher = TeacherConfig::draw(8, 3, 2.5, 6).unwrap();
        for cov in [
            CovarianceModel::identity(8).unwrap(),
            CovarianceModel::ar1(8, 0.6).unwrap(),
            CovarianceModel::two_atom(8, 1.0, 3.0).unwrap(),
        ] {
            let profile = MismatchProfile::from_teacher(&teacher, &cov).unwrap();
            assert_eq!(profile.len(), 8);
            assert!((profile.total() - 2.5).abs() <= 1e-9 * 2.5);
            assert!(profile.components().iter().all(|s| *s >= 0.0));
        }
    }
}
