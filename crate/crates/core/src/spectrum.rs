//! Covariance spectra.
//!
//! [`Spectrum`] is the eigenvalue measure consumed by the asymptotic formulas:
//! a list of atoms `(μ, weight)` where `weight` counts how many eigenvalues sit
//! at `μ`. Weights are real so that a normalised measure (e.g. the identity
//! with `d/n = c` and `n = 1`) can be expressed without picking integer sizes.
//!
//! [`CovarianceModel`] is the concrete `Σ` used to draw features.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, mismatch, Result};

const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    atoms: Vec<Atom>,
}

impl Spectrum {
    /// One unit-weight atom per eigenvalue, in the given order.
    pub fn from_eigenvalues(values: &[f64]) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = values.iter().map(|&v| (v, 1.0)).collect();
        Self::from_weighted(&pairs)
    }

    /// `(value, multiplicity)` pairs. Multiplicities are kept as weights and
    /// never expanded.
    pub fn from_weighted(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(invalid!("spectrum is empty"));
        }
        let mut atoms = Vec::with_capacity(pairs.len());
        for (i, &(value, weight)) in pairs.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid!("eigenvalue #{i} must be positive and finite, got {value}"));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(invalid!("multiplicity #{i} must be positive and finite, got {weight}"));
            }
            atoms.push(Atom { value, weight });
        }
        Ok(Self { atoms })
    }

    /// A single atom: `weight` eigenvalues all equal to `value`.
    pub fn constant(value: f64, weight: f64) -> Result<Self> {
        Self::from_weighted(&[(value, weight)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total weight, i.e. the dimension `d` for an integer spectrum.
    pub fn dimension(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `Σ_atoms weight · g(μ)`.
    pub fn weighted_sum(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * g(a.value)).sum()
    }

    /// The common eigenvalue when every atom has the same value.
    pub fn constant_value(&self) -> Option<f64> {
        let first = self.atoms[0].value;
        self.atoms.iter().all(|a| a.value == first).then_some(first)
    }

    /// Materialise one value per eigenvalue. Only valid for integer weights.
    pub fn expand(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for a in &self.atoms {
            let m = a.weight.round();
            if (a.weight - m).abs() > 1e-9 {
                return Err(invalid!("cannot expand fractional multiplicity {}", a.weight));
            }
            out.extend(core::iter::repeat_n(a.value, m as usize));
        }
        Ok(out)
    }
}

/// Population covariance `Σ = V diag(μ) Vᵀ` of the features.
#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceModel {
    Identity { dim: usize },
    Diagonal { eigenvalues: Vec<f64> },
    Full { eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64> },
}

impl CovarianceModel {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("dimension must be at least 1"));
        }
        Ok(Self::Identity { dim })
    }

    pub fn diagonal(eigenvalues: Vec<f64>) -> Result<Self> {
        check_positive(&eigenvalues)?;
        Ok(Self::Diagonal { eigenvalues })
    }

    /// Eigenvalues `μ_i` with orthonormal eigenvectors as the columns of `eigenvectors`.
    pub fn full(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        check_positive(&eigenvalues)?;
        let d = eigenvalues.len();
        if eigenvectors.shape() != (d, d) {
            return Err(mismatch!(
                "eigenvector matrix is {:?}, expected {d}x{d}",
                eigenvectors.shape()
            ));
        }
        let gram = eigenvectors.transpose() * &eigenvectors;
        let err = (gram - DMatrix::<f64>::identity(d, d)).amax();
        if err > ORTHONORMAL_TOL {
            return Err(invalid!("eigenvectors are not orthonormal (max |VᵀV - I| = {err:e})"));
        }
        Ok(Self::Full { eigenvalues, eigenvectors })
    }

    /// Diagonalise a symmetric positive-definite covariance matrix.
    pub fn from_matrix(sigma: DMatrix<f64>) -> Result<Self> {
        if !sigma.is_square() || sigma.nrows() == 0 {
            return Err(mismatch!("covariance must be square and non-empty, got {:?}", sigma.shape()));
        }
        let asym = (&sigma - sigma.transpose()).amax();
        if asym > 1e-12 * sigma.amax().max(1.0) {
            return Err(invalid!("covariance is not symmetric (max asymmetry {asym:e})"));
        }
        let eig = sigma.symmetric_eigen();
        Self::full(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }

    /// Autoregressive covariance `Σ_ij = ρ^|i-j|`.
    pub fn ar1(dim: usize, rho: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("dimension must be at least 1"));
        }
        if !(rho.abs() < 1.0) {
            return Err(invalid!("AR(1) coefficient must satisfy |rho| < 1, got {rho}"));
        }
        let sigma = DMatrix::from_fn(dim, dim, |i, j| libm::pow(rho, i.abs_diff(j) as f64));
        Self::from_matrix(sigma)
    }

    /// Diagonal covariance with the first `⌊dim/2⌋` eigenvalues at `low` and the
    /// rest at `high`.
    pub fn two_atom(dim: usize, low: f64, high: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("dimension must be at least 1"));
        }
        let half = dim / 2;
        let values = (0..dim).map(|i| if i < half { low } else { high }).collect();
        Self::diagonal(values)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::Diagonal { eigenvalues } | Self::Full { eigenvalues, .. } => eigenvalues.len(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            Self::Identity { dim } => vec![1.0; *dim],
            Self::Diagonal { eigenvalues } | Self::Full { eigenvalues, .. } => eigenvalues.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity { .. })
    }

    /// One atom per eigenvalue, aligned with [`Self::eigenvalues`] and hence
    /// with [`crate::MismatchProfile::from_teacher`].
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::from_eigenvalues(&self.eigenvalues()).expect("validated at construction")
    }

    /// Coordinates of the rows of `m` in the eigenbasis: `Vᵀ m` for a `d×k` matrix `m`.
    pub fn rotate_to_eigenbasis(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Self::Full { eigenvectors, .. } => eigenvectors.tr_mul(m),
            _ => m.clone(),
        }
    }

    /// Map standard-normal rows `z` to rows with covariance `Σ`: `X = Z diag(√μ) Vᵀ`.
    pub fn color(&self, mut z: DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Self::Identity { .. } => z,
            Self::Diagonal { eigenvalues } => {
                scale_columns_sqrt(&mut z, eigenvalues);
                z
            }
            Self::Full { eigenvalues, eigenvectors } => {
                scale_columns_sqrt(&mut z, eigenvalues);
                z * eigenvectors.transpose()
            }
        }
    }

    /// `tr(Eᵀ Σ E)` for a `d×k` matrix `E`.
    pub fn quadratic_trace(&self, e: &DMatrix<f64>) -> f64 {
        match self {
            Self::Identity { .. } => e.norm_squared(),
            Self::Diagonal { eigenvalues } => weighted_row_norms(e, eigenvalues),
            Self::Full { eigenvalues, eigenvectors } => {
                weighted_row_norms(&eigenvectors.tr_mul(e), eigenvalues)
            }
        }
    }

    /// The dense matrix `Σ`.
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            Self::Identity { dim } => DMatrix::identity(*dim, *dim),
            Self::Diagonal { eigenvalues } => DMatrix::from_diagonal(&eigenvalues.clone().into()),
            Self::Full { eigenvalues, eigenvectors } => {
                let mut scaled = eigenvectors.clone();
                for (j, mu) in eigenvalues.iter().enumerate() {
                    scaled.column_mut(j).scale_mut(*mu);
                }
                scaled * eigenvectors.transpose()
            }
        }
    }
}

fn check_positive(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid!("covariance needs at least one eigenvalue"));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(invalid!("covariance must be positive definite: eigenvalue #{i} is {v}"));
    }
    Ok(())
}

fn scale_columns_sqrt(z: &mut DMatrix<f64>, eigenvalues: &[f64]) {
    for (j, mu) in eigenvalues.iter().enumerate() {
        z.column_mut(j).scale_mut(libm::sqrt(*mu));
    }
}

fn weighted_row_norms(m: &DMatrix<f64>, weights: &[f64]) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * m.row(i).norm_squared())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_eigenvalues() {
        assert!(CovarianceModel::diagonal(vec![1.0, 0.0]).is_err());
        assert!(CovarianceModel::diagonal(vec![1.0, -2.0]).is_err());
        assert!(Spectrum::from_eigenvalues(&[1.0, f64::NAN]).is_err());
        assert!(Spectrum::from_weighted(&[(1.0, 0.0)]).is_err());
        assert!(Spectrum::from_eigenvalues(&[]).is_err());
    }

    #[test]
    fn rejects_non_orthonormal_basis() {
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(CovarianceModel::full(vec![1.0, 2.0], v).is_err());
    }

    #[test]
    fn ar1_reconstructs_its_matrix() {
        let cov = CovarianceModel::ar1(12, 0.5).unwrap();
        let sigma = cov.matrix();
        assert!((sigma[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((sigma[(3, 5)] - 0.25).abs() < 1e-12);
        let trace: f64 = cov.eigenvalues().iter().sum();
        assert!((trace - 12.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_spectrum_is_not_expanded_for_sums() {
        let s = Spectrum::from_weighted(&[(1.0, 50.0), (3.0, 50.0)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dimension(), 100.0);
        assert_eq!(s.weighted_sum(|mu| mu), 200.0);
        assert_eq!(s.expand().unwrap().len(), 100);
        assert!(Spectrum::constant(1.0, 0.5).unwrap().expand().is_err());
    }

    #[test]
    fn quadratic_trace_agrees_with_dense_matrix() {
        let cov = CovarianceModel::ar1(6, -0.3).unwrap();
        let e = DMatrix::from_fn(6, 2, |i, j| (i as f64 - 2.0) * 0.3 + j as f64);
        let dense = (e.transpose() * cov.matrix() * &e).trace();
        assert!((cov.quadratic_trace(&e) - dense).abs() < 1e-12 * dense.abs().max(1.0));
    }
}
